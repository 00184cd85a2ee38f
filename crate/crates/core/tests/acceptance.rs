//! Acceptance run: twelve criteria, one line each.
//!
//! Criteria are scored from raw residuals against their own bounds, not the
//! suite tolerances. Two criteria check relations that do not hold in the
//! form stated; they are printed as FAIL (known) and do not fail the run.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::Rational64;
use qtop_core::rep::{Normalizer, Spin};
use qtop_core::report::{Expect, Report};
use qtop_core::suite::{run, Suite, SuiteConfig, DETECTION};
use qtop_core::BackendKind;

#[derive(Clone, Copy)]
enum Bound {
    /// residual ≤ bound; 0 means exactly zero
    Max(f64),
    /// negative control: residual ≥ bound
    Min(f64),
}

struct Item {
    label: String,
    residual: f64,
    bound: Bound,
}

impl Item {
    fn ok(&self) -> bool {
        match self.bound {
            Bound::Max(b) => self.residual.is_finite() && self.residual <= b,
            Bound::Min(b) => self.residual.is_finite() && self.residual >= b,
        }
    }
}

struct Runs {
    exact2: Report,
    exact2_half: Report,
    exact3: Report,
    exact4: Report,
    numeric: Report,
    numeric_half: Report,
    numeric_one: Report,
}

fn cfg(backend: BackendKind, n: usize, gamma: Rational64) -> SuiteConfig {
    SuiteConfig { backend, n, gamma, ..SuiteConfig::default() }
}

fn report(suites: &[Suite], c: &SuiteConfig) -> Report {
    let mut checks = Vec::new();
    for &s in suites {
        checks.extend(run(s, c).unwrap_or_else(|e| panic!("{s}: {e}")).checks);
    }
    Report::new(checks, c.to_json())
}

fn runs() -> Runs {
    let zero = Rational64::from_integer(0);
    let half = Rational64::new(1, 2);
    let exact2 = cfg(BackendKind::Exact, 2, zero);
    let exact_id = |g| SuiteConfig { normalizer: Some(Normalizer::Identity), ..cfg(BackendKind::Exact, 2, g) };
    let mut numeric = cfg(BackendKind::Numeric, 2, zero);
    numeric.spins = ["1/2", "1", "3/2", "2"].iter().map(|s| s.parse::<Spin>().unwrap()).collect();
    let numeric_g =
        |g| SuiteConfig { normalizer: Some(Normalizer::InverseSqrtQnum), ..cfg(BackendKind::Numeric, 2, g) };
    let ranked = [Suite::Ybe, Suite::Crossing, Suite::Invariants];
    Runs {
        exact2: report(&[Suite::All], &exact2),
        exact2_half: report(&[Suite::Contravariant], &exact_id(half)),
        exact3: report(&ranked, &cfg(BackendKind::Exact, 3, zero)),
        exact4: report(&ranked, &cfg(BackendKind::Exact, 4, zero)),
        numeric: report(&[Suite::All], &numeric),
        numeric_half: report(&[Suite::Contravariant], &numeric_g(half)),
        numeric_one: report(&[Suite::Contravariant], &numeric_g(Rational64::from_integer(1))),
    }
}

/// Every check whose id starts with `prefix`, scored against `bound`.
fn pick(out: &mut Vec<Item>, r: &Report, tag: &str, prefix: &str, bound: Bound) {
    let before = out.len();
    for c in r.checks.iter().filter(|c| c.id.starts_with(prefix) && c.expect != Expect::AtLeast) {
        out.push(Item { label: format!("{tag}:{}", c.id), residual: c.residual, bound });
    }
    if out.len() == before {
        // A missing check must not read as a pass.
        out.push(Item { label: format!("{tag}:{prefix} (no such check)"), residual: f64::INFINITY, bound });
    }
}

struct Criterion {
    number: u8,
    title: &'static str,
    items: Vec<Item>,
    known_red: bool,
}

fn criteria(r: &Runs) -> Vec<Criterion> {
    use Bound::Max;
    let mut all = Vec::new();
    let mut add = |number, title, known_red, f: &dyn Fn(&mut Vec<Item>)| {
        let mut items = Vec::new();
        f(&mut items);
        all.push(Criterion { number, title, items, known_red });
    };

    add(1, "route agreement, exact", false, &|v| pick(v, &r.exact2, "exact", "ybe.routes.", Max(0.0)));
    add(2, "yang-baxter, exact n=2,3,4 and numeric spin 1/2 x s", false, &|v| {
        pick(v, &r.exact2, "exact", "ybe.fundamental.n2", Max(0.0));
        pick(v, &r.exact3, "exact", "ybe.fundamental.n3", Max(0.0));
        pick(v, &r.exact4, "exact", "ybe.fundamental.n4", Max(0.0));
        pick(v, &r.numeric, "numeric", "ybe.mixed.", Max(1e-10));
    });
    add(3, "RLL on the model space", false, &|v| pick(v, &r.numeric, "numeric", "rll.", Max(1e-11)));
    add(4, "reflection equation", false, &|v| pick(v, &r.numeric, "numeric", "reflection", Max(1e-10)));
    add(5, "contravariant relations", false, &|v| {
        pick(v, &r.exact2, "exact g=0", "contravariant.relation", Max(0.0));
        pick(v, &r.exact2_half, "exact g=1/2", "contravariant.relation", Max(0.0));
        for (tag, rep) in
            [("numeric g=0", &r.numeric), ("numeric g=1/2", &r.numeric_half), ("numeric g=1", &r.numeric_one)]
        {
            pick(v, rep, tag, "contravariant.relation", Max(1e-9));
            pick(v, rep, tag, "contravariant.components", Max(1e-9));
        }
    });
    add(6, "covariant relations and chi-transformed matrices", true, &|v| {
        for p in ["covariant.relation", "covariant.row", "covariant.components", "covariant.hat."] {
            pick(v, &r.numeric, "numeric", p, Max(1e-9));
        }
    });
    add(7, "scalars, quantum determinant, Hecke ranks", false, &|v| {
        pick(v, &r.numeric, "numeric", "scalars.", Max(1e-9));
        pick(v, &r.numeric, "numeric", "invariants.qdet.u", Max(1e-8));
        pick(v, &r.numeric, "numeric", "invariants.qdet.w", Max(1e-8));
        pick(v, &r.exact2, "exact", "invariants.hecke-rank.n2", Max(0.0));
        pick(v, &r.exact3, "exact", "invariants.hecke-rank.n3", Max(0.0));
        pick(v, &r.exact4, "exact", "invariants.hecke-rank.n4", Max(0.0));
    });
    add(8, "fusion", false, &|v| {
        pick(v, &r.numeric, "numeric", "fusion.r-matrix.", Max(1e-10));
        pick(v, &r.exact2, "exact", "fusion.commutation.", Max(0.0));
        pick(v, &r.numeric, "numeric", "fusion.generating.identity", Max(1e-8));
        pick(v, &r.numeric, "numeric", "fusion.generating.q-spin", Max(1e-8));
    });
    add(9, "wigner-eckart factorization and CG maps", false, &|v| {
        for p in ["wigner-eckart.w-col", "wigner-eckart.u-row"] {
            pick(v, &r.numeric, "numeric", p, Max(1e-7));
        }
        pick(v, &r.numeric, "numeric", "wigner-eckart.cg-intertwiner.", Max(1e-11));
        pick(v, &r.numeric, "numeric", "wigner-eckart.cg-completeness.", Max(1e-11));
        pick(v, &r.numeric, "numeric", "wigner-eckart.cg-fusion.", Max(1e-10));
    });
    add(10, "crossing: chi at fundamental, Weyl conjugation, Weyl on (1/2,1/2)", true, &|v| {
        pick(v, &r.exact2, "exact", "crossing.chi.n2", Max(0.0));
        pick(v, &r.exact3, "exact", "crossing.chi.n3", Max(0.0));
        pick(v, &r.exact4, "exact", "crossing.chi.n4", Max(0.0));
        pick(v, &r.exact3, "exact", "crossing.wew.n3", Max(0.0));
        pick(v, &r.numeric, "numeric", "crossing.weyl.half-half", Max(1e-12));
    });
    add(11, "classical limit", false, &|v| {
        pick(v, &r.numeric, "numeric", "classical.derivative.plus.plain", Max(1e-5));
        pick(v, &r.numeric, "numeric", "classical.derivative.plus.richardson", Max(1e-9));
        pick(v, &r.exact2, "exact", "classical.contravariant", Max(0.0));
        pick(v, &r.numeric, "numeric", "classical.w-limit", Max(1e-5));
    });
    add(12, "negative controls detect a single-entry perturbation", false, &|v| {
        let tagged = [
            ("exact n=2", &r.exact2),
            ("exact n=2 g=1/2", &r.exact2_half),
            ("exact n=3", &r.exact3),
            ("exact n=4", &r.exact4),
            ("numeric", &r.numeric),
            ("numeric g=1/2", &r.numeric_half),
            ("numeric g=1", &r.numeric_one),
        ];
        for (tag, rep) in tagged {
            for c in rep.checks.iter().filter(|c| c.expect == Expect::AtLeast || c.id.contains("negative")) {
                v.push(Item { label: format!("{tag}:{}", c.id), residual: c.residual, bound: Bound::Min(DETECTION) });
            }
        }
    });
    all
}

fn main() -> ExitCode {
    let start = Instant::now();
    let r = runs();
    let mut unexpected = 0;
    for c in criteria(&r) {
        let failed: Vec<&Item> = c.items.iter().filter(|i| !i.ok()).collect();
        let pass = failed.is_empty();
        let tag = match (pass, c.known_red) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        if !pass && !c.known_red {
            unexpected += 1;
        }
        // closest to failing: largest bounded residual, or smallest detection
        let worst = if c.items.iter().all(|i| matches!(i.bound, Bound::Min(_))) {
            c.items.iter().map(|i| i.residual).fold(f64::INFINITY, f64::min)
        } else {
            c.items.iter().filter(|i| matches!(i.bound, Bound::Max(_))).map(|i| i.residual).fold(0.0_f64, f64::max)
        };
        let mut line =
            format!("{tag:<12} {:>2}. {} [{} checks, worst residual {worst:.3e}]", c.number, c.title, c.items.len());
        if let Some(first) = failed.first() {
            let bound = match first.bound {
                Bound::Max(b) => format!("<= {b:.0e}"),
                Bound::Min(b) => format!(">= {b:.0e}"),
            };
            line.push_str(&format!(" first failure {} = {:.3e}, needs {bound}", first.label, first.residual));
            if failed.len() > 1 {
                line.push_str(&format!(" (+{} more)", failed.len() - 1));
            }
        }
        println!("{line}");
    }
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
