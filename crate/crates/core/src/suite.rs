//! Named verification suites. Each suite expands to a list of independent
//! jobs; running a job yields one report line. Constructions shared between
//! jobs are built lazily once, and a construction error fails only the
//! checks that depend on it.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde_json::json;

use crate::classical::{
    build_classical_w_half, classical_component_residual, classical_covariant, classical_crossing, classical_l,
    classical_ops, classical_r_sl2, q_derivative_limit, realization_defect, verify_classical_casimir,
    verify_classical_generating, verify_cybe, w_half_limit_deviation,
};
use crate::error::{Error, Result};
use crate::matrix::{hecke_projectors, residual_norm, ImageBasis, Projector, ProjectorPair, RingMatrix};
use crate::rep::{coproduct_rep, fundamental_rep, spin_rep, Basis, ModelSpace, Normalizer, RepLabel, Spin};
use crate::report::{Check, Expect, Report, Residual};
use crate::rmatrix::{
    antipode_defect, build_l, fundamental_r, fuse_r, lop_substituted_r, perturbed, universal_r_sl2, verify_both_legs,
    verify_crossing, verify_crossing_literal, verify_fusion_commutation, verify_quasitriangular, verify_reflection,
    verify_rll_all, verify_ybe, verify_ybe_mixed, Crossing, LOperator, RMatrix, Variant,
};
use crate::scalar::{Backend, BackendKind, Exact, Numeric, Scalar};
use crate::tensorop::{
    build_w_half, build_w_half_printed, chi_matrix, chi_transform, component_residual, convert_contra_to_co,
    default_normalizer, fuse_generating, invariant_qdet, q_spin_factor, scalars, verify_contravariant,
    verify_covariant, verify_hat, verify_scalar_matrix, verify_wew, weyl_matrix, GeneratingMatrix,
};
use crate::wigner::{
    basis_action_check, build_cg, components, verify_cg_fusion_lop, verify_completeness, verify_intertwiner,
    wigner_eckart_scan,
};

/// Size of the single-entry perturbation used by negative controls.
pub const PERTURBATION: f64 = 1e-3;
/// A perturbed input must move its verifier at least this far.
pub const DETECTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Ybe,
    Rll,
    Reflection,
    Crossing,
    Covariant,
    Contravariant,
    Scalars,
    Fusion,
    Invariants,
    WignerEckart,
    Classical,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::Ybe,
        Suite::Rll,
        Suite::Reflection,
        Suite::Crossing,
        Suite::Covariant,
        Suite::Contravariant,
        Suite::Scalars,
        Suite::Fusion,
        Suite::Invariants,
        Suite::WignerEckart,
        Suite::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Rll => "rll",
            Suite::Reflection => "reflection",
            Suite::Crossing => "crossing",
            Suite::Covariant => "covariant",
            Suite::Contravariant => "contravariant",
            Suite::Scalars => "scalars",
            Suite::Fusion => "fusion",
            Suite::Invariants => "invariants",
            Suite::WignerEckart => "wigner-eckart",
            Suite::Classical => "classical",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub backend: BackendKind,
    pub q: f64,
    /// Rank of sl(n) for the fundamental-rep checks.
    pub n: usize,
    pub spins: Vec<Spin>,
    /// Model space degree `D`.
    pub degree: usize,
    pub gamma: Rational64,
    /// `None` picks identity on the exact backend and `1/sqrt([p])` otherwise.
    pub normalizer: Option<Normalizer>,
    /// Overrides every built-in tolerance when set.
    pub tol: Option<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            backend: BackendKind::Numeric,
            q: crate::scalar::DEFAULT_Q,
            n: 2,
            spins: vec![Spin::HALF, Spin::ONE],
            degree: 12,
            gamma: Rational64::zero(),
            normalizer: None,
            tol: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q.is_finite() && self.q > 1.0) {
            return Err(Error::Invalid(format!("q must be a real number > 1, got {}", self.q)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Invalid("tolerance must be positive".into()));
            }
        }
        if !(2..=6).contains(&self.n) {
            return Err(Error::Invalid(format!("n = {} outside 2..=6", self.n)));
        }
        if self.spins.is_empty() || self.spins.iter().any(|s| s.twice() == 0 || s.twice() > 8) {
            return Err(Error::Invalid("spins must lie in 1/2..=4".into()));
        }
        let max = self.spins.iter().map(|s| s.twice()).max().unwrap_or(0) as usize;
        if self.degree < 2 || self.degree < max {
            return Err(Error::Invalid(format!("D = {} must be at least 2 and at least 2 * max spin", self.degree)));
        }
        if self.gamma < Rational64::zero() || (self.gamma * 2).denom() != &1 {
            return Err(Error::Invalid("gamma must be a non-negative multiple of 1/2".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "backend": self.backend,
            "q": self.q,
            "n": self.n,
            "spins": self.spins.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "D": self.degree,
            "gamma": self.gamma.to_string(),
            "normalizer": self.normalizer,
            "tol": self.tol,
        })
    }

    fn exact(&self) -> Exact {
        Exact { root: (2 * self.n) as u32, q_eval: self.q }
    }

    fn numeric(&self) -> Result<Numeric> {
        Numeric::new(self.q)
    }
}

type RunFn = Box<dyn Fn() -> Result<Residual> + Send + Sync>;

/// One check waiting to run.
pub struct Job {
    pub id: String,
    pub anchor: String,
    pub tolerance: f64,
    pub expect: Expect,
    run: RunFn,
}

impl fmt::Debug for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Job").field("id", &self.id).field("expect", &self.expect).finish()
    }
}

impl Job {
    pub fn run(&self) -> Check {
        let start = Instant::now();
        let mut check = match (self.run)() {
            Ok(res) => {
                let mut c = Check::evaluate(&self.id, &self.anchor, res.value, self.tolerance, self.expect);
                if !res.parts.is_empty() {
                    let parts: Vec<String> = res.parts.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
                    c.detail = Some(parts.join(", "));
                }
                c
            }
            Err(e) => Check::failed(&self.id, &self.anchor, self.tolerance, e.to_string()),
        };
        check.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        check
    }
}

/// A construction shared between jobs, built on first use.
pub struct Shared<T> {
    cell: Arc<OnceLock<std::result::Result<Arc<T>, Error>>>,
    init: Arc<dyn Fn() -> Result<T> + Send + Sync>,
}

impl<T> Clone for Shared<T> {
    fn clone(&self) -> Self {
        Shared { cell: self.cell.clone(), init: self.init.clone() }
    }
}

impl<T: Send + Sync + 'static> Shared<T> {
    pub fn new(f: impl Fn() -> Result<T> + Send + Sync + 'static) -> Self {
        Shared { cell: Arc::new(OnceLock::new()), init: Arc::new(f) }
    }

    pub fn get(&self) -> Result<Arc<T>> {
        self.cell.get_or_init(|| (self.init)().map(Arc::new)).clone().map_err(|e| Error::Construction(e.to_string()))
    }
}

struct Plan {
    jobs: Vec<Job>,
    tol: Option<f64>,
}

impl Plan {
    fn push(
        &mut self,
        id: String,
        anchor: &str,
        tolerance: f64,
        expect: Expect,
        f: impl Fn() -> Result<Residual> + Send + Sync + 'static,
    ) {
        let tolerance = match (expect, self.tol) {
            (Expect::AtMost, Some(t)) => t,
            _ => tolerance,
        };
        self.jobs.push(Job { id, anchor: anchor.into(), tolerance, expect, run: Box::new(f) });
    }

    fn at_most(
        &mut self,
        id: impl Into<String>,
        anchor: &str,
        tol: f64,
        f: impl Fn() -> Result<Residual> + Send + Sync + 'static,
    ) {
        self.push(id.into(), anchor, tol, Expect::AtMost, f);
    }

    fn negative(
        &mut self,
        id: impl Into<String>,
        anchor: &str,
        f: impl Fn() -> Result<Residual> + Send + Sync + 'static,
    ) {
        self.push(id.into(), anchor, DETECTION, Expect::AtLeast, f);
    }

    fn info(
        &mut self,
        id: impl Into<String>,
        anchor: &str,
        tol: f64,
        f: impl Fn() -> Result<Residual> + Send + Sync + 'static,
    ) {
        self.push(id.into(), anchor, tol, Expect::Info, f);
    }
}

fn single(anchor: &str, v: f64) -> Result<Residual> {
    Ok(Residual::single(anchor, v))
}

/// Exact-backend residuals must vanish; numeric ones get `num`.
fn tol_for<B: Backend>(num: f64) -> f64 {
    if B::Elem::exact() {
        0.0
    } else {
        num
    }
}

fn delta<B: Backend>(ctx: &B) -> B::Elem {
    ctx.rational(Rational64::new(1, 1000))
}

mod anchor {
    pub const YBE: &str = "yang-baxter: R12 R13 R23 = R23 R13 R12";
    pub const QT: &str = "quasitriangularity: R Δ(x) = Δ'(x) R";
    pub const ROUTES: &str = "R-matrix routes agree: universal series, L-operator substitution, closed form";
    pub const ANTIPODE: &str = "antipode: (S ⊗ id) R = R^-1";
    pub const RLL: &str = "RLL: R L1 L2 = L2 L1 R";
    pub const REFLECTION: &str = "reflection: L1 (R-)^-1 L2 R- = (R+)^-1 L2 R+ L1, L = L+ (L-)^-1";
    pub const WEYL: &str = "crossing via q-Weyl element: W1 R^-1 W1^-1 = R^t1, W2 R W2^-1 = (R^-1)^t2";
    pub const WEW: &str = "q-Weyl conjugation: W E_ij W^-1 = (-1)^(i+j) q^(i-j) E_(n+1-i, n+1-j)";
    pub const CHI: &str = "crossing with chi: chi1 R chi1^-1 = R^t1 (literal form)";
    pub const CHI_BOTH: &str = "chi on both legs: (chi ⊗ chi) R (chi ⊗ chi)^-1 = R^t";
    pub const WEYL_BOTH: &str = "q-Weyl element on both legs: (W ⊗ W) R (W ⊗ W)^-1 = R^t";
    pub const LITERAL: &str = "crossing read as transpose of R^-1 on leg one (literal form)";
    pub const CONTRA: &str = "contravariant generating matrix: L1 W2 = R^-1 W2 L1";
    pub const CONTRA_COMP: &str = "contravariant components: q^H W q^-H = q^-rho(H) W and X± analogues";
    pub const CONTRA_PRINTED: &str = "contravariant relation for the uncorrected spin-1/2 matrix";
    pub const CO: &str = "covariant generating matrix: L1 U2 = U2 R L1";
    pub const CO_COMP: &str = "covariant components: q^H U q^-H = U q^rho(H) and X± analogues";
    pub const CO_ROW: &str = "a single row of a covariant matrix is a tensor operator";
    pub const HAT: &str = "chi-transformed matrices: L1 U^2 = R U^2 L1, L1 W^2 = W^2 R^-1 L1";
    pub const SCALARS: &str = "U W entries commute with q^H, X+, X-";
    pub const SCALAR_L: &str = "U W commutes with the L-operators";
    pub const FUSED_R: &str = "fused R-matrix P R13 R12 P agrees with the spin-1 R-matrix";
    pub const FUSION_COMM: &str = "fusion commutation: P23 R13 R12 = R13 R12 P23";
    pub const FUSED_G: &str = "fused generating matrix satisfies its defining relation";
    pub const HECKE_RANK: &str = "Hecke projector ranks n(n+1)/2 and n(n-1)/2";
    pub const HECKE_IDEM: &str = "Hecke projectors are complementary idempotents";
    pub const QDET: &str = "quantum determinant from the antisymmetrizer is invariant";
    pub const QDET_PLUS: &str = "symmetrizer in place of antisymmetrizer is not invariant";
    pub const WE: &str = "Wigner-Eckart: matrix elements = reduced element x CGC";
    pub const CG_T4: &str = "CG map intertwines: C Δ(x) = rho(x) C";
    pub const CG_T5: &str = "CG completeness and orthogonality";
    pub const CG_T6: &str = "CG fusion: R13 R12 C' = C' R";
    pub const BASIS: &str = "L-operators act on spin blocks through R: L1 v = v R";
    pub const CL_DERIV: &str = "classical limit: (R(1+eps) - 1)/eps -> r";
    pub const CL_REL: &str = "classical generating matrix: [l1, W2] = -r W2, [l1, U2] = U2 r";
    pub const CL_CASIMIR: &str = "tensor Casimir: [l+ - l-, W] = -(r+ - r-) W";
    pub const CL_COMP: &str = "classical components: [x, G] = rho(x) action";
    pub const CL_REAL: &str = "polynomial realization: [X+, X-] = 2H, [H, X±] = ±X±";
    pub const CYBE: &str = "classical Yang-Baxter: [r12,r13] + [r12,r23] + [r13,r23] = 0";
    pub const CL_WEYL: &str = "classical crossing: -W1 r W1^-1 = r^t1";
    pub const CL_CHI: &str = "classical crossing with chi: chi1 r chi1 = r^t1 (literal form)";
    pub const CL_W: &str = "q -> 1 limit of the spin-1/2 matrix equals the undeformed one";
}

/// Expand a suite into jobs.
pub fn jobs(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Job>> {
    cfg.validate()?;
    let mut plan = Plan { jobs: Vec::new(), tol: cfg.tol };
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in list {
        match cfg.backend {
            BackendKind::Exact => add_suite(&mut plan, s, cfg, cfg.exact())?,
            BackendKind::Numeric => add_suite(&mut plan, s, cfg, cfg.numeric()?)?,
        }
    }
    Ok(plan.jobs)
}

/// Run every job in order and assemble the report.
pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    let checks = jobs(suite, cfg)?.iter().map(Job::run).collect();
    Ok(Report::new(checks, cfg.to_json()))
}

fn add_suite<B: Backend>(p: &mut Plan, s: Suite, cfg: &SuiteConfig, ctx: B) -> Result<()> {
    match s {
        Suite::Ybe => ybe(p, cfg, ctx),
        Suite::Rll => rll(p, cfg, ctx),
        Suite::Reflection => reflection(p, cfg, ctx),
        Suite::Crossing => crossing(p, cfg, ctx),
        Suite::Covariant => covariant(p, cfg, ctx),
        Suite::Contravariant => contravariant(p, cfg, ctx),
        Suite::Scalars => scalar_checks(p, cfg, ctx),
        Suite::Fusion => fusion(p, cfg, ctx)?,
        Suite::Invariants => invariants(p, cfg, ctx),
        Suite::WignerEckart => wigner_eckart(p, cfg, ctx)?,
        Suite::Classical => classical(p, cfg)?,
        Suite::All => unreachable!("expanded by the caller"),
    }
    Ok(())
}

fn ybe<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let n = cfg.n;
    for v in [Variant::Plus, Variant::Minus] {
        let c = ctx.clone();
        p.at_most(format!("ybe.fundamental.n{n}.{v}"), anchor::YBE, tol_for::<B>(1e-10), move || {
            single(anchor::YBE, verify_ybe(&fundamental_r(n, v, &c)?, &c)?)
        });
    }
    let c = ctx.clone();
    p.at_most(format!("ybe.quasitriangular.n{n}"), anchor::QT, tol_for::<B>(1e-10), move || {
        let rep = fundamental_rep(n, &c)?;
        verify_quasitriangular(&fundamental_r(n, Variant::Plus, &c)?, &rep, &rep, &c)
    });
    for v in [Variant::Plus, Variant::Minus] {
        let c = ctx.clone();
        p.at_most(format!("ybe.routes.fundamental-lop.{v}"), anchor::ROUTES, tol_for::<B>(1e-12), move || {
            let a = fundamental_r(2, v, &c)?;
            let b = lop_substituted_r(Spin::HALF, v, Basis::Integral, &c)?;
            single(anchor::ROUTES, residual_norm(&a.matrix, &b.matrix, &c)?)
        });
    }
    for &s in &cfg.spins {
        let c = ctx.clone();
        p.at_most(format!("ybe.routes.universal-lop.{s}"), anchor::ROUTES, tol_for::<B>(1e-10), move || {
            let half = spin_rep(Spin::HALF, Basis::Integral, &c)?;
            let rs = spin_rep(s, Basis::Integral, &c)?;
            let u = universal_r_sl2(&half, &rs, &c)?;
            let l = lop_substituted_r(s, Variant::Plus, Basis::Integral, &c)?;
            single(anchor::ROUTES, residual_norm(&u.matrix, &l.matrix, &c)?)
        });
        let c = ctx.clone();
        p.at_most(format!("ybe.antipode.{s}"), anchor::ANTIPODE, tol_for::<B>(1e-10), move || {
            let half = spin_rep(Spin::HALF, Basis::Integral, &c)?;
            single(anchor::ANTIPODE, antipode_defect(&half, &spin_rep(s, Basis::Integral, &c)?, &c)?)
        });
        if s.twice() <= 4 {
            let c = ctx.clone();
            p.at_most(format!("ybe.mixed.half-half-{s}"), anchor::YBE, tol_for::<B>(1e-10), move || {
                let hh = lop_substituted_r(Spin::HALF, Variant::Plus, Basis::Integral, &c)?;
                let hs = lop_substituted_r(s, Variant::Plus, Basis::Integral, &c)?;
                single(anchor::YBE, verify_ybe_mixed(&hh.matrix, &hs.matrix, &hs.matrix, &c)?)
            });
        }
    }
    let c = ctx;
    p.negative(format!("ybe.negative.n{n}"), anchor::YBE, move || {
        let mut r = fundamental_r(n, Variant::Plus, &c)?;
        r.matrix = perturbed(&r.matrix, 1, 0, &delta(&c));
        single(anchor::YBE, verify_ybe(&r, &c)?)
    });
}

struct Model<B: Backend> {
    model: ModelSpace<B>,
    lp: LOperator<B::Elem>,
    lm: LOperator<B::Elem>,
    rp: RMatrix<B::Elem>,
    rm: RMatrix<B::Elem>,
}

fn model<B: Backend>(cfg: &SuiteConfig, ctx: B) -> Shared<Model<B>> {
    let (d, g) = (cfg.degree, cfg.gamma);
    Shared::new(move || {
        let model = ModelSpace::new(d, g, &ctx)?;
        Ok(Model {
            lp: build_l(&model, Variant::Plus)?,
            lm: build_l(&model, Variant::Minus)?,
            rp: fundamental_r(2, Variant::Plus, &ctx)?,
            rm: fundamental_r(2, Variant::Minus, &ctx)?,
            model,
        })
    })
}

fn rll<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let m = model(cfg, ctx.clone());
    for part in ["plus-plus", "minus-minus", "plus-mixed"] {
        let m = m.clone();
        p.at_most(format!("rll.{part}"), anchor::RLL, tol_for::<B>(1e-11), move || {
            let m = m.get()?;
            let res = verify_rll_all(&m.rp, &m.rm, &m.lp, &m.lm, m.model.ctx())?;
            single(anchor::RLL, res.part(part).expect("known part"))
        });
    }
    p.negative("rll.negative", anchor::RLL, move || {
        let m = m.get()?;
        let mut lp = m.lp.clone();
        *lp.ops.get_mut(0, 0).entry_mut(0, 0) += &delta(&ctx);
        verify_rll_all(&m.rp, &m.rm, &lp, &m.lm, &ctx)
    });
}

fn reflection<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let m = model(cfg, ctx.clone());
    let m2 = m.clone();
    p.at_most("reflection", anchor::REFLECTION, tol_for::<B>(1e-10), move || {
        let m = m2.get()?;
        single(anchor::REFLECTION, verify_reflection(&m.lp, &m.lm, &m.rp, &m.rm, m.model.ctx())?)
    });
    p.negative("reflection.negative", anchor::REFLECTION, move || {
        let m = m.get()?;
        let mut lp = m.lp.clone();
        *lp.ops.get_mut(0, 1).entry_mut(0, 0) += &delta(&ctx);
        single(anchor::REFLECTION, verify_reflection(&lp, &m.lm, &m.rp, &m.rm, &ctx)?)
    });
}

fn crossing<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let n = cfg.n;
    for v in [Variant::Plus, Variant::Minus] {
        // One-leg crossing needs V* ≅ V, true for sl(2) only.
        let c = ctx.clone();
        let id = format!("crossing.weyl.n{n}.{v}");
        let one_leg = move || {
            let w = weyl_matrix(&RepLabel::Fundamental(n), &c)?;
            verify_crossing(&fundamental_r(n, v, &c)?, &w, &w, Crossing::Weyl, &c)
        };
        if n == 2 {
            p.at_most(id, anchor::WEYL, tol_for::<B>(1e-12), one_leg);
        } else {
            p.info(id, anchor::WEYL, tol_for::<B>(1e-12), one_leg);
        }
        let c = ctx.clone();
        p.at_most(format!("crossing.weyl-both-legs.n{n}.{v}"), anchor::WEYL_BOTH, tol_for::<B>(1e-12), move || {
            let w = weyl_matrix(&RepLabel::Fundamental(n), &c)?;
            single(anchor::WEYL_BOTH, verify_both_legs(&fundamental_r(n, v, &c)?, &w, &c)?)
        });
        let c = ctx.clone();
        p.info(format!("crossing.chi.n{n}.{v}"), anchor::CHI, tol_for::<B>(1e-12), move || {
            let chi = chi_matrix(n);
            verify_crossing(&fundamental_r(n, v, &c)?, &chi, &chi, Crossing::Chi, &c)
        });
        let c = ctx.clone();
        p.at_most(format!("crossing.chi-both-legs.n{n}.{v}"), anchor::CHI_BOTH, tol_for::<B>(1e-12), move || {
            single(anchor::CHI_BOTH, verify_both_legs(&fundamental_r(n, v, &c)?, &chi_matrix(n), &c)?)
        });
        let c = ctx.clone();
        p.at_most(format!("crossing.weyl.half-half.{v}"), anchor::WEYL, tol_for::<B>(1e-12), move || {
            let w = weyl_matrix(&RepLabel::Spin(Spin::HALF), &c)?;
            let r = lop_substituted_r(Spin::HALF, v, Basis::Unitary, &c)?;
            verify_crossing(&r, &w, &w, Crossing::Weyl, &c)
        });
        let c = ctx.clone();
        p.info(format!("crossing.literal.half-half.{v}"), anchor::LITERAL, tol_for::<B>(1e-12), move || {
            let w = weyl_matrix(&RepLabel::Spin(Spin::HALF), &c)?;
            let r = lop_substituted_r(Spin::HALF, v, Basis::Unitary, &c)?;
            verify_crossing_literal(&r, &w, &w, &c)
        });
    }
    let c = ctx.clone();
    p.at_most(format!("crossing.wew.n{n}"), anchor::WEW, tol_for::<B>(1e-12), move || {
        single(anchor::WEW, verify_wew(n, &c)?)
    });
    // The two-leg form never inverts R, so the perturbation stays exact.
    p.negative(format!("crossing.negative.n{n}"), anchor::WEYL_BOTH, move || {
        let w = weyl_matrix(&RepLabel::Fundamental(n), &ctx)?;
        let mut r = fundamental_r(n, Variant::Plus, &ctx)?;
        r.matrix = perturbed(&r.matrix, 0, 1, &delta(&ctx));
        single(anchor::WEYL_BOTH, verify_both_legs(&r, &w, &ctx)?)
    });
}

fn normalizer<B: Backend>(cfg: &SuiteConfig) -> Normalizer {
    cfg.normalizer.unwrap_or_else(default_normalizer::<B>)
}

fn w_half<B: Backend>(m: &Shared<Model<B>>, f: Normalizer) -> Shared<GeneratingMatrix<B::Elem>> {
    let m = m.clone();
    Shared::new(move || build_w_half(&m.get()?.model, f))
}

fn u_tilde<B: Backend>(w: &Shared<GeneratingMatrix<B::Elem>>, ctx: B) -> Shared<GeneratingMatrix<B::Elem>> {
    let w = w.clone();
    Shared::new(move || convert_contra_to_co(&*w.get()?, &weyl_matrix(&RepLabel::Spin(Spin::HALF), &ctx)?))
}

/// Perturb one entry that the margin-restricted relation can see.
fn poke<B: Backend>(g: &GeneratingMatrix<B::Elem>, i: usize, j: usize, ctx: &B) -> GeneratingMatrix<B::Elem> {
    g.perturbed(i, j, 0, 0, &delta(ctx))
}

fn contravariant<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let m = model(cfg, ctx.clone());
    let f = normalizer::<B>(cfg);
    let w = w_half(&m, f);
    let (m1, w1) = (m.clone(), w.clone());
    p.at_most("contravariant.relation", anchor::CONTRA, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        verify_contravariant(&*w1.get()?, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
    let (m1, w1, c) = (m.clone(), w.clone(), ctx.clone());
    p.at_most("contravariant.components", anchor::CONTRA_COMP, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        component_residual(&*w1.get()?, &fundamental_rep(2, &c)?, &m.model)
    });
    let m1 = m.clone();
    p.info("contravariant.uncorrected", anchor::CONTRA_PRINTED, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        let printed = build_w_half_printed(&m.model, f)?;
        verify_contravariant(&printed, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
    p.negative("contravariant.negative", anchor::CONTRA, move || {
        let m = m.get()?;
        let bad = poke(&*w.get()?, 1, 0, &ctx);
        verify_contravariant(&bad, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
}

fn covariant<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let m = model(cfg, ctx.clone());
    let f = normalizer::<B>(cfg);
    let w = w_half(&m, f);
    let u = u_tilde(&w, ctx.clone());
    let (m1, u1) = (m.clone(), u.clone());
    p.at_most("covariant.relation", anchor::CO, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        verify_covariant(&*u1.get()?, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
    for row in 0..2 {
        let (m1, u1) = (m.clone(), u.clone());
        p.at_most(format!("covariant.row{row}"), anchor::CO_ROW, tol_for::<B>(1e-9), move || {
            let m = m1.get()?;
            verify_covariant(&u1.get()?.select_rows(&[row]), &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
        });
    }
    let (m1, u1, c) = (m.clone(), u.clone(), ctx.clone());
    p.at_most("covariant.components", anchor::CO_COMP, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        component_residual(&*u1.get()?, &fundamental_rep(2, &c)?, &m.model)
    });
    let (m1, u1) = (m.clone(), u.clone());
    p.info("covariant.hat.u", anchor::HAT, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        verify_hat(&chi_transform(&*u1.get()?)?, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
    let (m1, w1) = (m.clone(), w.clone());
    p.info("covariant.hat.w", anchor::HAT, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        verify_hat(&chi_transform(&*w1.get()?)?, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
    p.negative("covariant.negative", anchor::CO, move || {
        let m = m.get()?;
        let bad = poke(&*u.get()?, 0, 0, &ctx);
        verify_covariant(&bad, &m.lp, &m.lm, &m.rp, &m.rm, &m.model)
    });
}

fn scalar_checks<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let m = model(cfg, ctx.clone());
    let w = w_half(&m, normalizer::<B>(cfg));
    let u = u_tilde(&w, ctx.clone());
    let (m1, w1, u1) = (m.clone(), w.clone(), u.clone());
    p.at_most("scalars.invariance", anchor::SCALARS, tol_for::<B>(1e-9), move || {
        Ok(scalars(&*u1.get()?, &*w1.get()?, &m1.get()?.model)?.1)
    });
    let (m1, w1, u1) = (m.clone(), w.clone(), u.clone());
    p.at_most("scalars.l-operators", anchor::SCALAR_L, tol_for::<B>(1e-9), move || {
        let m = m1.get()?;
        let (z, _) = scalars(&*u1.get()?, &*w1.get()?, &m.model)?;
        let a = verify_scalar_matrix(&z, &m.lp, 2, &m.model)?;
        let b = verify_scalar_matrix(&z, &m.lm, 2, &m.model)?;
        Ok(Residual::worst(anchor::SCALAR_L, vec![("plus".into(), a), ("minus".into(), b)]))
    });
    p.negative("scalars.negative", anchor::SCALARS, move || {
        let bad = poke(&*w.get()?, 0, 1, &ctx);
        Ok(scalars(&*u.get()?, &bad, &m.get()?.model)?.1)
    });
}

fn hecke<B: Backend>(n: usize, ctx: &B) -> Result<ProjectorPair<B::Elem>> {
    let r = fundamental_r(n, Variant::Plus, ctx)?;
    let rhat = &RingMatrix::swap(n, n) * &r.matrix;
    hecke_projectors(&rhat, n, ctx)
}

fn invariants<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) {
    let n = cfg.n;
    let c = ctx.clone();
    p.at_most(format!("invariants.hecke-rank.n{n}"), anchor::HECKE_RANK, 0.0, move || {
        let (pp, pm) = hecke(n, &c)?;
        let (a, b) = (pp.rank(&c)?, pm.rank(&c)?);
        let want = (n * (n + 1) / 2, n * (n - 1) / 2);
        let v = a.abs_diff(want.0) + b.abs_diff(want.1);
        Ok(Residual::worst(anchor::HECKE_RANK, vec![(format!("rank+={a}"), v as f64), (format!("rank-={b}"), 0.0)]))
    });
    let c = ctx.clone();
    p.at_most(format!("invariants.hecke-idempotent.n{n}"), anchor::HECKE_IDEM, tol_for::<B>(1e-10), move || {
        let (pp, pm) = hecke(n, &c)?;
        let zero = RingMatrix::zeros(n * n, n * n);
        let sum = &pp.numer.scale(&pm.denom) + &pm.numer.scale(&pp.denom);
        let id = RingMatrix::identity(n * n).scale(&pp.denom.mul_ref(&pm.denom));
        Ok(Residual::worst(
            anchor::HECKE_IDEM,
            vec![
                ("P+ idempotent".into(), residual_norm(&pp.idempotence_defect(), &zero, &c)?),
                ("P- idempotent".into(), residual_norm(&pm.idempotence_defect(), &zero, &c)?),
                ("P+ P- = 0".into(), residual_norm(&(&pp.numer * &pm.numer), &zero, &c)?),
                ("P+ + P- = 1".into(), residual_norm(&sum, &id, &c)?),
            ],
        ))
    });
    let m = model(cfg, ctx.clone());
    let w = w_half(&m, normalizer::<B>(cfg));
    let u = u_tilde(&w, ctx.clone());
    for (name, g) in [("u", u.clone()), ("w", w.clone())] {
        let (m1, c) = (m.clone(), ctx.clone());
        p.at_most(format!("invariants.qdet.{name}"), anchor::QDET, tol_for::<B>(1e-8), move || {
            let m = m1.get()?;
            let g = g.get()?;
            let (_, pm) = hecke(2, &c)?;
            let f = RingMatrix::identity(m.model.dim());
            Ok(invariant_qdet(&g, &g, &f, &pm, &m.model)?.1)
        });
    }
    p.negative("invariants.qdet.symmetrizer-control", anchor::QDET_PLUS, move || {
        let m = m.get()?;
        let g = u.get()?;
        let (pp, _) = hecke(2, &ctx)?;
        let f = RingMatrix::identity(m.model.dim());
        Ok(invariant_qdet(&g, &g, &f, &pp, &m.model)?.1)
    });
}

struct Fused {
    model: ModelSpace<Numeric>,
    lp: LOperator<Complex64>,
    lm: LOperator<Complex64>,
    w: GeneratingMatrix<Complex64>,
    p_plus: Projector<Complex64>,
    image: ImageBasis,
    rp: RMatrix<Complex64>,
    rm: RMatrix<Complex64>,
}

fn fused_setup(cfg: &SuiteConfig) -> Result<Shared<Fused>> {
    let ctx = cfg.numeric()?;
    let (d, g) = (cfg.degree, cfg.gamma);
    let f = cfg.normalizer.unwrap_or(Normalizer::InverseSqrtQnum);
    Ok(Shared::new(move || {
        let model = ModelSpace::new(d, g, &ctx)?;
        let half = spin_rep(Spin::HALF, Basis::Unitary, &ctx)?;
        let pair = coproduct_rep(&half, &half, &ctx)?;
        let (p_plus, _) = hecke(2, &ctx)?;
        let image = ImageBasis::weight_adapted(&p_plus.matrix().ok_or(Error::Singular)?, &pair.half_weights[0])?;
        let rp2 = fundamental_r(2, Variant::Plus, &ctx)?;
        let rm2 = fundamental_r(2, Variant::Minus, &ctx)?;
        Ok(Fused {
            lp: build_l(&model, Variant::Plus)?,
            lm: build_l(&model, Variant::Minus)?,
            w: build_w_half(&model, f)?,
            rp: fuse_r(&rp2, &rp2, &p_plus, &image, RepLabel::Fused(Spin::ONE))?,
            rm: fuse_r(&rm2, &rm2, &p_plus, &image, RepLabel::Fused(Spin::ONE))?,
            p_plus,
            image,
            model,
        })
    }))
}

fn fusion<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) -> Result<()> {
    let num = cfg.numeric()?;
    for v in [Variant::Plus, Variant::Minus] {
        let c = ctx.clone();
        p.at_most(format!("fusion.commutation.n2.{v}"), anchor::FUSION_COMM, tol_for::<B>(1e-10), move || {
            let (pp, pm) = hecke(2, &c)?;
            let r = fundamental_r(2, v, &c)?;
            Ok(Residual::worst(
                anchor::FUSION_COMM,
                vec![
                    ("P+".into(), verify_fusion_commutation(&pp, &r, &r, &c)?),
                    ("P-".into(), verify_fusion_commutation(&pm, &r, &r, &c)?),
                ],
            ))
        });
    }
    let fz = fused_setup(cfg)?;
    for v in [Variant::Plus, Variant::Minus] {
        let (fz, c) = (fz.clone(), num);
        p.at_most(format!("fusion.r-matrix.spin-1.{v}"), anchor::FUSED_R, 1e-10, move || {
            let fz = fz.get()?;
            let fused = if v == Variant::Plus { &fz.rp } else { &fz.rm };
            let reference = lop_substituted_r(Spin::ONE, v, Basis::Unitary, &c)?;
            let (normed, _) = fused.normalized_against(&reference.matrix, &c)?;
            single(anchor::FUSED_R, residual_norm(&normed.matrix, &reference.matrix, &c)?)
        });
    }
    for (name, power) in [("identity", 0), ("q-spin", 1)] {
        let fz = fz.clone();
        p.at_most(format!("fusion.generating.{name}"), anchor::FUSED_G, 1e-8, move || {
            let fz = fz.get()?;
            let f = q_spin_factor(&fz.model, Rational64::from_integer(power))?;
            let g = fuse_generating(&fz.w, &fz.w, &fz.p_plus, &fz.image, &f, RepLabel::Fused(Spin::ONE), &fz.model)?;
            verify_contravariant(&g, &fz.lp, &fz.lm, &fz.rp, &fz.rm, &fz.model)
        });
    }
    let fz2 = fz.clone();
    p.at_most("fusion.generating.covariant", anchor::FUSED_G, 1e-8, move || {
        let fz = fz2.get()?;
        let u = convert_contra_to_co(&fz.w, &weyl_matrix(&RepLabel::Spin(Spin::HALF), &num)?)?;
        let f = RingMatrix::identity(fz.model.dim());
        let g = fuse_generating(&u, &u, &fz.p_plus, &fz.image, &f, RepLabel::Fused(Spin::ONE), &fz.model)?;
        verify_covariant(&g, &fz.lp, &fz.lm, &fz.rp, &fz.rm, &fz.model)
    });
    p.negative("fusion.negative", anchor::FUSED_G, move || {
        let fz = fz.get()?;
        let f = RingMatrix::identity(fz.model.dim());
        let g = fuse_generating(&fz.w, &fz.w, &fz.p_plus, &fz.image, &f, RepLabel::Fused(Spin::ONE), &fz.model)?;
        let bad = poke(&g, 0, 1, &num);
        verify_contravariant(&bad, &fz.lp, &fz.lm, &fz.rp, &fz.rm, &fz.model)
    });
    Ok(())
}

fn spin_pairs(cfg: &SuiteConfig) -> Vec<(Spin, Spin)> {
    let mut out = Vec::new();
    for (i, &a) in cfg.spins.iter().enumerate() {
        for &b in &cfg.spins[i..] {
            out.push((a, b));
        }
    }
    out
}

fn wigner_eckart<B: Backend>(p: &mut Plan, cfg: &SuiteConfig, ctx: B) -> Result<()> {
    let num = cfg.numeric()?;
    let d = cfg.degree;
    let f = cfg.normalizer.unwrap_or(Normalizer::InverseSqrtQnum);
    let max_j = Spin((d.saturating_sub(1)).min(8) as u32);
    let setup = Shared::new(move || {
        let model = ModelSpace::new(d, Rational64::zero(), &num)?;
        let w = build_w_half(&model, f)?;
        let u = convert_contra_to_co(&w, &weyl_matrix(&RepLabel::Spin(Spin::HALF), &num)?)?;
        Ok((model, w, u))
    });
    for (name, k) in [("w-col0", 0), ("w-col1", 1), ("u-row0", 2), ("u-row1", 3)] {
        let setup = setup.clone();
        p.at_most(format!("wigner-eckart.{name}"), anchor::WE, 1e-7, move || {
            let s = setup.get()?;
            let (model, w, u) = (&s.0, &s.1, &s.2);
            let g = if k < 2 { w } else { u };
            let comps = components(g, k % 2, &num)?;
            let blocks = wigner_eckart_scan(&comps, Spin::HALF, max_j, model)?;
            let dev = blocks.iter().map(|b| b.deviation).fold(0.0, f64::max);
            let zero = blocks.iter().filter(|b| b.structurally_zero).count();
            Ok(Residual::worst(
                anchor::WE,
                vec![
                    ("max deviation".into(), dev),
                    (format!("{} blocks, {zero} structurally zero", blocks.len()), 0.0),
                ],
            ))
        });
    }
    for (a, b) in spin_pairs(cfg) {
        p.at_most(format!("wigner-eckart.cg-intertwiner.{a}x{b}"), anchor::CG_T4, 1e-11, move || {
            let mut parts = Vec::new();
            for j in Spin::channels(a, b) {
                parts.push((format!("j={j}"), verify_intertwiner(&build_cg(a, b, j, &num)?, &num)?.value));
            }
            Ok(Residual::worst(anchor::CG_T4, parts))
        });
        p.at_most(format!("wigner-eckart.cg-completeness.{a}x{b}"), anchor::CG_T5, 1e-11, move || {
            verify_completeness(a, b, &num)
        });
        p.at_most(format!("wigner-eckart.cg-fusion.{a}x{b}"), anchor::CG_T6, 1e-10, move || {
            let mut parts = Vec::new();
            for j in Spin::channels(a, b) {
                let cg = build_cg(a, b, j, &num)?;
                for v in [Variant::Plus, Variant::Minus] {
                    parts.push((format!("j={j} {v}"), verify_cg_fusion_lop(&cg, v, &num)?.value));
                }
            }
            Ok(Residual::worst(anchor::CG_T6, parts))
        });
    }
    let kmax = cfg.spins.iter().map(|s| s.twice()).max().unwrap_or(1).min(d as u32);
    let (dg, g) = (cfg.degree, cfg.gamma);
    let c = ctx;
    p.at_most("wigner-eckart.basis-action", anchor::BASIS, tol_for::<B>(1e-10), move || {
        let model = ModelSpace::new(dg, g, &c)?;
        let mut parts = Vec::new();
        for v in [Variant::Plus, Variant::Minus] {
            let l = build_l(&model, v)?;
            for t in 0..=kmax {
                let k = Spin(t);
                let r = lop_substituted_r(k, v, Basis::Integral, &c)?;
                parts.push((format!("{k} {v}"), basis_action_check(&model, &l, &r, k, Basis::Integral)?));
            }
        }
        Ok(Residual::worst(anchor::BASIS, parts))
    });
    p.negative("wigner-eckart.negative", anchor::CG_T4, move || {
        let mut cg = build_cg(Spin::HALF, Spin::HALF, Spin::ONE, &num)?;
        *cg.c.entry_mut(0, 0) += Complex64::new(PERTURBATION, 0.0);
        verify_intertwiner(&cg, &num)
    });
    Ok(())
}

fn classical(p: &mut Plan, cfg: &SuiteConfig) -> Result<()> {
    let d = cfg.degree;
    for v in [Variant::Plus, Variant::Minus] {
        let setup = Shared::new(move || q_derivative_limit(|c| Ok(fundamental_r(2, v, c)?.matrix), 1e-6));
        for (name, tol) in [("plain", 1e-5), ("richardson", 1e-9)] {
            let setup = setup.clone();
            p.at_most(format!("classical.derivative.{v}.{name}"), anchor::CL_DERIV, tol, move || {
                let lim = setup.get()?;
                let num = Numeric::default();
                let r = classical_r_sl2(Spin::HALF, Spin::HALF, v, &num);
                let m = if name == "plain" { &lim.plain } else { &lim.richardson };
                single(anchor::CL_DERIV, residual_norm(m, &r.matrix, &num)?)
            });
        }
    }
    // everything below is over the rationals
    let ex = Exact::new();
    let setup = Shared::new(move || {
        let model = ModelSpace::new(d, Rational64::zero(), &ex)?;
        let w = build_classical_w_half(&model, Normalizer::Identity)?;
        let u = classical_covariant(&w, &ex)?;
        let lp = classical_l(&model, Spin::HALF, Variant::Plus)?;
        let lm = classical_l(&model, Spin::HALF, Variant::Minus)?;
        let rp = classical_r_sl2(Spin::HALF, Spin::HALF, Variant::Plus, &ex);
        let rm = classical_r_sl2(Spin::HALF, Spin::HALF, Variant::Minus, &ex);
        Ok((model, w, u, lp, lm, rp, rm))
    });
    for (name, cov) in [("contravariant", false), ("covariant", true)] {
        let s = setup.clone();
        p.at_most(format!("classical.{name}"), anchor::CL_REL, 0.0, move || {
            let s = s.get()?;
            let g = if cov { &s.2 } else { &s.1 };
            verify_classical_generating(g, &s.3, &s.4, &s.5, &s.6, &s.0)
        });
        let s = setup.clone();
        p.at_most(format!("classical.{name}.components"), anchor::CL_COMP, 0.0, move || {
            let s = s.get()?;
            classical_component_residual(if cov { &s.2 } else { &s.1 }, &s.0)
        });
    }
    let s = setup.clone();
    p.at_most("classical.casimir", anchor::CL_CASIMIR, 0.0, move || {
        let s = s.get()?;
        verify_classical_casimir(&s.1, &s.3, &s.4, &s.5, &s.6, &s.0)
    });
    let s = setup.clone();
    p.at_most("classical.realization", anchor::CL_REAL, 0.0, move || {
        let s = s.get()?;
        single(anchor::CL_REAL, realization_defect(&classical_ops(&s.0), &ex)?)
    });
    for v in [Variant::Plus, Variant::Minus] {
        p.at_most(format!("classical.cybe.{v}"), anchor::CYBE, 0.0, move || {
            single(anchor::CYBE, verify_cybe(&classical_r_sl2(Spin::HALF, Spin::HALF, v, &ex), &ex)?)
        });
    }
    for &s in &cfg.spins {
        p.at_most(format!("classical.crossing.weyl.half-{s}"), anchor::CL_WEYL, 0.0, move || {
            classical_crossing(&classical_r_sl2(Spin::HALF, s, Variant::Plus, &ex), true, &ex)
        });
        p.info(format!("classical.crossing.chi.half-{s}"), anchor::CL_CHI, 0.0, move || {
            classical_crossing(&classical_r_sl2(Spin::HALF, s, Variant::Plus, &ex), false, &ex)
        });
    }
    let dl = d.min(4);
    p.at_most(format!("classical.w-limit.D{dl}"), anchor::CL_W, 1e-5, move || {
        single(anchor::CL_W, w_half_limit_deviation(dl, 1e-6)?)
    });
    p.negative("classical.negative", anchor::CL_REL, move || {
        let s = setup.get()?;
        let bad = s.1.perturbed(1, 1, 0, 0, &ex.rational(Rational64::new(1, 1000)));
        verify_classical_generating(&bad, &s.3, &s.4, &s.5, &s.6, &s.0)
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        c.validate().unwrap();
        c.tol = Some(-1.0);
        assert!(c.validate().is_err());
        let c = SuiteConfig { degree: 3, spins: vec![Spin(4)], ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn shared_error_reaches_every_job() {
        let s: Shared<u32> = Shared::new(|| Err(Error::Singular));
        assert!(matches!(s.get(), Err(Error::Construction(_))));
        assert!(s.clone().get().is_err());
    }
}
