mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use qtop_core::classical::classical_r_sl2;
use qtop_core::rep::{Basis, ModelSpace, RepLabel, Spin};
use qtop_core::report::Report;
use qtop_core::rmatrix::{build_l, fundamental_r, lop_substituted_r, universal_r_sl2, Variant};
use qtop_core::suite::{jobs, Suite};
use qtop_core::tensorop::{build_w_half, convert_contra_to_co, default_normalizer, weyl_matrix};
use qtop_core::wigner::{build_cg, cgc_table};
use qtop_core::{Backend, BackendKind, Error, Exact, Numeric};

use config::{FileConfig, Flags, Format, RunConfig, CONFIG_ENV};

#[derive(Parser, Debug)]
#[command(name = "qtop", version, about = "R-matrices and q-tensor operators for U_q(sl(n))")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build one object and print it
    Construct(ConstructArgs),
    /// Run a verification suite
    Verify {
        /// ybe, rll, reflection, crossing, covariant, contravariant, scalars,
        /// fusion, invariants, wigner-eckart, classical or all
        suite: String,
    },
    /// Clebsch-Gordan coefficients next to the ratios read off tensor operators
    CgcTable {
        #[arg(long)]
        j1: String,
        #[arg(long)]
        j2: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Rmatrix,
    Lop,
    Wgen,
    Weyl,
    Cg,
    ClassicalR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Fundamental,
    Lop,
    Universal,
}

#[derive(clap::Args, Debug)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value = "plus")]
    variant: String,
    /// How to build an R-matrix; the default is the closed form
    #[arg(long, value_enum, default_value = "fundamental")]
    route: RouteArg,
    /// Build the covariant matrix instead of the contravariant one
    #[arg(long)]
    covariant: bool,
    #[arg(long)]
    j1: Option<String>,
    #[arg(long)]
    j2: Option<String>,
    #[arg(long)]
    j: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Construction(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Construction(_) | Failure::Io(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Construction(m) => ("construction", m),
            Failure::Io(m) => ("io", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.code() } })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(_) | Error::NumericOnly(_) | Error::NotRepresentable(_) | Error::MarginExhausted { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Construction(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::Usage(e.to_string().trim_end().to_string())),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(f),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.code())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => Some(FileConfig::load(p.as_ref()).map_err(Failure::Usage)?),
        _ => None,
    };
    let cfg = config::resolve(&cli.flags, file).map_err(Failure::Usage)?;
    match cli.command {
        Command::Construct(args) => {
            let value = match cfg.suite.backend {
                BackendKind::Exact => {
                    construct(&args, &cfg, Exact { root: 2 * cfg.suite.n as u32, q_eval: cfg.suite.q })?
                }
                BackendKind::Numeric => construct(&args, &cfg, Numeric::new(cfg.suite.q)?)?,
            };
            emit(&cfg, &pretty(&value), || pretty(&value))?;
            Ok(0)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let report = verify(suite, &cfg)?;
            let json = pretty(&report.to_json(cfg.timing));
            emit(&cfg, &json, || report.to_text(cfg.timing))?;
            Ok(if report.all_pass() {
                0
            } else if report.any_errored() {
                3
            } else {
                1
            })
        }
        Command::CgcTable { j1, j2 } => {
            let j1: Spin = j1.parse()?;
            let j2: Spin = j2.parse()?;
            if j1.twice() > 8 || j2.twice() > 8 {
                return Err(Failure::Usage("j1 and j2 must be at most 4".into()));
            }
            let table = cgc_table(j1, j2, cfg.suite.degree, &Numeric::new(cfg.suite.q)?)?;
            let value = serde_json::to_value(&table).map_err(|e| Failure::Io(e.to_string()))?;
            emit(&cfg, &pretty(&value), || table.to_text())?;
            Ok(0)
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values always serialize")
}

/// Write JSON or the text rendering to `--out` or stdout.
fn emit(cfg: &RunConfig, json: &str, text: impl FnOnce() -> String) -> Result<(), Failure> {
    let mut body = match cfg.format {
        Format::Json => json.to_string(),
        Format::Text => text(),
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().lock().write_all(body.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn verify(suite: Suite, cfg: &RunConfig) -> Result<Report, Failure> {
    let list = jobs(suite, &cfg.suite)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Failure::Construction(e.to_string()))?;
    let checks = pool.install(|| list.par_iter().map(|j| j.run()).collect());
    Ok(Report::new(checks, cfg.suite.to_json()))
}

fn first_spin(cfg: &RunConfig) -> Spin {
    cfg.suite.spins[0]
}

fn spin_arg(name: &str, v: &Option<String>) -> Result<Spin, Failure> {
    v.as_deref().ok_or_else(|| Failure::Usage(format!("--{name} is required")))?.parse::<Spin>().map_err(Failure::from)
}

fn construct<B: Backend>(args: &ConstructArgs, cfg: &RunConfig, ctx: B) -> Result<Value, Failure> {
    let backend = match cfg.suite.backend {
        BackendKind::Exact => "exact",
        BackendKind::Numeric => "numeric",
    };
    let variant: Variant = args.variant.parse()?;
    let sc = &cfg.suite;
    let value = match args.kind {
        Kind::Rmatrix => {
            let r = match args.route {
                RouteArg::Fundamental => fundamental_r(sc.n, variant, &ctx)?,
                RouteArg::Lop => lop_substituted_r(first_spin(cfg), variant, Basis::Integral, &ctx)?,
                RouteArg::Universal => {
                    if variant != Variant::Plus {
                        return Err(Failure::Usage("the universal series gives the plus R-matrix only".into()));
                    }
                    let half = qtop_core::rep::spin_rep(Spin::HALF, Basis::Integral, &ctx)?;
                    let other = qtop_core::rep::spin_rep(first_spin(cfg), Basis::Integral, &ctx)?;
                    universal_r_sl2(&half, &other, &ctx)?
                }
            };
            r.to_json(backend)
        }
        Kind::Lop => {
            let model = ModelSpace::new(sc.degree, sc.gamma, &ctx)?;
            build_l(&model, variant)?.to_json(backend)
        }
        Kind::Wgen => {
            let model = ModelSpace::new(sc.degree, sc.gamma, &ctx)?;
            let w = build_w_half(&model, sc.normalizer.unwrap_or_else(default_normalizer::<B>))?;
            if args.covariant {
                convert_contra_to_co(&w, &weyl_matrix(&RepLabel::Spin(Spin::HALF), &ctx)?)?.to_json(backend)
            } else {
                w.to_json(backend)
            }
        }
        Kind::Weyl => {
            let label = if cfg.spins_given { RepLabel::Spin(first_spin(cfg)) } else { RepLabel::Fundamental(sc.n) };
            json!({ "label": label.to_string(), "matrix": weyl_matrix(&label, &ctx)?.to_json(backend) })
        }
        Kind::Cg => {
            let (j1, j2, j) = (spin_arg("j1", &args.j1)?, spin_arg("j2", &args.j2)?, spin_arg("j", &args.j)?);
            if !Spin::channels(j1, j2).contains(&j) {
                return Err(Failure::Usage(format!("spin {j} does not occur in {j1} x {j2}")));
            }
            build_cg(j1, j2, j, &Numeric::new(sc.q)?)?.to_json()
        }
        Kind::ClassicalR => classical_r_sl2(Spin::HALF, first_spin(cfg), variant, &ctx).to_json(backend),
    };
    Ok(value)
}
