//! Run configuration: defaults, then the `QTOP_CONFIG` file, then flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_rational::Rational64;
use qtop_core::rep::{Normalizer, Spin};
use qtop_core::suite::SuiteConfig;
use qtop_core::BackendKind;
use serde::Deserialize;

pub const CONFIG_ENV: &str = "QTOP_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// exact or numeric
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Deformation parameter, real and > 1
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Rank of sl(n)
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Spins as fractions, repeat or separate with commas
    #[arg(long = "spin", global = true, value_delimiter = ',')]
    pub spin: Vec<String>,
    /// Model space degree
    #[arg(long = "D", global = true)]
    pub degree: Option<usize>,
    /// Weight shift of the model space, a multiple of 1/2
    #[arg(long, global = true)]
    pub gamma: Option<String>,
    /// identity, inverse-qnum or inverse-sqrt-qnum
    #[arg(long, global = true)]
    pub normalizer: Option<String>,
    /// Overrides the built-in tolerance of every check
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for `verify`; 0 means one per core
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Include per-check wall-clock times in the report
    #[arg(long, global = true)]
    pub timing: bool,
}

/// Keys accepted in the config file. Same meaning as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<String>,
    pub q: Option<f64>,
    pub n: Option<usize>,
    pub spins: Option<Vec<String>>,
    #[serde(rename = "D", alias = "degree")]
    pub degree: Option<usize>,
    pub gamma: Option<String>,
    pub normalizer: Option<String>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
    pub timing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    /// True when spins came from a flag or the file rather than defaults.
    pub spins_given: bool,
    pub format: Format,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

fn parse_gamma(s: &str) -> Result<Rational64, String> {
    // Spin parsing already accepts integers and n/d fractions.
    s.parse::<Spin>()
        .map(|g| Rational64::new(g.twice() as i64, 2))
        .map_err(|_| format!("gamma '{s}' is not a non-negative multiple of 1/2"))
}

fn parse_spins(list: &[String]) -> Result<Vec<Spin>, String> {
    list.iter().map(|s| s.parse::<Spin>().map_err(|e| e.to_string())).collect()
}

/// Layer flags over the file over defaults. Errors are usage errors.
pub fn resolve(flags: &Flags, file: Option<FileConfig>) -> Result<RunConfig, String> {
    let file = file.unwrap_or_default();
    let mut cfg = SuiteConfig::default();

    if let Some(b) = flags.backend.as_ref().or(file.backend.as_ref()) {
        cfg.backend = b.parse::<BackendKind>().map_err(|e| e.to_string())?;
    }
    if let Some(q) = flags.q.or(file.q) {
        cfg.q = q;
    }
    if let Some(n) = flags.n.or(file.n) {
        cfg.n = n;
    }
    let spins_given = !flags.spin.is_empty() || file.spins.is_some();
    if !flags.spin.is_empty() {
        cfg.spins = parse_spins(&flags.spin)?;
    } else if let Some(s) = &file.spins {
        cfg.spins = parse_spins(s)?;
    }
    if let Some(d) = flags.degree.or(file.degree) {
        cfg.degree = d;
    }
    if let Some(g) = flags.gamma.as_ref().or(file.gamma.as_ref()) {
        cfg.gamma = parse_gamma(g)?;
    }
    if let Some(f) = flags.normalizer.as_ref().or(file.normalizer.as_ref()) {
        cfg.normalizer = Some(f.parse::<Normalizer>().map_err(|e| e.to_string())?);
    }
    cfg.tol = flags.tol.or(file.tol);
    cfg.validate().map_err(|e| e.to_string())?;

    Ok(RunConfig {
        suite: cfg,
        spins_given,
        format: flags.format.or(file.format).unwrap_or(Format::Json),
        workers: flags.workers.or(file.workers).unwrap_or(0),
        out: flags.out.clone(),
        timing: flags.timing || file.timing.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file: FileConfig = toml::from_str("q = 1.5\nD = 8\nbackend = \"exact\"").unwrap();
        let flags = Flags { q: Some(1.3), ..Flags::default() };
        let cfg = resolve(&flags, Some(file)).unwrap();
        assert_eq!(cfg.suite.q, 1.3);
        assert_eq!(cfg.suite.degree, 8);
        assert_eq!(cfg.suite.backend, BackendKind::Exact);
        assert_eq!(cfg.suite.n, 2);
        assert!(!cfg.spins_given);
    }

    #[test]
    fn rejects_bad_values() {
        for flags in [
            Flags { q: Some(0.5), ..Flags::default() },
            Flags { tol: Some(-1.0), ..Flags::default() },
            Flags { gamma: Some("1/3".into()), ..Flags::default() },
            Flags { spin: vec!["2".into()], degree: Some(3), ..Flags::default() },
            Flags { backend: Some("float".into()), ..Flags::default() },
        ] {
            assert!(resolve(&flags, None).is_err(), "{flags:?}");
        }
    }

    #[test]
    fn unknown_file_keys_are_errors() {
        assert!(toml::from_str::<FileConfig>("qq = 1.0").is_err());
    }

    #[test]
    fn gamma_forms() {
        assert_eq!(parse_gamma("1/2").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_gamma("1").unwrap(), Rational64::from_integer(1));
    }
}
