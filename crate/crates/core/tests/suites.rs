use num_rational::Rational64;
use qtop_core::report::Expect;
use qtop_core::suite::{jobs, run, Suite, SuiteConfig};
use qtop_core::BackendKind;

#[test]
fn every_suite_passes_at_defaults() {
    let cfg = SuiteConfig::default();
    for s in Suite::EACH {
        let r = run(s, &cfg).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).map(|c| (&c.id, c.residual)).collect();
        assert!(failed.is_empty(), "{s}: {failed:?}");
        assert!(r.summary.passed > 0, "{s} ran no checks");
    }
}

#[test]
fn exact_backend_residuals_vanish() {
    let cfg = SuiteConfig { backend: BackendKind::Exact, gamma: Rational64::new(1, 2), ..SuiteConfig::default() };
    for s in [Suite::Ybe, Suite::Rll, Suite::Contravariant, Suite::Crossing] {
        let r = run(s, &cfg).unwrap();
        for c in r.checks.iter().filter(|c| c.expect == Expect::AtMost) {
            assert_eq!(c.residual, 0.0, "{}", c.id);
        }
        assert!(r.all_pass(), "{s}");
    }
}

#[test]
fn every_suite_has_a_negative_control() {
    let cfg = SuiteConfig::default();
    for s in Suite::EACH {
        let js = jobs(s, &cfg).unwrap();
        assert!(js.iter().any(|j| j.expect == Expect::AtLeast), "{s} has no negative control");
    }
}

#[test]
fn report_json_is_reproducible() {
    let cfg = SuiteConfig::default();
    let a = run(Suite::Scalars, &cfg).unwrap().to_json(false).to_string();
    let b = run(Suite::Scalars, &cfg).unwrap().to_json(false).to_string();
    assert_eq!(a, b);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let cfg = SuiteConfig { degree: 1, ..SuiteConfig::default() };
    assert!(jobs(Suite::All, &cfg).is_err());
}
