//! Verification results and the report format shared by the CLI and tests.

use serde::Serialize;

/// Outcome of one verification: the worst residual over its parts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub relation: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<(String, f64)>,
}

impl Residual {
    pub fn single(relation: impl Into<String>, value: f64) -> Self {
        Residual { relation: relation.into(), value, parts: Vec::new() }
    }

    pub fn worst(relation: impl Into<String>, parts: Vec<(String, f64)>) -> Self {
        let value = parts.iter().map(|p| p.1).fold(0.0, f64::max);
        Residual { relation: relation.into(), value, parts }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.value.is_finite() && self.value <= tol
    }

    pub fn part(&self, name: &str) -> Option<f64> {
        self.parts.iter().find(|p| p.0 == name).map(|p| p.1)
    }
}

/// How a check compares its residual with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    /// Pass when `residual <= tolerance`.
    AtMost,
    /// Negative control: pass when `residual >= tolerance`.
    AtLeast,
    /// Reported only; a relation known not to hold in the form checked.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub expect: Expect,
    pub pass: bool,
    /// The check could not be constructed.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub errored: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn evaluate(id: &str, anchor: &str, residual: f64, tolerance: f64, expect: Expect) -> Self {
        let pass = match expect {
            Expect::AtMost => residual.is_finite() && residual <= tolerance,
            Expect::AtLeast => residual.is_finite() && residual >= tolerance,
            Expect::Info => true,
        };
        Check {
            id: id.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            expect,
            pass,
            errored: false,
            wall_ms: None,
            detail: None,
        }
    }

    pub fn failed(id: &str, anchor: &str, tolerance: f64, why: String) -> Self {
        Check {
            id: id.into(),
            anchor: anchor.into(),
            residual: f64::INFINITY,
            tolerance,
            expect: Expect::AtMost,
            pass: false,
            errored: true,
            wall_ms: None,
            detail: Some(why),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub informational: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub config: serde_json::Value,
}

impl Report {
    /// Sorts by id so the output does not depend on completion order.
    pub fn new(mut checks: Vec<Check>, config: serde_json::Value) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let informational = checks.iter().filter(|c| c.expect == Expect::Info).count();
        let passed = checks.iter().filter(|c| c.pass && c.expect != Expect::Info).count();
        let failed = checks.len() - passed - informational;
        let summary = Summary { total: checks.len(), passed, failed, informational };
        Report { checks, summary, config }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn any_errored(&self) -> bool {
        self.checks.iter().any(|c| c.errored)
    }

    /// JSON without timings, so equal configs give byte-identical output.
    pub fn to_json(&self, with_timing: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !with_timing {
            if let Some(checks) = v.get_mut("checks").and_then(|c| c.as_array_mut()) {
                for c in checks {
                    if let Some(o) = c.as_object_mut() {
                        o.remove("wall_ms");
                    }
                }
            }
        }
        v
    }

    pub fn to_text(&self, with_timing: bool) -> String {
        let w = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let op = match c.expect {
                Expect::AtMost => "<=",
                Expect::AtLeast => ">=",
                Expect::Info => "~ ",
            };
            let tag = match (c.expect, c.pass) {
                (Expect::Info, _) => "INFO",
                (_, true) => "PASS",
                (_, false) => "FAIL",
            };
            out.push_str(&format!(
                "{} {:<w$}  {:>10.3e} {op} {:<8.1e} {}",
                tag, c.id, c.residual, c.tolerance, c.anchor,
            ));
            if let (true, Some(ms)) = (with_timing, c.wall_ms) {
                out.push_str(&format!("  [{ms:.1} ms]"));
            }
            if let Some(d) = &c.detail {
                out.push_str(&format!("\n     {d}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} informational\n",
            self.summary.passed, self.summary.failed, self.summary.informational
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_control_semantics() {
        assert!(Check::evaluate("a", "x", 1e-3, 1e-4, Expect::AtLeast).pass);
        assert!(!Check::evaluate("a", "x", 1e-6, 1e-4, Expect::AtLeast).pass);
        assert!(!Check::evaluate("a", "x", f64::NAN, 1.0, Expect::AtMost).pass);
    }

    #[test]
    fn report_sorts_by_id() {
        let r = Report::new(
            vec![
                Check::evaluate("b", "", 0.0, 1.0, Expect::AtMost),
                Check::evaluate("a", "", 2.0, 1.0, Expect::AtMost),
            ],
            serde_json::Value::Null,
        );
        assert_eq!(r.checks[0].id, "a");
        assert!(!r.all_pass());
    }
}
