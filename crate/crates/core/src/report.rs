//! Pass/fail reports shared by the verification suites.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub location: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report {
            suite: suite.into(),
            seed: None,
            checks: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        check: impl Into<String>,
        location: impl Into<String>,
        expected: impl ToString,
        actual: impl ToString,
    ) -> bool {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let pass = expected == actual;
        self.checks.push(Check {
            check: check.into(),
            location: location.into(),
            expected,
            actual,
            pass,
        });
        pass
    }

    /// Records a yes/no check.
    pub fn assert(&mut self, check: impl Into<String>, location: impl Into<String>, ok: bool) -> bool {
        self.push(check, location, true, ok)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {}", self.suite);
        if let Some(seed) = self.seed {
            let _ = write!(out, " (seed {seed})");
        }
        out.push('\n');
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status}  {}  [{}]", c.check, c.location);
            if !c.pass {
                let _ = write!(out, "  expected {}, got {}", c.expected, c.actual);
            }
            out.push('\n');
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}
