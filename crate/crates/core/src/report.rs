//! Verification report types shared by the counting and pipeline drivers.
//!
//! Reports serialize as {query, count, witnesses?, checks: [{name, pass,
//! details}]}. A failed check is a result, not an error; hard/soft
//! classification is decided by the experiment runner.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
    /// Soft checks involve configured constants and never gate exit status.
    #[serde(default)]
    pub soft: bool,
}

impl CheckResult {
    pub fn hard(name: &str, pass: bool, details: impl Into<String>) -> Self {
        Self { name: name.into(), pass, details: details.into(), soft: false }
    }

    pub fn soft(name: &str, pass: bool, details: impl Into<String>) -> Self {
        Self { name: name.into(), pass, details: details.into(), soft: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub query: serde_json::Value,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<serde_json::Value>,
}

impl VerificationReport {
    pub fn new(query: serde_json::Value, count: usize) -> Self {
        Self { query, count, bound: None, pass: true, checks: Vec::new(), witnesses: None }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// True when some non-soft check failed.
    pub fn hard_failure(&self) -> bool {
        self.checks.iter().any(|c| !c.pass && !c.soft)
    }
}
