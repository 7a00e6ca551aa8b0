//! The structured report. Field names are part of the documented schema.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Zero verdict of a symbolic expression.
    Symbolic,
    /// A number compared with a tolerance.
    Numeric,
    /// A boolean outcome compared with an expectation.
    Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    pub fn symbolic(name: impl Into<String>, passed: bool, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Symbolic,
            passed,
            value: None,
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Numeric,
            passed: value <= tolerance,
            value: Some(value),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    pub fn verdict(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            kind: CheckKind::Verdict,
            passed,
            value: None,
            tolerance: None,
            detail: None,
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

/// A number reported as data: value, tolerance and whether it is within.
pub fn measured(value: f64, tolerance: f64, passed: bool) -> Value {
    serde_json::json!({ "value": value, "tolerance": tolerance, "passed": passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub name: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub data: Map<String, Value>,
    pub error: Option<String>,
    pub note: Option<String>,
}

impl BatteryReport {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: Status::Pass,
            checks: Vec::new(),
            data: Map::new(),
            error: None,
            note: None,
        }
    }

    pub fn skipped(name: &str, why: &str) -> Self {
        Self {
            status: Status::Skipped,
            note: Some(why.to_string()),
            ..Self::new(name)
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.data.insert(key.to_string(), v.into());
    }

    /// Settle the status from checks and error.
    pub fn finish(mut self) -> Self {
        if self.status == Status::Skipped {
            return self;
        }
        self.status = if self.error.is_some() {
            Status::Error
        } else if self.checks.iter().all(|c| c.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub tolerance: f64,
    pub samples: usize,
    pub bounds: [f64; 2],
    pub batteries: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemInfo {
    pub kind: String,
    pub preset: Option<String>,
    pub description: Option<String>,
    pub chart: Vec<String>,
    pub params: BTreeMap<String, f64>,
    pub action: Option<String>,
    pub processes: Vec<String>,
    pub chains: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Totals {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub provenance: Provenance,
    pub system: SystemInfo,
    pub batteries: Vec<BatteryReport>,
    pub totals: Totals,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

impl Report {
    pub fn tally(batteries: &[BatteryReport]) -> Totals {
        let checks = batteries.iter().map(|b| b.checks.len()).sum();
        let passed = batteries.iter().flat_map(|b| &b.checks).filter(|c| c.passed).count();
        let errors = batteries.iter().filter(|b| b.status == Status::Error).count();
        let failed = checks - passed;
        let exit_code = if errors > 0 {
            EXIT_INTERNAL
        } else if failed > 0 {
            EXIT_FAIL
        } else {
            EXIT_PASS
        };
        Totals {
            checks,
            passed,
            failed,
            errors,
            exit_code,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable digest.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let sys = &self.system;
        out.push_str(&format!(
            "system: {}{}\n",
            sys.kind,
            sys.preset.as_ref().map(|p| format!(" ({p})")).unwrap_or_default()
        ));
        if let Some(a) = &sys.action {
            out.push_str(&format!("action: {a}\n"));
        }
        for b in &self.batteries {
            let passed = b.checks.iter().filter(|c| c.passed).count();
            let status = match b.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
                Status::Skipped => "skipped",
            };
            out.push_str(&format!("{:<9} {:<7} {}/{}", b.name, status, passed, b.checks.len()));
            if let Some(n) = &b.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
            if let Some(e) = &b.error {
                out.push_str(&format!("    error: {e}\n"));
            }
            for c in b.checks.iter().filter(|c| !c.passed) {
                out.push_str(&format!("    failed: {}", c.name));
                if let (Some(v), Some(t)) = (c.value, c.tolerance) {
                    out.push_str(&format!(" (value {v:e}, tolerance {t:e})"));
                }
                if let Some(d) = &c.detail {
                    out.push_str(&format!(": {d}"));
                }
                out.push('\n');
            }
        }
        let t = &self.totals;
        out.push_str(&format!(
            "checks: {} passed, {} failed, {} battery errors; exit {}\n",
            t.passed, t.failed, t.errors, t.exit_code
        ));
        out
    }
}
