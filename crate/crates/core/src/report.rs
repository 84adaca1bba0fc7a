//! Report records shared by the verification suites.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
pub use crate::rzpoints::CheckStatus;
use crate::rzpoints::CheckReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub params: Value,
    pub status: CheckStatus,
    pub pass: bool,
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl CheckRecord {
    pub fn new(check_id: &str, params: Value, pass: bool, checked: u64) -> CheckRecord {
        CheckRecord { check_id: check_id.into(), params, status: CheckStatus::Exhaustive, pass, checked, witness: None, detail: None }
    }

    pub fn sampled(mut self, sampled: bool) -> CheckRecord {
        if sampled {
            self.status = CheckStatus::Sampled;
        }
        self
    }

    pub fn witness(mut self, w: Value) -> CheckRecord {
        self.witness = Some(w);
        self
    }

    pub fn detail(mut self, d: Value) -> CheckRecord {
        self.detail = Some(d);
        self
    }
}

impl From<CheckReport> for CheckRecord {
    fn from(r: CheckReport) -> CheckRecord {
        CheckRecord {
            check_id: r.check_id,
            params: serde_json::to_value(&r.params).expect("plain struct"),
            status: r.status,
            pass: r.pass,
            checked: r.checked,
            witness: r.witness,
            detail: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkipReason {
    /// An enumeration bound refused the computation.
    Bound,
    /// The run profile leaves this configuration out.
    Profile,
    /// Too few levels to estimate a growth rate.
    #[serde(rename = "insufficient_data")]
    InsufficientData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub check_id: String,
    pub params: Value,
    pub reason: SkipReason,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub bound_exceeded: usize,
    pub failed_checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

impl Report {
    pub fn new(command: &str, config: Value) -> Report {
        Report { command: command.into(), config, checks: Vec::new(), skipped: Vec::new(), summary: Summary::default() }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn skip(&mut self, check_id: &str, params: Value, reason: SkipReason, message: String) {
        self.skipped.push(Skipped { check_id: check_id.into(), params, reason, message });
    }

    /// Record the outcome of a fallible check. A refused bound becomes a
    /// skip entry; any other error is a failed check carrying the message.
    pub fn record(&mut self, check_id: &str, params: Value, r: crate::Result<CheckRecord>) {
        match r {
            Ok(c) => self.push(c),
            Err(e) => self.error(check_id, params, e),
        }
    }

    pub fn error(&mut self, check_id: &str, params: Value, e: Error) {
        match e {
            Error::BoundExceeded { .. } => self.skip(check_id, params, SkipReason::Bound, e.to_string()),
            Error::InsufficientData(_) => self.skip(check_id, params, SkipReason::InsufficientData, e.to_string()),
            e => self.push(CheckRecord::new(check_id, params, false, 0).witness(json!({ "error": e.to_string() }))),
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.skipped.extend(other.skipped);
    }

    pub fn finish(&mut self) {
        let failed: Vec<&CheckRecord> = self.checks.iter().filter(|c| !c.pass).collect();
        let mut failed_checks: Vec<String> = failed.iter().map(|c| c.check_id.clone()).collect();
        failed_checks.sort();
        failed_checks.dedup();
        self.summary = Summary {
            total: self.checks.len(),
            passed: self.checks.len() - failed.len(),
            failed: failed.len(),
            skipped: self.skipped.len(),
            bound_exceeded: self.skipped.iter().filter(|s| s.reason == SkipReason::Bound).count(),
            failed_checks,
        };
    }

    /// 2 when any check failed, else 3 when a bound refused work, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| !c.pass) {
            EXIT_FAILED
        } else if self.skipped.iter().any(|s| s.reason == SkipReason::Bound) {
            EXIT_BOUND
        } else {
            EXIT_OK
        }
    }
}

/// Pass/fail accumulator that keeps the first witness.
pub struct Tally {
    pub checked: u64,
    pub failures: u64,
    pub witness: Option<Value>,
}

impl Default for Tally {
    fn default() -> Self {
        Self::new()
    }
}

impl Tally {
    pub fn new() -> Tally {
        Tally { checked: 0, failures: 0, witness: None }
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn into_record(self, check_id: &str, params: Value) -> CheckRecord {
        let mut r = CheckRecord::new(check_id, params, self.failures == 0, self.checked);
        r.witness = self.witness;
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_precedence() {
        let mut r = Report::new("x", json!({}));
        r.push(CheckRecord::new("a", json!({}), true, 1));
        assert_eq!(r.exit_code(), EXIT_OK);
        r.error("b", json!({}), Error::BoundExceeded { what: "w".into(), needed: 2, bound: 1 });
        assert_eq!(r.exit_code(), EXIT_BOUND);
        r.skip("c", json!({}), SkipReason::Profile, String::new());
        assert_eq!(r.exit_code(), EXIT_BOUND);
        r.error("e", json!({}), Error::InsufficientData("one level".into()));
        assert_eq!(r.skipped.last().unwrap().reason, SkipReason::InsufficientData);
        r.error("d", json!({}), Error::NotVertex);
        assert_eq!(r.exit_code(), EXIT_FAILED);
        r.finish();
        assert_eq!(r.summary.failed_checks, vec!["d".to_string()]);
        assert_eq!((r.summary.total, r.summary.skipped, r.summary.bound_exceeded), (2, 3, 1));
    }

    #[test]
    fn tally_keeps_first_witness() {
        let mut t = Tally::new();
        t.record(true, || json!(0));
        t.record(false, || json!(1));
        t.record(false, || json!(2));
        let r = t.into_record("x", json!({}));
        assert!(!r.pass);
        assert_eq!((r.checked, r.witness), (3, Some(json!(1))));
    }
}
