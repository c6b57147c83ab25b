//! The document every command produces, in JSON or plain text.
//!
//! JSON floats are written in scientific notation with 17 significant
//! digits, which round-trips every double. Non-finite numbers never reach the
//! output: a non-finite defect becomes `null` on a failing record.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;
use slant_core::{Check, Report};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// None when the measured defect was NaN or infinite.
    pub max_defect: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn from_check(check: &Check) -> Self {
        Self {
            name: check.name.clone(),
            max_defect: check.max_defect.is_finite().then_some(check.max_defect),
            tolerance: check.tolerance,
            pass: check.passed(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub scenario: String,
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<ErrorRecord>,
    /// Command-specific results (θ, verdicts, provenance, ...).
    #[serde(flatten)]
    pub extras: BTreeMap<String, Value>,
}

impl ReportDocument {
    pub fn new(scenario: &str, command: &str, seed: u64, samples: usize) -> Self {
        Self {
            scenario: scenario.to_string(),
            command: command.to_string(),
            seed,
            samples,
            checks: Vec::new(),
            pass: true,
            errors: Vec::new(),
            extras: BTreeMap::new(),
        }
    }

    pub fn push_check(&mut self, check: &Check) {
        let record = CheckRecord::from_check(check);
        self.pass &= record.pass;
        self.checks.push(record);
    }

    pub fn push_report(&mut self, report: &Report) {
        for c in report.checks.iter() {
            self.push_check(c);
        }
    }

    pub fn push_error(&mut self, kind: &str, message: impl Into<String>) {
        self.pass = false;
        self.errors.push(ErrorRecord {
            kind: kind.to_string(),
            message: message.into(),
        });
    }

    /// Non-finite floats are stored as null.
    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.extras.insert(key.to_string(), value.into());
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn error_kinds(&self) -> Vec<&str> {
        self.errors.iter().map(|e| e.kind.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
        self.serialize(&mut ser).expect("report serializes");
        let mut s = String::from_utf8(out).expect("serde_json writes UTF-8");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        let _ = writeln!(s, "command:  {}", self.command);
        let _ = writeln!(s, "seed: {}  samples: {}", self.seed, self.samples);
        for c in &self.checks {
            let defect = c.max_defect.map_or("non-finite".to_string(), |d| format!("{d:.3e}"));
            let _ = writeln!(
                s,
                "  {} {:<64} max_defect={} tolerance={:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                defect,
                c.tolerance
            );
        }
        for e in &self.errors {
            let _ = writeln!(s, "  ERROR {}: {}", e.kind, e.message);
        }
        for (k, v) in &self.extras {
            let _ = writeln!(s, "{k}: {v}");
        }
        let _ = writeln!(s, "result: {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

/// Compact JSON with every f64 as `d.dddddddddddddddde±x`.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let mut doc = ReportDocument::new("e3", "slant-angle", 42, 1);
        doc.set("theta_mean", std::f64::consts::FRAC_PI_4);
        doc.set("bad", f64::NAN);
        let json = doc.to_json();
        assert!(json.contains("\"theta_mean\":7.8539816339744828e-1"), "{json}");
        assert!(json.contains("\"bad\":null"));
        let back: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["theta_mean"].as_f64().unwrap(), std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn nan_defect_fails_the_record() {
        let mut c = Check::new("x", 1.0);
        c.record(f64::NAN);
        let mut doc = ReportDocument::new("s", "c", 0, 1);
        doc.push_check(&c);
        assert!(!doc.pass);
        assert_eq!(doc.checks[0].max_defect, None);
        assert!(doc.to_json().contains("\"max_defect\":null"));
    }
}
