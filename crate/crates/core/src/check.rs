//! Named defect measurements with tolerances.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl Check {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_defect: 0.0,
            tolerance,
            samples: 0,
        }
    }

    /// Records one measurement; a NaN poisons the check.
    pub fn record(&mut self, defect: f64) {
        self.samples += 1;
        if defect.is_nan() || self.max_defect.is_nan() {
            self.max_defect = f64::NAN;
        } else {
            self.max_defect = self.max_defect.max(defect.abs());
        }
    }

    pub fn passed(&self) -> bool {
        self.max_defect.is_finite() && self.max_defect <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} max_defect={:.3e} tolerance={:.1e} samples={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.max_defect,
            self.tolerance,
            self.samples
        )
    }
}

/// Ordered collection of checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckSet {
    checks: Vec<Check>,
}

impl CheckSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckSet) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

impl IntoIterator for CheckSet {
    type Item = Check;
    type IntoIter = std::vec::IntoIter<Check>;

    fn into_iter(self) -> Self::IntoIter {
        self.checks.into_iter()
    }
}

/// Checks evaluated over a sample set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: CheckSet,
    pub samples: usize,
    /// Sample points discarded because a field evaluated to a non-finite value.
    pub resampled: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.all_passed()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.get(name)
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.samples = self.samples.max(other.samples);
        self.resampled += other.resampled;
    }
}
