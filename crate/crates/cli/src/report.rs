//! Suite reports: one record per claim id, serialized as stable JSON.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    /// Asserted check, within tolerance on every sample.
    Pass,
    /// Asserted check with at least one violation beyond tolerance.
    Fail,
    /// Measured and recorded only; never flips the suite outcome.
    Observational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub samples: usize,
    pub tolerance: f64,
    /// Largest signed excess over the claimed inequality (negative
    /// values are margin).
    pub max_violation: f64,
    pub violations: usize,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub samples: usize,
    pub dims: (usize, usize),
    pub qs: Vec<f64>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: 24,
            dims: (2, 2),
            qs: vec![0.3, 0.5, 1.5, 2.0],
            seed: 42,
        }
    }
}

impl SuiteConfig {
    pub fn qs_below_one(&self) -> Vec<f64> {
        self.qs.iter().copied().filter(|&q| q < 1.0).collect()
    }

    pub fn qs_above_one(&self) -> Vec<f64> {
        self.qs.iter().copied().filter(|&q| q > 1.0).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn new(suite: &str, config: SuiteConfig, checks: Vec<CheckRecord>, wall_ms: u64) -> Self {
        let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
        Self {
            suite: suite.into(),
            config,
            checks,
            passed,
            wall_ms,
        }
    }
}

pub fn reports_to_json(reports: &[SuiteReport]) -> String {
    let mut text = serde_json::to_string_pretty(reports).expect("serializable");
    text.push('\n');
    text
}

pub fn reports_from_json(text: &str) -> serde_json::Result<Vec<SuiteReport>> {
    serde_json::from_str(text)
}

/// Accumulates signed violations for one check.
#[derive(Debug, Clone)]
pub struct Tally {
    tolerance: f64,
    samples: usize,
    violations: usize,
    max_violation: f64,
}

impl Tally {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            samples: 0,
            violations: 0,
            max_violation: f64::NEG_INFINITY,
        }
    }

    /// Record one sample; `violation` is lhs - rhs for a claimed
    /// lhs <= rhs, so positive beyond tolerance means the claim failed.
    pub fn push(&mut self, violation: f64) {
        self.samples += 1;
        if violation > self.max_violation {
            self.max_violation = violation;
        }
        if violation > self.tolerance {
            self.violations += 1;
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn violations(&self) -> usize {
        self.violations
    }

    pub fn max_violation(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.max_violation
        }
    }

    pub fn asserted(&self, id: &str, anchor: &str, note: Option<String>) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            samples: self.samples,
            tolerance: self.tolerance,
            max_violation: self.max_violation(),
            violations: self.violations,
            status: if self.violations == 0 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note,
        }
    }

    pub fn observational(&self, id: &str, anchor: &str, note: Option<String>) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            samples: self.samples,
            tolerance: self.tolerance,
            max_violation: self.max_violation(),
            violations: self.violations,
            status: CheckStatus::Observational,
            note,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_round_trip_is_byte_stable() {
        let mut tally = Tally::new(1e-9);
        tally.push(-0.5);
        tally.push(3e-9);
        let checks = vec![
            tally.asserted("demo-le", "plumbing", Some("lhs <= rhs".into())),
            Tally::new(1e-6).observational("demo-audit", "plumbing", None),
        ];
        let report = SuiteReport::new("demo", SuiteConfig::default(), checks, 0);
        assert!(!report.passed);

        let text = reports_to_json(&[report]);
        let parsed = reports_from_json(&text).unwrap();
        assert_eq!(reports_to_json(&parsed), text);
    }

    #[test]
    fn empty_tally_passes_vacuously() {
        let record = Tally::new(1e-9).asserted("vacuous", "plumbing", None);
        assert_eq!(record.status, CheckStatus::Pass);
        assert_eq!(record.samples, 0);
        assert_eq!(record.max_violation, 0.0);
    }

    #[test]
    fn observational_status_never_fails_a_suite() {
        let mut tally = Tally::new(1e-9);
        tally.push(1.0);
        let report = SuiteReport::new(
            "demo",
            SuiteConfig::default(),
            vec![tally.observational("audit", "plumbing", None)],
            0,
        );
        assert!(report.passed);
    }
}
