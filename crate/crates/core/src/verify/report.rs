use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fit::LogLogFit;

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub abscissa: f64,
    pub measured: f64,
    pub reference: Option<f64>,
    pub ratio: Option<f64>,
    /// False when a quadrature behind this point missed its tolerance.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub converged: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl Row {
    /// The ratio is only formed when the reference is positive.
    pub fn new(abscissa: f64, measured: f64, reference: Option<f64>) -> Self {
        let ratio = reference.filter(|r| *r > 0.0).map(|r| measured / r);
        Self {
            abscissa,
            measured,
            reference,
            ratio,
            converged: true,
        }
    }

    pub fn flagged(mut self, converged: bool) -> Self {
        self.converged = converged;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: LogLogFit,
}

/// A pass/fail invariant evaluated on a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// Name of the abscissa column (`t`, `R` or `s`).
    pub abscissa: String,
    pub rows: Vec<Row>,
    pub slopes: Vec<NamedFit>,
    /// `max / min` of the fitted constants across the sweep.
    pub constant_stability: Option<f64>,
    pub converged: bool,
    pub checks: Vec<Check>,
    pub metadata: BTreeMap<String, String>,
    /// Sweeps run alongside the main one, such as a second kernel.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub companions: Vec<ExperimentReport>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, abscissa: &str) -> Self {
        Self {
            experiment: experiment.into(),
            abscissa: abscissa.into(),
            rows: Vec::new(),
            slopes: Vec::new(),
            constant_stability: None,
            converged: true,
            checks: Vec::new(),
            metadata: BTreeMap::new(),
            companions: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
        self
    }

    pub fn slope(&mut self, name: &str, fit: LogLogFit) -> &mut Self {
        self.slopes.push(NamedFit { name: name.into(), fit });
        self
    }

    pub fn find_slope(&self, name: &str) -> Option<&LogLogFit> {
        self.slopes.iter().find(|s| s.name == name).map(|s| &s.fit)
    }

    pub fn find_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// All checks passed and every quadrature converged, companions included.
    pub fn passed(&self) -> bool {
        self.converged && self.checks.iter().all(|c| c.passed) && self.companions.iter().all(|c| c.passed())
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }
}

/// `max / min` of a positive sequence.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
