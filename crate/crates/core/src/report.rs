//! Verification results.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

/// `sqrt(Σ|a−b|² / Σ|b|²)` over paired samples; zero when both are zero.
pub fn rel_l2_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let den: f64 = b.iter().map(|q| q.norm_sqr()).sum();
    ratio(num.sqrt(), den.sqrt())
}

/// `max|a−b| / max|b|`; zero when both are zero.
pub fn max_rel_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num = a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    let den = b.iter().map(|q| q.norm()).fold(0.0, f64::max);
    ratio(num, den)
}

/// `max_i |a_i − b_i| / |b_i|`, with `0/0` read as zero.
pub fn max_pointwise_rel_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| ratio((p - q).norm(), q.norm()))
        .fold(0.0, f64::max)
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// One checked quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub id: String,
    pub inputs: BTreeMap<String, Value>,
    pub metric: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CaseResult {
    /// A case that passes when `value <= tolerance`.
    pub fn at_most(id: impl Into<String>, metric: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            id: id.into(),
            inputs: BTreeMap::new(),
            metric: metric.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// A case that passes when `value > threshold`.
    pub fn above(id: impl Into<String>, metric: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            pass: value > threshold,
            ..Self::at_most(id, metric, value, threshold)
        }
    }

    /// A case that passes when `value < threshold`.
    pub fn below(id: impl Into<String>, metric: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            pass: value < threshold,
            ..Self::at_most(id, metric, value, threshold)
        }
    }

    pub fn input(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            cases: Vec::new(),
        }
    }

    pub fn push(&mut self, case: CaseResult) {
        self.cases.push(case);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.cases.extend(other.cases);
    }

    /// True when every case passes (vacuously for an empty report).
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    /// Largest measured value among the cases.
    pub fn max_value(&self) -> f64 {
        self.cases.iter().map(|c| c.value).fold(0.0, f64::max)
    }
}
