//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// One named residual value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
}

/// A printed component formula that disagrees with the one generated from
/// quaternion multiplication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Erratum {
    /// Which printed display the comparison refers to.
    pub formula: String,
    /// Row or component of that display.
    pub item: String,
    /// Coordinate convention under which the comparison was made.
    pub convention: String,
    pub detail: String,
}

/// Outcome of one verification. `pass` holds exactly when every residual is
/// finite and at most `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub residuals: Vec<Residual>,
    pub tolerance: f64,
    pub pass: bool,
    pub errata: Vec<Erratum>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            residuals: Vec::new(),
            tolerance,
            pass: true,
            errata: Vec::new(),
            runtime_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn residual(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.residuals.push(Residual {
            label: label.into(),
            value,
        });
        self.pass = self.evaluate();
        self
    }

    pub fn erratum(&mut self, e: Erratum) -> &mut Self {
        self.errata.push(e);
        self
    }

    fn evaluate(&self) -> bool {
        self.residuals
            .iter()
            .all(|r| r.value.is_finite() && r.value <= self.tolerance)
    }

    /// Recomputes `pass` against a new tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.evaluate();
        self
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.value)
            .fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// `name,pass,max_residual,tolerance,runtime_ms`
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{}",
            self.name,
            self.pass,
            self.max_residual(),
            self.tolerance,
            self.runtime_ms
        )
    }

    pub const CSV_HEADER: &'static str = "name,pass,max_residual,tolerance,runtime_ms";
}
