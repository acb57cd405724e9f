//! Sampled observables and scan containers.

use crate::dynamics::DriveParams;
use crate::error::{Error, Result};
use crate::fit::LorentzianFit;
use serde::{Deserialize, Serialize};

use super::sequence::NoiseModel;

/// Provenance of a trace: what was simulated and with which noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub description: String,
    pub params: Option<DriveParams>,
    pub noise: NoiseModel,
}

/// `P|0⟩` (or another probability) against time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeTrace {
    /// Seconds, strictly increasing.
    pub times: Vec<f64>,
    /// Probabilities in `[0, 1]`.
    pub values: Vec<f64>,
    /// Lower-band population `|⟨−|ψ⟩|²` at the same times, when the
    /// simulation had access to the state.
    pub band_minus: Option<Vec<f64>>,
    pub meta: TraceMeta,
}

impl TimeTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks the container invariants.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.times.len()
            || self.band_minus.as_ref().is_some_and(|b| b.len() != self.times.len())
        {
            return Err(Error::PreconditionViolated("trace columns differ in length".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::PreconditionViolated("trace times must be strictly increasing".into()));
        }
        let in_unit = |v: &f64| (0.0..=1.0).contains(v);
        if !self.values.iter().all(in_unit) || !self.band_minus.iter().flatten().all(in_unit) {
            return Err(Error::PreconditionViolated("trace probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// A named per-point column of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Observable evaluated along one scanned parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub variable: String,
    pub values: Vec<f64>,
    pub observable: String,
    pub observed: Vec<f64>,
    /// Per-point diagnostics, e.g. the resonance used or alternative
    /// estimates of the observable.
    pub columns: Vec<Column>,
    pub lorentzian: Option<LorentzianFit>,
}

impl ScanResult {
    pub fn new(variable: &str, values: Vec<f64>, observable: &str, observed: Vec<f64>) -> Self {
        ScanResult {
            variable: variable.into(),
            values,
            observable: observable.into(),
            observed,
            columns: Vec::new(),
            lorentzian: None,
        }
    }

    pub fn with_column(mut self, name: &str, values: Vec<f64>) -> Self {
        self.columns.push(Column { name: name.into(), values });
        self
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.values.len();
        if self.observed.len() != n || self.columns.iter().any(|c| c.values.len() != n) {
            return Err(Error::PreconditionViolated("scan columns differ in length".into()));
        }
        Ok(())
    }
}
