//! Damped least squares and the fitters that invert the forward models.
//!
//! Every fitter returns a [`FitReport`] whose parameter and standard-error
//! maps use stable (sorted) key order.

mod decay;
mod g2;
mod lifetime;
mod lsq;
mod models;
mod resonance;
mod tuning;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::data::DataError;

pub use decay::{fit_decay, fit_decay_with};
pub use g2::{fit_g2_purity, fit_g2_purity_with, G2Fit};
pub use lifetime::fit_lifetime_detuning;
pub use lsq::{least_squares, FitData, LsqOptions, Weighting};
pub use models::{Abscissa, ModelKind, PeakModel};
pub use resonance::{fit_resonance, fit_resonance_with, ResonanceFit};
pub use tuning::{fit_tuning_rate, PreferredModel, TuningRateFit, SELECTION_MARGIN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("normal matrix is singular at the solution")]
    SingularJacobian,
    #[error("no convergence after {iterations} iterations")]
    MaxIterations {
        iterations: usize,
        report: Box<FitReport>,
    },
    #[error("{got} data points cannot constrain {needed} parameters")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("no resonance dip found below the noise floor")]
    NoResonanceFound,
    #[error("decay counts span only a factor {ratio:.3}, at least one decade is required")]
    InsufficientDynamicRange { ratio: f64 },
    #[error("all abscissa values are equal")]
    DegenerateAbscissa,
    #[error("peak detection failed: {0}")]
    PeakDetectionFailure(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Outcome of one fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model_id: String,
    pub parameters: BTreeMap<String, f64>,
    /// One-sigma errors; empty unless the fit converged.
    pub standard_errors: BTreeMap<String, f64>,
    /// Weighted sum of squared residuals.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    /// Parameter value by name. Panics on an unknown key, which is a
    /// programming error for the built-in fitters.
    pub fn value(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(v) => *v,
            None => panic!("fit report {} has no parameter {key}", self.model_id),
        }
    }

    pub fn sigma(&self, key: &str) -> Option<f64> {
        self.standard_errors.get(key).copied()
    }

    pub(crate) fn insert(&mut self, key: &str, value: f64, sigma: Option<f64>) {
        self.parameters.insert(key.to_string(), value);
        if let (true, Some(s)) = (self.converged, sigma) {
            self.standard_errors.insert(key.to_string(), s);
        }
    }
}

/// Median of a slice (NaN-free input).
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
