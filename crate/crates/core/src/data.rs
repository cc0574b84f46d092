//! Sampled measurement records shared by the simulators and the fitters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("record is empty")]
    Empty,
    #[error("axis has {axis} entries but values have {values}")]
    LengthMismatch { axis: usize, values: usize },
    #[error("axis is not ascending at index {index}")]
    NonMonotonicAxis { index: usize },
    #[error("duplicate abscissa at index {index}")]
    DuplicateAbscissa { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("negative count at index {index}")]
    NegativeCount { index: usize },
    #[error("invalid record: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Transmission,
    Counts,
}

impl SpectrumKind {
    pub fn column_name(self) -> &'static str {
        match self {
            SpectrumKind::Transmission => "transmission",
            SpectrumKind::Counts => "counts",
        }
    }
}

/// A wavelength-resolved record: transmission or photon counts per
/// wavelength sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavelength_nm: Vec<f64>,
    values: Vec<f64>,
    kind: SpectrumKind,
}

fn check_ascending(axis: &[f64]) -> Result<(), DataError> {
    for (i, x) in axis.iter().enumerate() {
        if !x.is_finite() {
            return Err(DataError::NonFinite { index: i });
        }
    }
    for i in 1..axis.len() {
        if axis[i] == axis[i - 1] {
            return Err(DataError::DuplicateAbscissa { index: i });
        }
        if axis[i] < axis[i - 1] {
            return Err(DataError::NonMonotonicAxis { index: i });
        }
    }
    Ok(())
}

impl Spectrum {
    pub fn new(
        wavelength_nm: Vec<f64>,
        values: Vec<f64>,
        kind: SpectrumKind,
    ) -> Result<Self, DataError> {
        if wavelength_nm.is_empty() {
            return Err(DataError::Empty);
        }
        if wavelength_nm.len() != values.len() {
            return Err(DataError::LengthMismatch {
                axis: wavelength_nm.len(),
                values: values.len(),
            });
        }
        check_ascending(&wavelength_nm)?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(DataError::NonFinite { index });
        }
        Ok(Self {
            wavelength_nm,
            values,
            kind,
        })
    }

    pub fn wavelength_nm(&self) -> &[f64] {
        &self.wavelength_nm
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same record with every wavelength shifted by `offset_nm`.
    pub fn shifted(&self, offset_nm: f64) -> Self {
        Self {
            wavelength_nm: self.wavelength_nm.iter().map(|w| w + offset_nm).collect(),
            values: self.values.clone(),
            kind: self.kind,
        }
    }
}

fn check_edges_and_counts(edges: &[f64], counts: &[f64]) -> Result<(), DataError> {
    if counts.is_empty() {
        return Err(DataError::Empty);
    }
    if edges.len() != counts.len() + 1 {
        return Err(DataError::LengthMismatch {
            axis: edges.len(),
            values: counts.len() + 1,
        });
    }
    check_ascending(edges)?;
    for (i, c) in counts.iter().enumerate() {
        if !c.is_finite() {
            return Err(DataError::NonFinite { index: i });
        }
        if *c < 0.0 {
            return Err(DataError::NegativeCount { index: i });
        }
    }
    Ok(())
}

fn centers(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Uniform bin edges `start, start + width, ...` with `n` bins.
pub fn uniform_edges(start: f64, width: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| start + width * i as f64).collect()
}

/// Time-resolved photoluminescence histogram (TCSPC decay curve).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayHistogram {
    bin_edges_ns: Vec<f64>,
    counts: Vec<f64>,
    irf_sigma_ns: f64,
}

impl DecayHistogram {
    pub fn new(
        bin_edges_ns: Vec<f64>,
        counts: Vec<f64>,
        irf_sigma_ns: f64,
    ) -> Result<Self, DataError> {
        check_edges_and_counts(&bin_edges_ns, &counts)?;
        if !(irf_sigma_ns >= 0.0) || !irf_sigma_ns.is_finite() {
            return Err(DataError::Invalid(format!(
                "IRF sigma must be finite and nonnegative, got {irf_sigma_ns}"
            )));
        }
        Ok(Self {
            bin_edges_ns,
            counts,
            irf_sigma_ns,
        })
    }

    pub fn bin_edges_ns(&self) -> &[f64] {
        &self.bin_edges_ns
    }

    pub fn bin_centers_ns(&self) -> Vec<f64> {
        centers(&self.bin_edges_ns)
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn irf_sigma_ns(&self) -> f64 {
        self.irf_sigma_ns
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total_counts(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Start-stop coincidence histogram for a pulsed g² measurement.
///
/// The delay axis spans a range symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationHistogram {
    bin_edges_ns: Vec<f64>,
    counts: Vec<f64>,
    repetition_period_ns: f64,
}

impl CorrelationHistogram {
    pub fn new(
        bin_edges_ns: Vec<f64>,
        counts: Vec<f64>,
        repetition_period_ns: f64,
    ) -> Result<Self, DataError> {
        check_edges_and_counts(&bin_edges_ns, &counts)?;
        if !(repetition_period_ns > 0.0) || !repetition_period_ns.is_finite() {
            return Err(DataError::Invalid(format!(
                "repetition period must be positive, got {repetition_period_ns}"
            )));
        }
        let lo = bin_edges_ns[0];
        let hi = bin_edges_ns[bin_edges_ns.len() - 1];
        if (lo + hi).abs() > 1e-9 * hi.abs().max(1.0) {
            return Err(DataError::Invalid(format!(
                "delay range [{lo}, {hi}] is not symmetric about zero"
            )));
        }
        Ok(Self {
            bin_edges_ns,
            counts,
            repetition_period_ns,
        })
    }

    pub fn bin_edges_ns(&self) -> &[f64] {
        &self.bin_edges_ns
    }

    pub fn bin_centers_ns(&self) -> Vec<f64> {
        centers(&self.bin_edges_ns)
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn repetition_period_ns(&self) -> f64 {
        self.repetition_period_ns
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Half-width of the delay axis.
    pub fn half_range_ns(&self) -> f64 {
        self.bin_edges_ns[self.bin_edges_ns.len() - 1]
    }
}
