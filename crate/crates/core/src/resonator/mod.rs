//! Hybrid ring-resonator forward model: loss budget, quality factor, free
//! spectral range, single-bus all-pass transmission, effective mode volume
//! and the resulting maximum Purcell factor.
//!
//! Lengths are in metres and losses in dB/cm (power attenuation); see
//! [`crate::units::db_per_cm_to_per_m`] for the conversion used throughout.

mod mode_volume;
mod transmission;

use std::f64::consts::PI;

use thiserror::Error;

use crate::data::DataError;
use crate::units::{db_per_cm_to_per_m, per_m_to_db_per_cm, CM};

pub use mode_volume::{effective_mode_volume, ModeField, ModeVolume};
pub use transmission::{resonance_wavelengths_nm, transmission_at_phase, transmission_spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonatorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("wavelength grid is empty")]
    EmptyGrid,
    #[error("mode field has zero peak energy density")]
    DegenerateField,
    #[error(transparent)]
    Data(#[from] DataError),
}

fn domain(msg: impl Into<String>) -> ResonatorError {
    ResonatorError::Domain(msg.into())
}

/// Ring geometry. `taper_count` mode transformers of length `taper_length_m`
/// terminate the GaAs section; the default is two (one at each end).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    pub total_length_m: f64,
    pub gaas_length_m: f64,
    pub taper_length_m: f64,
    pub taper_count: u32,
    pub group_index: f64,
    pub design_wavelength_m: f64,
}

impl RingGeometry {
    pub fn new(
        total_length_m: f64,
        gaas_length_m: f64,
        taper_length_m: f64,
        group_index: f64,
        design_wavelength_m: f64,
    ) -> Result<Self, ResonatorError> {
        Self {
            total_length_m,
            gaas_length_m,
            taper_length_m,
            taper_count: 2,
            group_index,
            design_wavelength_m,
        }
        .validated()
    }

    pub fn with_taper_count(mut self, taper_count: u32) -> Result<Self, ResonatorError> {
        self.taper_count = taper_count;
        self.validated()
    }

    pub fn validated(self) -> Result<Self, ResonatorError> {
        let bad = |m: String| Err(ResonatorError::InvalidGeometry(m));
        for (name, v) in [
            ("total_length", self.total_length_m),
            ("gaas_length", self.gaas_length_m),
            ("taper_length", self.taper_length_m),
            ("design_wavelength", self.design_wavelength_m),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        let covered = self.gaas_length_m + f64::from(self.taper_count) * self.taper_length_m;
        if covered > self.total_length_m * (1.0 + 1e-12) {
            return bad(format!(
                "GaAs section plus tapers ({covered:e} m) exceeds the ring length ({:e} m)",
                self.total_length_m
            ));
        }
        if !(self.group_index > 1.0 && self.group_index < 10.0) {
            return bad(format!("group index {} outside (1, 10)", self.group_index));
        }
        Ok(self)
    }

    /// Optical path length `n_g · L_total`, in metres.
    pub fn optical_path_m(&self) -> f64 {
        self.group_index * self.total_length_m
    }
}

/// Propagation-loss budget in dB/cm and the mode-transformer efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBudget {
    pub alpha_gaas_db_per_cm: f64,
    pub alpha_taper_db_per_cm: f64,
    pub alpha_ln_db_per_cm: f64,
    pub taper_efficiency: f64,
}

impl LossBudget {
    pub fn new(
        alpha_gaas_db_per_cm: f64,
        alpha_taper_db_per_cm: f64,
        alpha_ln_db_per_cm: f64,
        taper_efficiency: f64,
    ) -> Result<Self, ResonatorError> {
        for (name, v) in [
            ("alpha_gaas", alpha_gaas_db_per_cm),
            ("alpha_taper", alpha_taper_db_per_cm),
            ("alpha_ln", alpha_ln_db_per_cm),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if !(taper_efficiency > 0.0 && taper_efficiency <= 1.0) {
            return Err(domain(format!(
                "taper efficiency {taper_efficiency} outside (0, 1]"
            )));
        }
        Ok(Self {
            alpha_gaas_db_per_cm,
            alpha_taper_db_per_cm,
            alpha_ln_db_per_cm,
            taper_efficiency,
        })
    }

    /// Budget whose taper loss is derived from the transformer efficiency.
    pub fn from_taper_efficiency(
        alpha_gaas_db_per_cm: f64,
        alpha_ln_db_per_cm: f64,
        taper_efficiency: f64,
        geometry: &RingGeometry,
    ) -> Result<Self, ResonatorError> {
        let alpha_taper = taper_loss_per_length(taper_efficiency, geometry.taper_length_m)?;
        Self::new(
            alpha_gaas_db_per_cm,
            alpha_taper,
            alpha_ln_db_per_cm,
            taper_efficiency,
        )
    }
}

/// Mode-transformer loss `-10·log10(η) / L_M`, dB/cm, with `L_M` in metres.
pub fn taper_loss_per_length(efficiency: f64, taper_length_m: f64) -> Result<f64, ResonatorError> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(domain(format!(
            "taper efficiency {efficiency} outside (0, 1]"
        )));
    }
    if !(taper_length_m > 0.0) {
        return Err(domain(format!(
            "taper length must be positive, got {taper_length_m}"
        )));
    }
    Ok(-10.0 * efficiency.log10() / (taper_length_m / CM))
}

/// Length-weighted ring loss in dB/cm:
/// `(α_GaAs·L_GaAs + α_M·n_taper·L_M) / L_total + α_LN`.
pub fn total_loss(geometry: &RingGeometry, budget: &LossBudget) -> f64 {
    let g = geometry;
    let tapers = f64::from(g.taper_count) * g.taper_length_m;
    (budget.alpha_gaas_db_per_cm * g.gaas_length_m + budget.alpha_taper_db_per_cm * tapers)
        / g.total_length_m
        + budget.alpha_ln_db_per_cm
}

/// Critical-coupling quality factor `Q = π·n_g / (λ·α_total)` with α in 1/m.
pub fn quality_factor(
    geometry: &RingGeometry,
    alpha_total_db_per_cm: f64,
) -> Result<f64, ResonatorError> {
    if !(alpha_total_db_per_cm > 0.0) {
        return Err(domain(format!(
            "total loss must be positive for a finite Q, got {alpha_total_db_per_cm} dB/cm"
        )));
    }
    let alpha = db_per_cm_to_per_m(alpha_total_db_per_cm);
    Ok(PI * geometry.group_index / (geometry.design_wavelength_m * alpha))
}

/// Loss (dB/cm) that gives quality factor `q` under [`quality_factor`].
pub fn loss_for_quality(geometry: &RingGeometry, q: f64) -> Result<f64, ResonatorError> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(domain(format!(
            "quality factor must be positive and finite, got {q}"
        )));
    }
    let alpha = PI * geometry.group_index / (geometry.design_wavelength_m * q);
    Ok(per_m_to_db_per_cm(alpha))
}

/// Free spectral range `λ² / (n_g · L_total)` at the design wavelength, metres.
pub fn free_spectral_range(geometry: &RingGeometry) -> f64 {
    geometry.design_wavelength_m.powi(2) / geometry.optical_path_m()
}

/// Maximum Purcell factor `(3 / 4π²) · Q / Ṽ` with `Ṽ` in units of `(λ/n)³`.
pub fn max_purcell(quality: f64, mode_volume_norm: f64) -> Result<f64, ResonatorError> {
    if !(quality > 0.0) || !(mode_volume_norm > 0.0) {
        return Err(domain(format!(
            "Q and mode volume must be positive, got Q = {quality}, V = {mode_volume_norm}"
        )));
    }
    Ok(3.0 / (4.0 * PI * PI) * quality / mode_volume_norm)
}

/// Coupling tolerance below which `|a - t|` counts as critical.
pub const CRITICAL_COUPLING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingRegime {
    Over,
    Critical,
    Under,
}

/// Bus self-coupling `t` and ring round-trip field amplitude `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingState {
    pub self_coupling: f64,
    pub round_trip_amplitude: f64,
}

impl CouplingState {
    pub fn new(self_coupling: f64, round_trip_amplitude: f64) -> Result<Self, ResonatorError> {
        if !(self_coupling > 0.0 && self_coupling < 1.0) {
            return Err(domain(format!(
                "self-coupling {self_coupling} outside (0, 1)"
            )));
        }
        if !(round_trip_amplitude > 0.0 && round_trip_amplitude <= 1.0) {
            return Err(domain(format!(
                "round-trip amplitude {round_trip_amplitude} outside (0, 1]"
            )));
        }
        Ok(Self {
            self_coupling,
            round_trip_amplitude,
        })
    }

    /// Critically coupled ring whose round-trip loss matches `alpha_total`.
    pub fn critical_for_loss(
        geometry: &RingGeometry,
        alpha_total_db_per_cm: f64,
    ) -> Result<Self, ResonatorError> {
        let a = round_trip_amplitude(geometry, alpha_total_db_per_cm);
        Self::new(a, a)
    }

    pub fn regime(&self) -> CouplingRegime {
        let diff = self.round_trip_amplitude - self.self_coupling;
        if diff.abs() < CRITICAL_COUPLING_TOL {
            CouplingRegime::Critical
        } else if diff > 0.0 {
            CouplingRegime::Over
        } else {
            CouplingRegime::Under
        }
    }
}

/// Round-trip field amplitude `a = exp(-α·L_total / 2)`.
pub fn round_trip_amplitude(geometry: &RingGeometry, alpha_total_db_per_cm: f64) -> f64 {
    (-0.5 * db_per_cm_to_per_m(alpha_total_db_per_cm) * geometry.total_length_m).exp()
}
