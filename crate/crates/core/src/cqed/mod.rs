//! Emitter–cavity interaction in the weak-coupling regime: Purcell
//! enhancement versus detuning, β-factor, collected-intensity contrast and
//! synthetic decay / pulsed g² histograms.

mod decay;
mod g2;
pub mod noise;

use thiserror::Error;

use crate::data::DataError;

pub use decay::{emg_bin_counts, emg_cdf, emg_density, synthesize_decay, DecaySynthesis};
pub use g2::{synthesize_g2, window_peak_cdf, G2Synthesis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CqedError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("lifetime {lifetime_ns} ns is not below a quarter of the {repetition_ns} ns repetition period")]
    PeakOverlap {
        lifetime_ns: f64,
        repetition_ns: f64,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

fn domain(msg: impl Into<String>) -> CqedError {
    CqedError::Domain(msg.into())
}

/// Quantum dot coupled to one cavity mode. Wavelengths in nm, rates in 1/ns.
///
/// `free_rate_per_ns` is the decay rate without cavity enhancement and
/// `purcell_on_resonance` the enhancement at zero detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterCavityState {
    pub qd_wavelength_nm: f64,
    pub cavity_wavelength_nm: f64,
    pub cavity_linewidth_nm: f64,
    pub purcell_on_resonance: f64,
    pub free_rate_per_ns: f64,
}

impl EmitterCavityState {
    pub fn new(
        qd_wavelength_nm: f64,
        cavity_wavelength_nm: f64,
        cavity_linewidth_nm: f64,
        purcell_on_resonance: f64,
        free_rate_per_ns: f64,
    ) -> Result<Self, CqedError> {
        if !(cavity_linewidth_nm > 0.0) {
            return Err(domain(format!(
                "cavity linewidth must be positive, got {cavity_linewidth_nm}"
            )));
        }
        if !(purcell_on_resonance >= 0.0) || !purcell_on_resonance.is_finite() {
            return Err(domain(format!(
                "Purcell factor must be >= 0, got {purcell_on_resonance}"
            )));
        }
        if !(free_rate_per_ns > 0.0) || !free_rate_per_ns.is_finite() {
            return Err(domain(format!(
                "free decay rate must be positive, got {free_rate_per_ns}"
            )));
        }
        Ok(Self {
            qd_wavelength_nm,
            cavity_wavelength_nm,
            cavity_linewidth_nm,
            purcell_on_resonance,
            free_rate_per_ns,
        })
    }

    /// Emitter minus cavity wavelength, nm.
    pub fn detuning_nm(&self) -> f64 {
        self.qd_wavelength_nm - self.cavity_wavelength_nm
    }
}

/// How the lifetime depends on detuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LifetimeConvention {
    /// Rates add: `Γ(δ) = Γ_free·(1 + F(δ))`, lifetime `1/Γ(δ)`.
    #[default]
    RateAdditive,
    /// The lifetime itself is a Lorentzian dip between `1/Γ_free` and the
    /// on-resonance lifetime.
    LorentzianLifetime,
}

/// Lorentzian line factor `1 / (1 + (2δ/κ)²)`.
fn lorentz(detuning_nm: f64, linewidth_nm: f64) -> f64 {
    1.0 / (1.0 + (2.0 * detuning_nm / linewidth_nm).powi(2))
}

/// Purcell factor at detuning `δ`: `F_p / (1 + (2δ/κ)²)`.
pub fn purcell_at_detuning(state: &EmitterCavityState, detuning_nm: f64) -> f64 {
    state.purcell_on_resonance * lorentz(detuning_nm, state.cavity_linewidth_nm)
}

/// Total decay rate `Γ_free·(1 + F(δ))`, 1/ns.
pub fn decay_rate(state: &EmitterCavityState, detuning_nm: f64) -> f64 {
    state.free_rate_per_ns * (1.0 + purcell_at_detuning(state, detuning_nm))
}

/// Radiative lifetime at detuning `δ` under the chosen convention, ns.
pub fn lifetime_at_detuning(
    state: &EmitterCavityState,
    detuning_nm: f64,
    convention: LifetimeConvention,
) -> f64 {
    match convention {
        LifetimeConvention::RateAdditive => 1.0 / decay_rate(state, detuning_nm),
        LifetimeConvention::LorentzianLifetime => {
            let tau_off = 1.0 / state.free_rate_per_ns;
            let tau_on = tau_off / (1.0 + state.purcell_on_resonance);
            tau_off - (tau_off - tau_on) * lorentz(detuning_nm, state.cavity_linewidth_nm)
        }
    }
}

/// `F_p = Γ_on / Γ_off − 1`.
pub fn purcell_from_rates(gamma_on: f64, gamma_off: f64) -> Result<f64, CqedError> {
    if !(gamma_on > 0.0) || !(gamma_off > 0.0) {
        return Err(domain(format!(
            "decay rates must be positive, got on = {gamma_on}, off = {gamma_off}"
        )));
    }
    Ok(gamma_on / gamma_off - 1.0)
}

/// `F_p = τ_off / τ_on − 1`.
pub fn purcell_from_lifetimes(tau_off_ns: f64, tau_on_ns: f64) -> Result<f64, CqedError> {
    if !(tau_off_ns > 0.0) || !(tau_on_ns > 0.0) {
        return Err(domain("lifetimes must be positive"));
    }
    purcell_from_rates(1.0 / tau_on_ns, 1.0 / tau_off_ns)
}

/// Fraction of emission into the cavity mode, `F_p / (1 + F_p)`.
pub fn beta_factor(purcell: f64) -> f64 {
    purcell / (1.0 + purcell)
}

/// Relative collected intensity at detuning `δ`.
///
/// Photons emitted into the cavity mode are collected `contrast` times more
/// efficiently than the rest: `I(δ) ∝ β(δ)·contrast + (1 − β(δ))`.
fn collected_intensity(state: &EmitterCavityState, detuning_nm: f64, contrast: f64) -> f64 {
    let beta = beta_factor(purcell_at_detuning(state, detuning_nm));
    beta * contrast + (1.0 - beta)
}

/// Ratio of collected intensity at `detuning_on` to that at `detuning_off`.
///
/// `outcoupling_contrast` is a calibrated device parameter (see
/// [`calibrate_outcoupling_contrast`]), not a prediction.
pub fn intensity_enhancement(
    state: &EmitterCavityState,
    detuning_on_nm: f64,
    detuning_off_nm: f64,
    outcoupling_contrast: f64,
) -> Result<f64, CqedError> {
    if !(outcoupling_contrast >= 1.0) {
        return Err(domain(format!(
            "outcoupling contrast must be >= 1, got {outcoupling_contrast}"
        )));
    }
    Ok(
        collected_intensity(state, detuning_on_nm, outcoupling_contrast)
            / collected_intensity(state, detuning_off_nm, outcoupling_contrast),
    )
}

/// Outcoupling contrast that makes [`intensity_enhancement`] equal
/// `target_ratio` for the given pair of detunings.
pub fn calibrate_outcoupling_contrast(
    state: &EmitterCavityState,
    detuning_on_nm: f64,
    detuning_off_nm: f64,
    target_ratio: f64,
) -> Result<f64, CqedError> {
    let b_on = beta_factor(purcell_at_detuning(state, detuning_on_nm));
    let b_off = beta_factor(purcell_at_detuning(state, detuning_off_nm));
    // b_on·C + 1 − b_on = r·(b_off·C + 1 − b_off)
    let denom = b_on - target_ratio * b_off;
    let numer = target_ratio * (1.0 - b_off) - (1.0 - b_on);
    let c = numer / denom;
    if !(denom > 0.0) || !(c >= 1.0) || !c.is_finite() {
        return Err(domain(format!(
            "intensity ratio {target_ratio} is not reachable with a contrast >= 1"
        )));
    }
    Ok(c)
}
