//! Physical constants and unit conversions shared across modules.

/// Planck constant times speed of light, in eV·nm.
pub const HC_EV_NM: f64 = 1_239.841_984_332_002_6;

/// Ratio between a Gaussian FWHM and its standard deviation, 2·sqrt(2·ln 2).
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

/// Converts a power attenuation in dB/cm to 1/m.
///
/// Power-attenuation convention: `P(z) = P0·exp(-α z)`, so
/// `α[1/m] = α[dB/cm] · ln(10)/10 · 100`.
pub fn db_per_cm_to_per_m(alpha_db_per_cm: f64) -> f64 {
    alpha_db_per_cm * std::f64::consts::LN_10 / 10.0 * 100.0
}

/// Inverse of [`db_per_cm_to_per_m`].
pub fn per_m_to_db_per_cm(alpha_per_m: f64) -> f64 {
    alpha_per_m * 10.0 / std::f64::consts::LN_10 / 100.0
}

pub const NM: f64 = 1e-9;
pub const UM: f64 = 1e-6;
pub const CM: f64 = 1e-2;

/// Converts a rate in pm/V to nm/V.
pub fn pm_per_v_to_nm_per_v(rate: f64) -> f64 {
    rate * 1e-3
}
