//! Time-resolved photoluminescence: a mono-exponential decay starting at
//! `t0`, convolved with a Gaussian instrument response, integrated over
//! histogram bins.

use libm::erfc;

use super::noise::poisson_counts;
use super::{decay_rate, domain, CqedError, EmitterCavityState};
use crate::data::DecayHistogram;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn norm_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Mills ratio `Φ(z)/φ(z)` for `z <= -10`, by continued fraction.
fn mills_ratio_neg(z: f64) -> f64 {
    let x = -z;
    let mut acc = x;
    for k in (1..=120).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

/// `exp(−Γx + Γ²σ²/2) · Φ(x/σ − Γσ)`, evaluated without overflow.
fn e_phi(x: f64, rate: f64, sigma: f64) -> f64 {
    let z = x / sigma - rate * sigma;
    if z > -10.0 {
        (-rate * x + 0.5 * (rate * sigma).powi(2)).exp() * norm_cdf(z)
    } else {
        // E·φ(z) = φ(x/σ)
        norm_pdf(x / sigma) * mills_ratio_neg(z)
    }
}

/// Unit-area decay density at time `x` after onset.
pub fn emg_density(x: f64, rate: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if x < 0.0 {
            0.0
        } else {
            rate * (-rate * x).exp()
        };
    }
    rate * e_phi(x, rate, sigma)
}

/// Cumulative distribution of [`emg_density`].
pub fn emg_cdf(x: f64, rate: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if x <= 0.0 { 0.0 } else { -(-rate * x).exp_m1() };
    }
    norm_cdf(x / sigma) - e_phi(x, rate, sigma)
}

/// Survival function `1 − F(x)`, accurate in the tail.
fn emg_sf(x: f64, rate: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if x <= 0.0 { 1.0 } else { (-rate * x).exp() };
    }
    norm_cdf(-x / sigma) + e_phi(x, rate, sigma)
}

/// `∂F/∂Γ` at fixed `x`.
fn emg_cdf_drate(x: f64, rate: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if x <= 0.0 { 0.0 } else { x * (-rate * x).exp() };
    }
    (x - rate * sigma * sigma) * e_phi(x, rate, sigma) + sigma * norm_pdf(x / sigma)
}

/// Probability mass in `[a, b)` measured from onset.
fn emg_mass(a: f64, b: f64, rate: f64, sigma: f64) -> f64 {
    if a >= 0.0 {
        emg_sf(a, rate, sigma) - emg_sf(b, rate, sigma)
    } else {
        emg_cdf(b, rate, sigma) - emg_cdf(a, rate, sigma)
    }
}

/// Expected counts per bin and their gradient with respect to
/// `(rate, amplitude, t0)`.
///
/// The noiseless signal is `amplitude·exp(−rate·(t − t0))` for `t >= t0`
/// convolved with a Gaussian of width `sigma`; its area is
/// `amplitude / rate`.
pub fn emg_bin_counts(
    edges: &[f64],
    rate: f64,
    amplitude: f64,
    t0: f64,
    sigma: f64,
) -> (Vec<f64>, Vec<[f64; 3]>) {
    let area = amplitude / rate;
    let mut counts = Vec::with_capacity(edges.len().saturating_sub(1));
    let mut grads = Vec::with_capacity(counts.capacity());
    for w in edges.windows(2) {
        let (a, b) = (w[0] - t0, w[1] - t0);
        let mass = emg_mass(a, b, rate, sigma);
        let dmass_drate = emg_cdf_drate(b, rate, sigma) - emg_cdf_drate(a, rate, sigma);
        let dmass_dt0 = emg_density(a, rate, sigma) - emg_density(b, rate, sigma);
        counts.push(area * mass);
        grads.push([
            area * dmass_drate - area / rate * mass,
            mass / rate,
            area * dmass_dt0,
        ]);
    }
    (counts, grads)
}

/// Shape of a synthetic decay histogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySynthesis {
    /// Peak count rate of the unconvolved decay, counts per ns.
    pub amplitude_per_ns: f64,
    /// Decay onset, ns.
    pub onset_ns: f64,
    /// Gaussian instrument-response sigma, ns.
    pub irf_sigma_ns: f64,
}

/// Decay histogram for the emitter at `detuning_nm` on the given bin edges.
/// With a seed, each bin is replaced by a Poisson draw.
pub fn synthesize_decay(
    state: &EmitterCavityState,
    detuning_nm: f64,
    edges_ns: &[f64],
    shape: &DecaySynthesis,
    noise_seed: Option<u64>,
) -> Result<DecayHistogram, CqedError> {
    if !(shape.amplitude_per_ns >= 0.0) || !shape.amplitude_per_ns.is_finite() {
        return Err(domain("decay amplitude must be finite and >= 0"));
    }
    if !(shape.irf_sigma_ns >= 0.0) || !shape.irf_sigma_ns.is_finite() {
        return Err(domain("IRF sigma must be finite and >= 0"));
    }
    if !shape.onset_ns.is_finite() {
        return Err(domain("onset must be finite"));
    }
    let rate = decay_rate(state, detuning_nm);
    let (expected, _) = emg_bin_counts(
        edges_ns,
        rate,
        shape.amplitude_per_ns,
        shape.onset_ns,
        shape.irf_sigma_ns,
    );
    let counts = match noise_seed {
        Some(seed) => poisson_counts(&expected, seed),
        None => expected,
    };
    Ok(DecayHistogram::new(
        edges_ns.to_vec(),
        counts,
        shape.irf_sigma_ns,
    )?)
}
