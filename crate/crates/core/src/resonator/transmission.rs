//! Single-bus all-pass ring transmission.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::{CouplingState, ResonatorError, RingGeometry};
use crate::data::{Spectrum, SpectrumKind};
use crate::units::NM;

/// Power transmission of an all-pass ring at round-trip phase `phi`:
/// `(a² − 2at·cosφ + t²) / (1 − 2at·cosφ + (at)²)`.
pub fn transmission_at_phase(coupling: &CouplingState, phi: f64) -> f64 {
    let a = coupling.round_trip_amplitude;
    let t = coupling.self_coupling;
    let c = phi.cos();
    let num = a * a - 2.0 * a * t * c + t * t;
    let den = 1.0 - 2.0 * a * t * c + (a * t).powi(2);
    (num / den).clamp(0.0, 1.0)
}

fn phase(geometry: &RingGeometry, wavelength_nm: f64) -> f64 {
    2.0 * PI * geometry.optical_path_m() / (wavelength_nm * NM)
}

/// Transmission sampled at `wavelengths_nm` (strictly ascending).
///
/// Group-index dispersion is neglected, so the round-trip phase is
/// `2π·n_g·L_total/λ`. Points are evaluated in parallel; each point is an
/// independent pure computation, so results do not depend on partitioning.
pub fn transmission_spectrum(
    coupling: &CouplingState,
    geometry: &RingGeometry,
    wavelengths_nm: &[f64],
) -> Result<Spectrum, ResonatorError> {
    if wavelengths_nm.is_empty() {
        return Err(ResonatorError::EmptyGrid);
    }
    let values: Vec<f64> = wavelengths_nm
        .par_iter()
        .map(|&w| transmission_at_phase(coupling, phase(geometry, w)))
        .collect();
    Ok(Spectrum::new(
        wavelengths_nm.to_vec(),
        values,
        SpectrumKind::Transmission,
    )?)
}

/// Resonance wavelengths `n_g·L/m` inside `[lo_nm, hi_nm]`, ascending.
pub fn resonance_wavelengths_nm(geometry: &RingGeometry, lo_nm: f64, hi_nm: f64) -> Vec<f64> {
    let path_nm = geometry.optical_path_m() / NM;
    let m_hi = (path_nm / lo_nm).floor() as u64;
    let m_lo = (path_nm / hi_nm).ceil().max(1.0) as u64;
    let mut out: Vec<f64> = (m_lo..=m_hi).map(|m| path_nm / m as f64).collect();
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UM;
    use num_complex::Complex64;

    fn geometry() -> RingGeometry {
        RingGeometry::new(
            196.739_130_434_782_6 * UM,
            20.0 * UM,
            10.5 * UM,
            2.3,
            910.0 * NM,
        )
        .unwrap()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn critical_coupling_extinguishes_resonance() {
        let c = CouplingState::new(0.97, 0.97).unwrap();
        assert!(transmission_at_phase(&c, 2.0 * PI * 497.0) < 1e-20);
        let g = geometry();
        let res = resonance_wavelengths_nm(&g, 909.0, 911.0);
        let s = transmission_spectrum(&c, &g, &res).unwrap();
        assert!(s.values().iter().all(|&t| t < 1e-18));
    }

    #[test]
    fn lossless_ring_is_transparent() {
        let c = CouplingState::new(0.8, 1.0).unwrap();
        let s = transmission_spectrum(&c, &geometry(), &grid(905.0, 915.0, 2001)).unwrap();
        assert!(s.values().iter().all(|&t| (t - 1.0).abs() < 1e-12));
    }

    #[test]
    fn on_resonance_matches_round_trip_sum() {
        let (a, t) = (0.98, 0.95);
        let c = CouplingState::new(t, a).unwrap();
        for phi in [0.0, 0.3, PI] {
            // Field leaving the coupler: direct term plus every ring round trip.
            let kappa2 = 1.0 - t * t;
            let step = Complex64::from_polar(a, phi);
            let mut circulating = step;
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..10_000 {
                sum += circulating;
                circulating *= step * t;
            }
            let field = Complex64::new(t, 0.0) - kappa2 * sum;
            let oracle = field.norm_sqr();
            assert!((transmission_at_phase(&c, phi) - oracle).abs() < 1e-8);
        }
    }

    #[test]
    fn bounded_and_minima_spaced_by_fsr() {
        let g = geometry();
        let c = CouplingState::new(0.95, 0.97).unwrap();
        let s = transmission_spectrum(&c, &g, &grid(904.0, 916.0, 24_001)).unwrap();
        let v = s.values();
        assert!(v.iter().all(|&t| (0.0..=1.0).contains(&t)));
        let minima: Vec<f64> = (1..v.len() - 1)
            .filter(|&i| v[i] < v[i - 1] && v[i] < v[i + 1])
            .map(|i| s.wavelength_nm()[i])
            .collect();
        assert!(minima.len() >= 5);
        for w in minima.windows(2) {
            let local_fsr = w[0] * w[1] / (g.optical_path_m() / NM);
            assert!(((w[1] - w[0]) - local_fsr).abs() < 0.01 * local_fsr);
        }
    }

    #[test]
    fn extra_wavelength_of_path_advances_order_by_one() {
        let g = geometry();
        let res = resonance_wavelengths_nm(&g, 909.0, 912.0);
        let lambda0 = res[0];
        let longer = RingGeometry {
            total_length_m: (g.optical_path_m() + lambda0 * NM) / g.group_index,
            ..g
        };
        let path = g.optical_path_m() / NM;
        let order = (path / lambda0).round();
        let new_order = ((path + lambda0) / lambda0).round();
        assert_eq!(new_order, order + 1.0);
        let moved = resonance_wavelengths_nm(&longer, 909.0, 912.0);
        assert!(moved.iter().any(|w| (w - lambda0).abs() < 1e-9));
    }

    #[test]
    fn extinction_monotone_near_critical() {
        let a = 0.96;
        let mut last = -1.0;
        for k in 0..50 {
            let t = a - 1e-4 * k as f64;
            let c = CouplingState::new(t, a).unwrap();
            let tmin = transmission_at_phase(&c, 0.0);
            assert!(tmin > last || k == 0);
            last = tmin;
        }
    }

    #[test]
    fn empty_grid_is_an_error() {
        let c = CouplingState::new(0.9, 0.9).unwrap();
        assert_eq!(
            transmission_spectrum(&c, &geometry(), &[]),
            Err(ResonatorError::EmptyGrid)
        );
    }
}
