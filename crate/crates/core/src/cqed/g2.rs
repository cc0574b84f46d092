//! Pulsed second-order correlation histograms.
//!
//! Each coincidence peak is a two-sided exponential `exp(−|τ − kT|/τ_r)`
//! truncated to its own period window `[kT − T/2, kT + T/2)` and scaled so
//! its area is exact. The central peak carries `g2_zero` times the side
//! peak area.

use super::noise::poisson_counts;
use super::{domain, CqedError};
use crate::data::{uniform_edges, CorrelationHistogram};

/// Parameters of a synthetic g² measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Synthesis {
    /// Central-to-side area ratio.
    pub g2_zero: f64,
    pub lifetime_ns: f64,
    pub repetition_ns: f64,
    /// Number of side peaks on each side of zero delay.
    pub side_peaks: usize,
    /// Expected counts in one side peak.
    pub side_peak_counts: f64,
    pub bins_per_period: usize,
}

impl G2Synthesis {
    pub fn validate(&self) -> Result<(), CqedError> {
        if !(0.0..=1.0).contains(&self.g2_zero) {
            return Err(domain(format!(
                "g2(0) must lie in [0, 1], got {}",
                self.g2_zero
            )));
        }
        if !(self.lifetime_ns > 0.0) || !(self.repetition_ns > 0.0) {
            return Err(domain("lifetime and repetition period must be positive"));
        }
        if self.lifetime_ns >= self.repetition_ns / 4.0 {
            return Err(CqedError::PeakOverlap {
                lifetime_ns: self.lifetime_ns,
                repetition_ns: self.repetition_ns,
            });
        }
        if self.side_peaks == 0 {
            return Err(domain("at least one side peak is required"));
        }
        if self.bins_per_period < 2 {
            return Err(domain("at least two bins per period are required"));
        }
        if !(self.side_peak_counts >= 0.0) || !self.side_peak_counts.is_finite() {
            return Err(domain("side-peak counts must be finite and >= 0"));
        }
        Ok(())
    }

    /// Bin edges spanning `±(side_peaks + ½)·T`, aligned to the windows.
    pub fn bin_edges(&self) -> Vec<f64> {
        let n_windows = 2 * self.side_peaks + 1;
        let width = self.repetition_ns / self.bins_per_period as f64;
        let start = -(self.side_peaks as f64 + 0.5) * self.repetition_ns;
        uniform_edges(start, width, n_windows * self.bins_per_period)
    }
}

/// Cumulative fraction of one truncated peak between the left window edge
/// and offset `u` from its centre. `u` is clamped to the window.
pub fn window_peak_cdf(u: f64, lifetime_ns: f64, repetition_ns: f64) -> f64 {
    let h = 0.5 * repetition_ns;
    let u = u.clamp(-h, h);
    let norm = -(-h / lifetime_ns).exp_m1();
    if u < 0.0 {
        0.5 * ((u / lifetime_ns).exp() - (-h / lifetime_ns).exp()) / norm
    } else {
        0.5 + 0.5 * (-(-u / lifetime_ns).exp_m1()) / norm
    }
}

/// Builds the histogram, optionally with Poisson noise.
pub fn synthesize_g2(
    params: &G2Synthesis,
    noise_seed: Option<u64>,
) -> Result<CorrelationHistogram, CqedError> {
    params.validate()?;
    let edges = params.bin_edges();
    let t = params.repetition_ns;
    let n = params.side_peaks as i64;
    let expected: Vec<f64> = edges
        .windows(2)
        .map(|w| {
            // Only the window containing the bin contributes; sum over all
            // anyway so misaligned edges stay correct.
            (-n..=n)
                .map(|k| {
                    let area = if k == 0 {
                        params.g2_zero * params.side_peak_counts
                    } else {
                        params.side_peak_counts
                    };
                    let c = k as f64 * t;
                    area * (window_peak_cdf(w[1] - c, params.lifetime_ns, t)
                        - window_peak_cdf(w[0] - c, params.lifetime_ns, t))
                })
                .sum()
        })
        .collect();
    let counts = match noise_seed {
        Some(seed) => poisson_counts(&expected, seed),
        None => expected,
    };
    Ok(CorrelationHistogram::new(edges, counts, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> G2Synthesis {
        G2Synthesis {
            g2_zero: 0.078,
            lifetime_ns: 0.55,
            repetition_ns: 12.5,
            side_peaks: 4,
            side_peak_counts: 1000.0,
            bins_per_period: 50,
        }
    }

    fn window_area(h: &CorrelationHistogram, k: i64) -> f64 {
        let t = h.repetition_period_ns();
        h.bin_centers_ns()
            .iter()
            .zip(h.counts())
            .filter(|(c, _)| ((**c / t).round() as i64) == k)
            .map(|(_, n)| n)
            .sum()
    }

    #[test]
    fn peak_cdf_limits() {
        assert_eq!(window_peak_cdf(-10.0, 0.5, 12.5), 0.0);
        assert!((window_peak_cdf(10.0, 0.5, 12.5) - 1.0).abs() < 1e-15);
        assert!((window_peak_cdf(0.0, 0.5, 12.5) - 0.5).abs() < 1e-15);
        // Density check against exp(−|u|/τ) / (2τ·norm).
        let (tau, t): (f64, f64) = (0.5, 12.5);
        let norm = 1.0 - (-t / 2.0 / tau).exp();
        let u: f64 = 0.3;
        let d = (window_peak_cdf(u + 1e-6, tau, t) - window_peak_cdf(u - 1e-6, tau, t)) / 2e-6;
        assert!((d - (-u / tau).exp() / (2.0 * tau * norm)).abs() < 1e-6);
    }

    #[test]
    fn areas_are_exact() {
        let h = synthesize_g2(&params(), None).unwrap();
        for k in 1..=4 {
            assert!((window_area(&h, k) - 1000.0).abs() < 1e-9);
            assert!((window_area(&h, -k) - 1000.0).abs() < 1e-9);
        }
        assert!((window_area(&h, 0) - 78.0).abs() < 1e-9);
        assert_eq!(h.len(), 9 * 50);
    }

    #[test]
    fn noiseless_histogram_is_symmetric() {
        let h = synthesize_g2(&params(), None).unwrap();
        let c = h.counts();
        let n = c.len();
        for i in 0..n / 2 {
            assert!((c[i] - c[n - 1 - i]).abs() <= 1e-9 * c[i].max(1e-12), "{i}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = params();
        assert!(matches!(
            synthesize_g2(
                &G2Synthesis {
                    lifetime_ns: 3.2,
                    ..p
                },
                None
            ),
            Err(CqedError::PeakOverlap { .. })
        ));
        assert!(synthesize_g2(&G2Synthesis { g2_zero: 1.2, ..p }, None).is_err());
        assert!(synthesize_g2(&G2Synthesis { side_peaks: 0, ..p }, None).is_err());
    }

    #[test]
    fn noise_is_reproducible() {
        let a = synthesize_g2(&params(), Some(11)).unwrap();
        let b = synthesize_g2(&params(), Some(11)).unwrap();
        assert_eq!(a.counts(), b.counts());
    }
}
