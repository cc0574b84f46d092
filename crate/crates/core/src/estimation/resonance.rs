//! Resonance-dip extraction from transmission spectra.
//!
//! Dips are located as runs of at least three samples below
//! `median − 3·noise` (or one sample below `median − 6·noise`), where the
//! noise is the MAD of first differences. Each dip is seeded from its
//! minimum and a half-depth width scan, then fitted with a Lorentzian in a
//! window of ±3 seeded widths.

use super::lsq::{least_squares, FitData, LsqOptions};
use super::models::{Abscissa, ModelKind, PeakModel};
use super::{median, FitError, FitReport};
use crate::data::Spectrum;

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceFit {
    /// One report per dip, ascending in wavelength, with keys `center_nm`,
    /// `fwhm_nm`, `depth`, `baseline`, `q_factor` and `extinction`
    /// (fractional depth).
    pub dips: Vec<FitReport>,
    /// Mean spacing of adjacent dip centres, when there are at least two.
    pub fsr_nm: Option<f64>,
}

impl ResonanceFit {
    /// Flattened report: the first dip's parameters plus the FSR and dip
    /// count.
    pub fn summary(&self) -> FitReport {
        let mut r = self.dips[0].clone();
        r.model_id = "resonance".to_string();
        r.parameters
            .insert("dip_count".to_string(), self.dips.len() as f64);
        if let Some(fsr) = self.fsr_nm {
            r.parameters.insert("fsr_nm".to_string(), fsr);
        }
        r
    }
}

fn noise_floor(values: &[f64]) -> f64 {
    if values.len() < 3 {
        return 0.0;
    }
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let m = median(&diffs);
    let dev: Vec<f64> = diffs.iter().map(|d| (d - m).abs()).collect();
    1.4826 * median(&dev) / std::f64::consts::SQRT_2
}

/// Indices of dip minima.
fn find_dips(values: &[f64], baseline: f64, noise: f64) -> Vec<usize> {
    let tiny = 1e-9 * baseline.abs().max(f64::MIN_POSITIVE);
    let level = baseline - (3.0 * noise).max(tiny);
    let strong = baseline - (6.0 * noise).max(tiny);
    let mut dips = Vec::new();
    let mut i = 0;
    while i < values.len() {
        if values[i] >= level {
            i += 1;
            continue;
        }
        let start = i;
        while i < values.len() && values[i] < level {
            i += 1;
        }
        let run = &values[start..i];
        let (k, min) =
            run.iter().enumerate().fold(
                (0, f64::INFINITY),
                |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc },
            );
        if run.len() >= 3 || min < strong {
            dips.push(start + k);
        }
    }
    dips
}

/// Width at half depth, linearly interpolated on each side.
fn half_width_scan(x: &[f64], y: &[f64], idx: usize, baseline: f64) -> Option<f64> {
    let half = 0.5 * (baseline + y[idx]);
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = idx;
        for j in range {
            if y[j] >= half {
                let t = (half - y[prev]) / (y[j] - y[prev]);
                return Some(x[prev] + t * (x[j] - x[prev]));
            }
            prev = j;
        }
        None
    };
    let left = cross(&mut (0..idx).rev());
    let right = cross(&mut (idx + 1..x.len()));
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[idx] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[idx])),
        (None, None) => None,
    }
}

/// Fits every resonance dip in `spectrum`.
pub fn fit_resonance(spectrum: &Spectrum) -> Result<ResonanceFit, FitError> {
    fit_resonance_with(spectrum, &LsqOptions::default())
}

/// [`fit_resonance`] with explicit solver options.
pub fn fit_resonance_with(
    spectrum: &Spectrum,
    options: &LsqOptions,
) -> Result<ResonanceFit, FitError> {
    let x = spectrum.wavelength_nm();
    let y = spectrum.values();
    let baseline = median(y);
    let noise = noise_floor(y);
    let minima = find_dips(y, baseline, noise);
    if minima.is_empty() {
        return Err(FitError::NoResonanceFound);
    }
    let all = FitData::from_spectrum(spectrum);
    let mut dips = Vec::with_capacity(minima.len());
    for (n, &idx) in minima.iter().enumerate() {
        let spacing = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
        let width = half_width_scan(x, y, idx, baseline)
            .unwrap_or(3.0 * spacing)
            .max(spacing);
        let mut lo_x = x[idx] - 3.0 * width;
        let mut hi_x = x[idx] + 3.0 * width;
        if n > 0 {
            lo_x = lo_x.max(0.5 * (x[minima[n - 1]] + x[idx]));
        }
        if n + 1 < minima.len() {
            hi_x = hi_x.min(0.5 * (x[idx] + x[minima[n + 1]]));
        }
        let mut lo = x.partition_point(|v| *v < lo_x);
        let mut hi = x.partition_point(|v| *v <= hi_x);
        while hi - lo < 8 && (lo > 0 || hi < x.len()) {
            lo = lo.saturating_sub(1);
            hi = (hi + 1).min(x.len());
        }
        let (wx, wy) = (&x[lo..hi], &y[lo..hi]);
        let data = FitData::new(Abscissa::Points(wx.to_vec()), wy.to_vec(), all.weighting)?;
        let depth0 = (baseline - y[idx]).max(0.0);
        let model = PeakModel::new(ModelKind::LorentzianDip, &[x[idx], width, depth0, baseline])
            .with_bounds("center", wx[0], wx[wx.len() - 1])
            .with_bounds("fwhm", 1e-3 * spacing, 4.0 * (wx[wx.len() - 1] - wx[0]))
            .with_bounds("depth", 0.0, f64::INFINITY);
        let fit = least_squares(&model, &data, options)?;
        dips.push(dip_report(&fit));
    }
    // A dip cut by the end of the scan has a biased width and centre; keep
    // it only when nothing else was found.
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let complete = |d: &FitReport| {
        let (c, w) = (d.value("center_nm"), d.value("fwhm_nm"));
        c - w >= x0 && c + w <= x1
    };
    if dips.iter().any(complete) {
        dips.retain(complete);
    }
    let fsr_nm = (dips.len() >= 2).then(|| {
        let first = dips[0].value("center_nm");
        let last = dips[dips.len() - 1].value("center_nm");
        (last - first) / (dips.len() - 1) as f64
    });
    Ok(ResonanceFit { dips, fsr_nm })
}

fn dip_report(fit: &FitReport) -> FitReport {
    let (c, w) = (fit.value("center"), fit.value("fwhm"));
    let (d, b) = (fit.value("depth"), fit.value("baseline"));
    let s = |k: &str| fit.sigma(k);
    let q = c / w;
    let q_sigma = match (s("center"), s("fwhm")) {
        (Some(sc), Some(sw)) => Some(q * ((sc / c).powi(2) + (sw / w).powi(2)).sqrt()),
        _ => None,
    };
    let ext_sigma = match (s("depth"), s("baseline")) {
        (Some(sd), Some(sb)) => Some((d / b).abs() * ((sd / d).powi(2) + (sb / b).powi(2)).sqrt()),
        _ => None,
    };
    let mut r = FitReport {
        model_id: "lorentzian_dip".to_string(),
        parameters: Default::default(),
        standard_errors: Default::default(),
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
        converged: fit.converged,
    };
    r.insert("center_nm", c, s("center"));
    r.insert("fwhm_nm", w, s("fwhm"));
    r.insert("depth", d, s("depth"));
    r.insert("baseline", b, s("baseline"));
    r.insert("q_factor", q, q_sigma);
    r.insert("extinction", d / b, ext_sigma);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SpectrumKind;

    fn lorentz_spectrum(centers: &[f64], fwhm: f64, lo: f64, hi: f64, n: usize) -> Spectrum {
        let x: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let y = x
            .iter()
            .map(|v| {
                1.0 - centers
                    .iter()
                    .map(|c| 0.95 / (1.0 + (2.0 * (v - c) / fwhm).powi(2)))
                    .sum::<f64>()
            })
            .collect();
        Spectrum::new(x, y, SpectrumKind::Transmission).unwrap()
    }

    #[test]
    fn single_dip_q() {
        let s = lorentz_spectrum(&[910.0], 0.0479, 909.5, 910.5, 2001);
        let f = fit_resonance(&s).unwrap();
        assert_eq!(f.dips.len(), 1);
        let q = f.dips[0].value("q_factor");
        assert!((q - 910.0 / 0.0479).abs() / q < 1e-3, "{q}");
        assert!(f.fsr_nm.is_none());
    }

    #[test]
    fn two_dips_give_fsr() {
        let s = lorentz_spectrum(&[909.0, 910.83], 0.0479, 908.5, 911.5, 6001);
        let f = fit_resonance(&s).unwrap();
        assert_eq!(f.dips.len(), 2);
        assert!((f.fsr_nm.unwrap() - 1.83).abs() < 1e-3);
    }

    #[test]
    fn dip_cut_by_scan_edge_is_dropped() {
        let s = lorentz_spectrum(&[909.0, 910.83, 912.66], 0.0479, 908.5, 912.67, 8001);
        let f = fit_resonance(&s).unwrap();
        assert_eq!(f.dips.len(), 2);
        assert!((f.fsr_nm.unwrap() - 1.83).abs() < 1e-3);
        // Alone, a truncated dip is still reported.
        let s = lorentz_spectrum(&[910.0], 0.0479, 909.5, 910.01, 1001);
        assert_eq!(fit_resonance(&s).unwrap().dips.len(), 1);
    }

    #[test]
    fn flat_spectrum_has_no_dip() {
        let x: Vec<f64> = (0..500).map(|i| 900.0 + 0.01 * i as f64).collect();
        let s = Spectrum::new(x, vec![1.0; 500], SpectrumKind::Transmission).unwrap();
        assert!(matches!(fit_resonance(&s), Err(FitError::NoResonanceFound)));
    }

    #[test]
    fn shifting_the_axis_moves_only_centres() {
        let s = lorentz_spectrum(&[909.0, 910.83], 0.0479, 908.5, 911.5, 3001);
        let a = fit_resonance(&s).unwrap();
        let b = fit_resonance(&s.shifted(0.125)).unwrap();
        for (da, db) in a.dips.iter().zip(&b.dips) {
            assert!((db.value("center_nm") - da.value("center_nm") - 0.125).abs() < 1e-10);
            assert!((db.value("fwhm_nm") - da.value("fwhm_nm")).abs() < 1e-10);
        }
    }
}
