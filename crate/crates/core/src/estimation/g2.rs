//! Pulsed g²(0) from a coincidence histogram.
//!
//! The side peaks are stacked onto one period window and fitted with a
//! double Gaussian. With that shape fixed, each window's amplitude is the
//! Poisson maximum-likelihood scale `Σcounts / Σshape`, with variance
//! `A / Σshape`; g²(0) is the central amplitude over the mean side-peak
//! amplitude.

use super::lsq::{least_squares, FitData, LsqOptions, Weighting};
use super::models::{Abscissa, ModelKind, PeakModel};
use super::{FitError, FitReport};
use crate::data::CorrelationHistogram;

#[derive(Debug, Clone, PartialEq)]
pub struct G2Fit {
    /// `g2_zero`, `g2_zero_sigma`, `central_area`, `side_area_mean`.
    pub report: FitReport,
    /// Double-Gaussian shape fitted to the stacked side peaks.
    pub shape: FitReport,
    /// `(k, amplitude)` for every window, k = 0 central.
    pub window_areas: Vec<(i64, f64)>,
}

fn failure(msg: impl Into<String>) -> FitError {
    FitError::PeakDetectionFailure(msg.into())
}

pub fn fit_g2_purity(hist: &CorrelationHistogram) -> Result<G2Fit, FitError> {
    fit_g2_purity_with(hist, &LsqOptions::default())
}

/// [`fit_g2_purity`] with explicit solver options for the shape fit.
pub fn fit_g2_purity_with(
    hist: &CorrelationHistogram,
    options: &LsqOptions,
) -> Result<G2Fit, FitError> {
    let t = hist.repetition_period_ns();
    let edges = hist.bin_edges_ns();
    let counts = hist.counts();
    let w = edges[1] - edges[0];
    if edges
        .windows(2)
        .any(|e| ((e[1] - e[0]) - w).abs() > 1e-9 * w)
    {
        return Err(failure("bin widths are not uniform"));
    }
    let per = t / w;
    let bins_per_window = per.round() as usize;
    if (per - bins_per_window as f64).abs() > 1e-6 || bins_per_window < 4 {
        return Err(failure(format!(
            "period {t} ns is not a whole number of {w} ns bins"
        )));
    }
    let side = (hist.half_range_ns() / t - 0.5 + 1e-9).floor() as i64;
    if side < 3 {
        return Err(failure(format!(
            "{side} side peaks on each side, at least 3 are required"
        )));
    }

    // First bin of each window.
    let mut starts = Vec::new();
    for k in -side..=side {
        let lo = k as f64 * t - 0.5 * t;
        let i0 = ((lo - edges[0]) / w).round() as usize;
        if (edges[i0] - lo).abs() > 1e-6 * w {
            return Err(failure("bin edges are not aligned with the period windows"));
        }
        starts.push((k, i0));
    }

    let mut stacked = vec![0.0; bins_per_window];
    for &(k, i0) in &starts {
        if k != 0 {
            for (j, s) in stacked.iter_mut().enumerate() {
                *s += counts[i0 + j];
            }
        }
    }
    let total: f64 = stacked.iter().sum();
    if !(total > 0.0) {
        return Err(failure("side peaks are empty"));
    }
    let rel_edges: Vec<f64> = (0..=bins_per_window)
        .map(|j| -0.5 * t + j as f64 * w)
        .collect();
    let rel_centers: Vec<f64> = rel_edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect();
    let mean = rel_centers
        .iter()
        .zip(&stacked)
        .map(|(x, y)| x * y)
        .sum::<f64>()
        / total;
    let rms = (rel_centers
        .iter()
        .zip(&stacked)
        .map(|(x, y)| (x - mean).powi(2) * y)
        .sum::<f64>()
        / total)
        .sqrt()
        .max(w);

    let model = PeakModel::new(
        ModelKind::DoubleGaussian,
        &[0.6 * total, 0.4 * total, mean, 0.5 * rms, 1.5 * rms],
    )
    .with_bounds("area1", 0.0, f64::INFINITY)
    .with_bounds("area2", 0.0, f64::INFINITY)
    .with_bounds("center", -0.5 * t, 0.5 * t)
    .with_bounds("sigma1", 1e-3 * w, t)
    .with_bounds("sigma2", 1e-3 * w, t);
    let data = FitData::new(
        Abscissa::Bins(rel_edges.clone()),
        stacked,
        Weighting::Poisson,
    )?;
    let shape = least_squares(&model, &data, options).map_err(|e| match e {
        FitError::MaxIterations { .. } | FitError::SingularJacobian => {
            failure(format!("side-peak shape fit: {e}"))
        }
        other => other,
    })?;

    let params: Vec<f64> = ModelKind::DoubleGaussian
        .param_names()
        .iter()
        .map(|k| shape.value(k))
        .collect();
    let (profile, _) = ModelKind::DoubleGaussian.eval(&params, &Abscissa::Bins(rel_edges));
    let norm = params[0] + params[1];
    let shape_mass: f64 = profile.iter().sum::<f64>() / norm;
    if !(shape_mass > 0.0) {
        return Err(failure("fitted side-peak shape has no mass in the window"));
    }

    let mut window_areas = Vec::with_capacity(starts.len());
    let mut variances = Vec::with_capacity(starts.len());
    for &(k, i0) in &starts {
        let sum: f64 = counts[i0..i0 + bins_per_window].iter().sum();
        let a = sum / shape_mass;
        window_areas.push((k, a));
        variances.push(sum.max(1.0) / (shape_mass * shape_mass));
    }
    let n_side = (2 * side) as f64;
    let side_mean = window_areas
        .iter()
        .filter(|(k, _)| *k != 0)
        .map(|(_, a)| a)
        .sum::<f64>()
        / n_side;
    let side_var = variances
        .iter()
        .zip(&window_areas)
        .filter(|(_, (k, _))| *k != 0)
        .map(|(v, _)| v)
        .sum::<f64>()
        / (n_side * n_side);
    let (central, central_var) = window_areas
        .iter()
        .zip(&variances)
        .find(|((k, _), _)| *k == 0)
        .map(|((_, a), v)| (*a, *v))
        .unwrap_or((0.0, 0.0));
    if !(side_mean > 0.0) {
        return Err(failure("mean side-peak area is zero"));
    }
    let g2 = central / side_mean;
    let g2_sigma =
        (central_var / side_mean.powi(2) + g2 * g2 * side_var / side_mean.powi(2)).sqrt();

    let mut report = FitReport {
        model_id: "g2_double_gaussian".to_string(),
        parameters: Default::default(),
        standard_errors: Default::default(),
        residual_norm: shape.residual_norm,
        iterations: shape.iterations,
        converged: shape.converged,
    };
    report.insert("g2_zero", g2, Some(g2_sigma));
    report.insert("g2_zero_sigma", g2_sigma, None);
    report.insert("central_area", central, Some(central_var.sqrt()));
    report.insert("side_area_mean", side_mean, Some(side_var.sqrt()));
    report.insert("side_peaks", n_side, None);
    Ok(G2Fit {
        report,
        shape,
        window_areas,
    })
}
