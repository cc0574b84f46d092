//! Lifetime versus detuning.
//!
//! Under the rate-additive convention the rates `1/τ` are fitted with a
//! Lorentzian peak on top of `Γ_free`; under the Lorentzian-lifetime
//! convention the lifetimes themselves are fitted with a Lorentzian dip.

use super::lsq::{least_squares, FitData, LsqOptions, Weighting};
use super::models::{Abscissa, ModelKind, PeakModel};
use super::{FitError, FitReport};
use crate::cqed::LifetimeConvention;

/// Fits `(detuning nm, lifetime ns)` pairs. The report carries
/// `purcell_on_resonance`, `linewidth_nm`, `free_rate_per_ns` and
/// `center_nm`.
pub fn fit_lifetime_detuning(
    points: &[(f64, f64)],
    convention: LifetimeConvention,
) -> Result<FitReport, FitError> {
    if points.len() < 5 {
        return Err(FitError::InsufficientData {
            needed: 5,
            got: points.len(),
        });
    }
    if points.iter().any(|(d, t)| !d.is_finite() || !(*t > 0.0)) {
        return Err(FitError::InvalidModel(
            "lifetimes must be positive and finite".into(),
        ));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    if x[0] == x[x.len() - 1] {
        return Err(FitError::DegenerateAbscissa);
    }
    let (kind, y): (ModelKind, Vec<f64>) = match convention {
        LifetimeConvention::RateAdditive => (
            ModelKind::LorentzianPeak,
            pts.iter().map(|p| 1.0 / p.1).collect(),
        ),
        LifetimeConvention::LorentzianLifetime => {
            (ModelKind::LorentzianDip, pts.iter().map(|p| p.1).collect())
        }
    };
    let sign = if kind == ModelKind::LorentzianPeak {
        1.0
    } else {
        -1.0
    };
    let extreme = (0..y.len()).fold(0, |b, i| if sign * y[i] > sign * y[b] { i } else { b });
    let baseline = if (x[0] - x[extreme]).abs() > (x[x.len() - 1] - x[extreme]).abs() {
        y[0]
    } else {
        y[y.len() - 1]
    };
    let height = (y[extreme] - baseline).abs();
    let half = baseline + sign * 0.5 * height;
    let inside = |v: f64| sign * (v - half) > 0.0;
    let lo = (0..=extreme)
        .rev()
        .find(|&i| !inside(y[i]))
        .map(|i| x[i])
        .unwrap_or(x[0]);
    let hi = (extreme..y.len())
        .find(|&i| !inside(y[i]))
        .map(|i| x[i])
        .unwrap_or(x[x.len() - 1]);
    let span = x[x.len() - 1] - x[0];
    let fwhm = (hi - lo).max(1e-3 * span);

    let h_name = kind.param_names()[2];
    let model = PeakModel::new(kind, &[x[extreme], fwhm, height, baseline])
        .with_bounds("fwhm", 1e-6 * span, 10.0 * span)
        .with_bounds(h_name, 0.0, f64::INFINITY)
        .with_bounds("baseline", 0.0, f64::INFINITY);
    let data = FitData::new(Abscissa::Points(x), y, Weighting::Uniform)?;
    let fit = least_squares(&model, &data, &LsqOptions::default())?;

    let (b, h) = (fit.value("baseline"), fit.value(h_name));
    let (purcell, free_rate) = match convention {
        LifetimeConvention::RateAdditive => (h / b, b),
        LifetimeConvention::LorentzianLifetime => (b / (b - h) - 1.0, 1.0 / b),
    };
    let mut r = FitReport {
        model_id: format!("lifetime_detuning/{}", kind.id()),
        parameters: Default::default(),
        standard_errors: Default::default(),
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
        converged: fit.converged,
    };
    r.insert("center_nm", fit.value("center"), fit.sigma("center"));
    r.insert("linewidth_nm", fit.value("fwhm"), fit.sigma("fwhm"));
    r.insert("purcell_on_resonance", purcell, None);
    r.insert("free_rate_per_ns", free_rate, None);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqed::{lifetime_at_detuning, EmitterCavityState};

    #[test]
    fn both_conventions_recover_their_own_data() {
        let s = EmitterCavityState::new(910.0, 910.0, 0.0479, 3.52, 0.42).unwrap();
        for conv in [
            LifetimeConvention::RateAdditive,
            LifetimeConvention::LorentzianLifetime,
        ] {
            let pts: Vec<(f64, f64)> = (0..41)
                .map(|i| {
                    let d = -0.4 + 0.02 * i as f64;
                    (d, lifetime_at_detuning(&s, d, conv))
                })
                .collect();
            let r = fit_lifetime_detuning(&pts, conv).unwrap();
            assert!(
                (r.value("purcell_on_resonance") - 3.52).abs() < 1e-8,
                "{conv:?}"
            );
            assert!((r.value("linewidth_nm") - 0.0479).abs() < 1e-10);
            assert!((r.value("free_rate_per_ns") - 0.42).abs() < 1e-10);
            assert!(r.value("center_nm").abs() < 1e-10);
        }
    }
}
