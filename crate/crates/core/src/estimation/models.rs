//! Shipped fit models with analytic Jacobians.

use std::collections::BTreeMap;

use libm::erfc;
use nalgebra::DMatrix;

use super::FitError;
use crate::cqed::emg_bin_counts;

/// Per-parameter `(lower, upper)` bounds.
pub(crate) type Bounds = Vec<(f64, f64)>;

/// Where a model is evaluated: at sample points or integrated over bins.
#[derive(Debug, Clone, PartialEq)]
pub enum Abscissa {
    Points(Vec<f64>),
    /// Bin edges; the model is integrated over each bin.
    Bins(Vec<f64>),
}

impl Abscissa {
    pub fn len(&self) -> usize {
        match self {
            Abscissa::Points(x) => x.len(),
            Abscissa::Bins(e) => e.len().saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample points, or bin centres.
    pub fn centers(&self) -> Vec<f64> {
        match self {
            Abscissa::Points(x) => x.clone(),
            Abscissa::Bins(e) => e.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `baseline − depth / (1 + (2(x − center)/fwhm)²)`
    LorentzianDip,
    /// `baseline + height / (1 + (2(x − center)/fwhm)²)`
    LorentzianPeak,
    /// Exponential decay convolved with a Gaussian IRF, bin-integrated.
    ExpDecayIrf {
        irf_sigma_ns: f64,
    },
    /// Two concentric Gaussians; on bins the areas are exact bin masses.
    DoubleGaussian,
    Linear,
    Quadratic,
}

impl ModelKind {
    pub fn id(&self) -> &'static str {
        match self {
            ModelKind::LorentzianDip => "lorentzian_dip",
            ModelKind::LorentzianPeak => "lorentzian_peak",
            ModelKind::ExpDecayIrf { .. } => "exp_decay_irf",
            ModelKind::DoubleGaussian => "double_gaussian",
            ModelKind::Linear => "linear",
            ModelKind::Quadratic => "quadratic",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelKind::LorentzianDip => &["center", "fwhm", "depth", "baseline"],
            ModelKind::LorentzianPeak => &["center", "fwhm", "height", "baseline"],
            ModelKind::ExpDecayIrf { .. } => &["rate", "amplitude", "t0"],
            ModelKind::DoubleGaussian => &["area1", "area2", "center", "sigma1", "sigma2"],
            ModelKind::Linear => &["intercept", "slope"],
            ModelKind::Quadratic => &["intercept", "slope", "curvature"],
        }
    }

    /// Model values and the `n × p` Jacobian with respect to the parameters.
    pub fn eval(&self, p: &[f64], x: &Abscissa) -> (Vec<f64>, DMatrix<f64>) {
        let n = x.len();
        let np = self.param_names().len();
        let mut jac = DMatrix::zeros(n, np);
        let mut f = vec![0.0; n];
        match self {
            ModelKind::LorentzianDip | ModelKind::LorentzianPeak => {
                let sign = if matches!(self, ModelKind::LorentzianDip) {
                    -1.0
                } else {
                    1.0
                };
                let (c, w, h, b) = (p[0], p[1], p[2], p[3]);
                for (i, xi) in x.centers().into_iter().enumerate() {
                    let u = 2.0 * (xi - c) / w;
                    let l = 1.0 / (1.0 + u * u);
                    f[i] = b + sign * h * l;
                    jac[(i, 0)] = sign * h * 4.0 * u * l * l / w;
                    jac[(i, 1)] = sign * h * 2.0 * u * u * l * l / w;
                    jac[(i, 2)] = sign * l;
                    jac[(i, 3)] = 1.0;
                }
            }
            ModelKind::ExpDecayIrf { irf_sigma_ns } => {
                let edges = match x {
                    Abscissa::Bins(e) => e.clone(),
                    Abscissa::Points(_) => panic!("exp_decay_irf needs bin edges"),
                };
                let (counts, grads) = emg_bin_counts(&edges, p[0], p[1], p[2], *irf_sigma_ns);
                for (i, (c, g)) in counts.into_iter().zip(grads).enumerate() {
                    f[i] = c;
                    for j in 0..3 {
                        jac[(i, j)] = g[j];
                    }
                }
            }
            ModelKind::DoubleGaussian => {
                let (c, areas, sigmas) = (p[2], [p[0], p[1]], [p[3], p[4]]);
                for k in 0..2 {
                    let (a, s) = (areas[k], sigmas[k]);
                    match x {
                        Abscissa::Bins(e) => {
                            for (i, w) in e.windows(2).enumerate() {
                                let (za, zb) = ((w[0] - c) / s, (w[1] - c) / s);
                                let mass = gauss_mass(za, zb);
                                let (pa, pb) = (norm_pdf(za), norm_pdf(zb));
                                f[i] += a * mass;
                                jac[(i, k)] = mass;
                                jac[(i, 2)] += a * (pa - pb) / s;
                                jac[(i, 3 + k)] = a * (za * pa - zb * pb) / s;
                            }
                        }
                        Abscissa::Points(xs) => {
                            for (i, xi) in xs.iter().enumerate() {
                                let z = (xi - c) / s;
                                let d = norm_pdf(z) / s;
                                f[i] += a * d;
                                jac[(i, k)] = d;
                                jac[(i, 2)] += a * d * z / s;
                                jac[(i, 3 + k)] = a * d * (z * z - 1.0) / s;
                            }
                        }
                    }
                }
            }
            ModelKind::Linear | ModelKind::Quadratic => {
                for (i, xi) in x.centers().into_iter().enumerate() {
                    f[i] = p[0] + p[1] * xi;
                    jac[(i, 0)] = 1.0;
                    jac[(i, 1)] = xi;
                    if np == 3 {
                        f[i] += p[2] * xi * xi;
                        jac[(i, 2)] = xi * xi;
                    }
                }
            }
        }
        (f, jac)
    }
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn norm_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// `Φ(zb) − Φ(za)` computed on the side that avoids cancellation.
fn gauss_mass(za: f64, zb: f64) -> f64 {
    let r2 = std::f64::consts::SQRT_2;
    if za >= 0.0 {
        0.5 * (erfc(za / r2) - erfc(zb / r2))
    } else {
        0.5 * (erfc(-zb / r2) - erfc(-za / r2))
    }
}

/// A model together with its starting point and box constraints.
///
/// A parameter whose bounds coincide is held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakModel {
    pub kind: ModelKind,
    pub initial_guess: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, (f64, f64)>,
}

impl PeakModel {
    /// Unbounded model starting at `guess` (in `param_names` order).
    pub fn new(kind: ModelKind, guess: &[f64]) -> Self {
        let names = kind.param_names();
        assert_eq!(names.len(), guess.len(), "guess length for {}", kind.id());
        Self {
            kind,
            initial_guess: names
                .iter()
                .map(|n| n.to_string())
                .zip(guess.iter().copied())
                .collect(),
            bounds: BTreeMap::new(),
        }
    }

    pub fn with_bounds(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.bounds.insert(name.to_string(), (lo, hi));
        self
    }

    pub fn fixed(self, name: &str) -> Self {
        let v = self.initial_guess[name];
        self.with_bounds(name, v, v)
    }

    /// Guess and bounds in parameter order, validated.
    pub(crate) fn resolved(&self) -> Result<(Vec<f64>, Bounds), FitError> {
        let names = self.kind.param_names();
        for key in self.initial_guess.keys().chain(self.bounds.keys()) {
            if !names.contains(&key.as_str()) {
                return Err(FitError::InvalidModel(format!(
                    "{} has no parameter {key}",
                    self.kind.id()
                )));
            }
        }
        let mut guess = Vec::with_capacity(names.len());
        let mut bounds = Vec::with_capacity(names.len());
        for name in names {
            let g = *self.initial_guess.get(*name).ok_or_else(|| {
                FitError::InvalidModel(format!("missing initial guess for {name}"))
            })?;
            let (lo, hi) = self
                .bounds
                .get(*name)
                .copied()
                .unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            if !g.is_finite() || lo > hi || g < lo || g > hi {
                return Err(FitError::InvalidModel(format!(
                    "guess {name} = {g} outside bounds [{lo}, {hi}]"
                )));
            }
            guess.push(g);
            bounds.push((lo, hi));
        }
        Ok((guess, bounds))
    }
}
