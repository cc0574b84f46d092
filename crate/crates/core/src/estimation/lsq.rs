//! Bounded Levenberg–Marquardt.
//!
//! Steps solve `(JᵀJ + μ·D) δ = −Jᵀr` with `D` the running maximum of
//! `diag(JᵀJ)` and are projected onto the parameter box. The damping `μ`
//! follows Nielsen's gain-ratio update. Convergence is declared on the
//! scaled gradient cosine (`gtol`), the step size (`xtol`) or the relative
//! cost reduction (`ftol`).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::models::{Abscissa, PeakModel};
use super::{FitError, FitReport};
use crate::data::{DecayHistogram, Spectrum, SpectrumKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weighting {
    /// Equal weights; the covariance is scaled by the reduced χ².
    Uniform,
    /// Count data: variance `max(counts, 1)`.
    Poisson,
}

/// Observations to fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitData {
    pub abscissa: Abscissa,
    pub values: Vec<f64>,
    pub weighting: Weighting,
    /// Per-point variances that replace the ones implied by `weighting`.
    /// The covariance is then left unscaled.
    pub variance: Option<Vec<f64>>,
}

impl FitData {
    pub fn new(
        abscissa: Abscissa,
        values: Vec<f64>,
        weighting: Weighting,
    ) -> Result<Self, FitError> {
        if abscissa.len() != values.len() {
            return Err(FitError::InvalidModel(format!(
                "{} abscissa entries for {} values",
                abscissa.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(FitError::Data(crate::data::DataError::NonFinite { index }));
        }
        Ok(Self {
            abscissa,
            values,
            weighting,
            variance: None,
        })
    }

    /// Uses explicit variances, which must be positive and finite.
    pub fn with_variance(mut self, variance: Vec<f64>) -> Result<Self, FitError> {
        if variance.len() != self.values.len() {
            return Err(FitError::InvalidModel(format!(
                "{} variances for {} values",
                variance.len(),
                self.values.len()
            )));
        }
        if let Some(index) = variance.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(FitError::InvalidModel(format!(
                "variance[{index}] must be positive and finite"
            )));
        }
        self.variance = Some(variance);
        Ok(self)
    }

    /// Transmission spectra get uniform weights, count spectra Poisson.
    pub fn from_spectrum(s: &Spectrum) -> Self {
        let weighting = match s.kind() {
            SpectrumKind::Transmission => Weighting::Uniform,
            SpectrumKind::Counts => Weighting::Poisson,
        };
        Self {
            abscissa: Abscissa::Points(s.wavelength_nm().to_vec()),
            values: s.values().to_vec(),
            weighting,
            variance: None,
        }
    }

    pub fn from_decay(h: &DecayHistogram) -> Self {
        Self {
            abscissa: Abscissa::Bins(h.bin_edges_ns().to_vec()),
            values: h.counts().to_vec(),
            weighting: Weighting::Poisson,
            variance: None,
        }
    }

    fn sqrt_weights(&self) -> Vec<f64> {
        if let Some(v) = &self.variance {
            return v.iter().map(|v| 1.0 / v.sqrt()).collect();
        }
        match self.weighting {
            Weighting::Uniform => vec![1.0; self.values.len()],
            Weighting::Poisson => self
                .values
                .iter()
                .map(|y| 1.0 / y.max(1.0).sqrt())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    pub gtol: f64,
    pub xtol: f64,
    pub ftol: f64,
    /// Number of starting points; extra starts are seeded jitters of the
    /// initial guess and the lowest-cost converged result wins.
    pub starts: usize,
    pub start_seed: u64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gtol: 1e-10,
            xtol: 1e-13,
            ftol: 1e-15,
            starts: 1,
            start_seed: 0,
        }
    }
}

struct Problem<'a> {
    model: &'a PeakModel,
    data: &'a FitData,
    sqrt_w: Vec<f64>,
    free: Vec<usize>,
    bounds: Vec<(f64, f64)>,
}

struct State {
    p: Vec<f64>,
    r: DVector<f64>,
    j: DMatrix<f64>,
    cost: f64,
}

impl Problem<'_> {
    /// Weighted residuals `√w·(f − y)` and their Jacobian in the free
    /// parameters.
    fn evaluate(&self, p: Vec<f64>) -> State {
        let (f, jac) = self.model.kind.eval(&p, &self.data.abscissa);
        let n = f.len();
        let r = DVector::from_iterator(
            n,
            (0..n).map(|i| self.sqrt_w[i] * (f[i] - self.data.values[i])),
        );
        let mut j = DMatrix::zeros(n, self.free.len());
        for (col, &k) in self.free.iter().enumerate() {
            for i in 0..n {
                j[(i, col)] = self.sqrt_w[i] * jac[(i, k)];
            }
        }
        let cost = 0.5 * r.norm_squared();
        State { p, r, j, cost }
    }

    fn project(&self, p: &mut [f64]) {
        for (v, (lo, hi)) in p.iter_mut().zip(&self.bounds) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Gradient with components that push into an active bound removed.
    fn projected_gradient(&self, s: &State) -> DVector<f64> {
        let mut g = s.j.transpose() * &s.r;
        for (col, &k) in self.free.iter().enumerate() {
            let (lo, hi) = self.bounds[k];
            if (s.p[k] <= lo && g[col] > 0.0) || (s.p[k] >= hi && g[col] < 0.0) {
                g[col] = 0.0;
            }
        }
        g
    }

    fn gradient_cosine(&self, s: &State, g: &DVector<f64>) -> f64 {
        let rn = s.r.norm();
        if rn == 0.0 {
            return 0.0;
        }
        (0..g.len())
            .map(|c| {
                let cn = s.j.column(c).norm();
                if cn == 0.0 {
                    0.0
                } else {
                    g[c].abs() / (cn * rn)
                }
            })
            .fold(0.0, f64::max)
    }

    fn run(&self, start: Vec<f64>, opt: &LsqOptions) -> (State, usize, bool) {
        let mut s = self.evaluate(start);
        let m = self.free.len();
        let mut a = s.j.transpose() * &s.j;
        let mut d: Vec<f64> = (0..m).map(|i| a[(i, i)].max(f64::MIN_POSITIVE)).collect();
        let mut mu = 1e-3;
        let mut nu = 2.0;
        let mut iterations = 0;
        loop {
            let g = self.projected_gradient(&s);
            if s.cost == 0.0 || self.gradient_cosine(&s, &g) <= opt.gtol {
                return (s, iterations, true);
            }
            if iterations >= opt.max_iterations {
                return (s, iterations, false);
            }
            iterations += 1;
            let full_g = s.j.transpose() * &s.r;
            // Parameters pinned at a bound by the gradient sit out this step.
            let pinned: Vec<bool> = (0..m).map(|c| g[c] == 0.0 && full_g[c] != 0.0).collect();
            let mut lhs = a.clone();
            let mut rhs = -&full_g;
            for i in 0..m {
                lhs[(i, i)] += mu * d[i];
                if pinned[i] {
                    lhs.row_mut(i).fill(0.0);
                    lhs.column_mut(i).fill(0.0);
                    lhs[(i, i)] = 1.0;
                    rhs[i] = 0.0;
                }
            }
            let Some(chol) = lhs.cholesky() else {
                mu *= nu;
                nu *= 2.0;
                continue;
            };
            let delta = chol.solve(&rhs);
            let mut p_new = s.p.clone();
            for (col, &k) in self.free.iter().enumerate() {
                p_new[k] += delta[col];
            }
            self.project(&mut p_new);
            let step = DVector::from_iterator(m, self.free.iter().map(|&k| p_new[k] - s.p[k]));
            let pnorm = self
                .free
                .iter()
                .map(|&k| s.p[k] * s.p[k])
                .sum::<f64>()
                .sqrt();
            if step.norm() <= opt.xtol * (pnorm + opt.xtol) {
                return (s, iterations, true);
            }
            let predicted = -(full_g.dot(&step) + 0.5 * step.dot(&(&a * &step)));
            let trial = self.evaluate(p_new);
            let actual = s.cost - trial.cost;
            let rho = if predicted > 0.0 {
                actual / predicted
            } else {
                -1.0
            };
            if actual > 0.0 && rho > 0.0 {
                let small = actual <= opt.ftol * s.cost && predicted <= opt.ftol * s.cost;
                s = trial;
                a = s.j.transpose() * &s.j;
                for i in 0..m {
                    d[i] = d[i].max(a[(i, i)]);
                }
                mu *= (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0);
                nu = 2.0;
                if small {
                    return (s, iterations, true);
                }
            } else {
                mu *= nu;
                nu *= 2.0;
                if mu > 1e32 {
                    // No downhill step exists at machine precision.
                    return (s, iterations, true);
                }
            }
        }
    }
}

/// Fits `model` to `data`.
///
/// Standard errors come from `(JᵀWJ)⁻¹`, scaled by the reduced χ² when the
/// weights are uniform. Fixed parameters report a zero error.
pub fn least_squares(
    model: &PeakModel,
    data: &FitData,
    options: &LsqOptions,
) -> Result<FitReport, FitError> {
    let (guess, bounds) = model.resolved()?;
    let free: Vec<usize> = (0..guess.len())
        .filter(|&k| bounds[k].0 < bounds[k].1)
        .collect();
    let n = data.values.len();
    if n < free.len().max(1) {
        return Err(FitError::InsufficientData {
            needed: free.len().max(1),
            got: n,
        });
    }
    let problem = Problem {
        model,
        data,
        sqrt_w: data.sqrt_weights(),
        free,
        bounds,
    };

    let mut best = problem.run(guess.clone(), options);
    let mut rng = ChaCha8Rng::seed_from_u64(options.start_seed);
    for _ in 1..options.starts.max(1) {
        let mut start = guess.clone();
        for &k in &problem.free {
            let (lo, hi) = problem.bounds[k];
            start[k] = if lo.is_finite() && hi.is_finite() {
                rng.random_range(lo..=hi)
            } else {
                let span = if guess[k] == 0.0 {
                    1.0
                } else {
                    0.2 * guess[k].abs()
                };
                guess[k] + span * rng.random_range(-1.0..=1.0)
            };
        }
        problem.project(&mut start);
        let cand = problem.run(start, options);
        if cand.2 && (!best.2 || cand.0.cost < best.0.cost) {
            best = cand;
        }
    }

    let (state, iterations, converged) = best;
    let names = model.kind.param_names();
    let mut report = FitReport {
        model_id: model.kind.id().to_string(),
        parameters: names
            .iter()
            .map(|s| s.to_string())
            .zip(state.p.iter().copied())
            .collect(),
        standard_errors: Default::default(),
        residual_norm: 2.0 * state.cost,
        iterations,
        converged,
    };
    if !converged {
        return Err(FitError::MaxIterations {
            iterations,
            report: Box::new(report),
        });
    }
    let normal = state.j.transpose() * &state.j;
    let cov = normal
        .cholesky()
        .ok_or(FitError::SingularJacobian)?
        .inverse();
    let dof = n.saturating_sub(problem.free.len());
    let scale = match data.weighting {
        _ if data.variance.is_some() => 1.0,
        Weighting::Poisson => 1.0,
        Weighting::Uniform if dof > 0 => 2.0 * state.cost / dof as f64,
        Weighting::Uniform => 0.0,
    };
    for (k, name) in names.iter().enumerate() {
        let sigma = match problem.free.iter().position(|&f| f == k) {
            Some(c) => (cov[(c, c)] * scale).sqrt(),
            None => 0.0,
        };
        report.standard_errors.insert(name.to_string(), sigma);
    }
    Ok(report)
}
