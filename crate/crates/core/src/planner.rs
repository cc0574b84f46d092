//! Voltage planning for fleets of strain- and electro-optically tuned
//! devices.
//!
//! Each device has two linear axes: the strain voltage `V_S` moves the
//! emitter, `λ_QD = λ_QD0 + γ_S·V_S`, and the electro-optic voltage `V_EO`
//! moves the cavity, `λ_c = λ_c0 + γ_EO·V_EO`. A plan picks one common
//! target `λ*` and solves both equations for every device. The two axes
//! are treated as independent. Every objective is piecewise linear in `λ*`
//! and is optimised exactly by evaluating its breakpoints.

use thiserror::Error;

use crate::cqed::{purcell_at_detuning, EmitterCavityState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("plan is infeasible")]
    InfeasiblePlan,
    #[error("fleet is empty")]
    EmptyFleet,
    #[error("invalid device {index}: {message}")]
    InvalidSpec { index: usize, message: String },
    #[error("{plan} plan entries but {states} emitter states")]
    LengthMismatch { plan: usize, states: usize },
}

/// Linear tuning description of one device. Rates in pm/V; a zero rate
/// marks an axis without tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceTuningSpec {
    pub name: String,
    pub qd_wavelength0_nm: f64,
    pub cavity_wavelength0_nm: f64,
    pub gamma_s_pm_per_v: f64,
    pub gamma_eo_pm_per_v: f64,
    pub vs_limits_v: (f64, f64),
    pub veo_limits_v: (f64, f64),
    /// Cavity FWHM; the resonance tolerance is a tenth of it.
    pub cavity_linewidth_nm: f64,
}

impl DeviceTuningSpec {
    pub fn validate(&self, index: usize) -> Result<(), PlanError> {
        let bad = |m: String| Err(PlanError::InvalidSpec { index, message: m });
        let finite = [
            self.qd_wavelength0_nm,
            self.cavity_wavelength0_nm,
            self.gamma_s_pm_per_v,
            self.gamma_eo_pm_per_v,
            self.vs_limits_v.0,
            self.vs_limits_v.1,
            self.veo_limits_v.0,
            self.veo_limits_v.1,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite field".into());
        }
        if self.vs_limits_v.0 > self.vs_limits_v.1 || self.veo_limits_v.0 > self.veo_limits_v.1 {
            return bad("voltage limits are not ordered".into());
        }
        if !(self.cavity_linewidth_nm > 0.0) {
            return bad(format!(
                "cavity linewidth must be positive, got {}",
                self.cavity_linewidth_nm
            ));
        }
        Ok(())
    }

    fn axes(&self) -> [Axis; 2] {
        [
            Axis {
                kind: AxisKind::Strain,
                lambda0: self.qd_wavelength0_nm,
                gamma: self.gamma_s_pm_per_v,
                limits: self.vs_limits_v,
            },
            Axis {
                kind: AxisKind::ElectroOptic,
                lambda0: self.cavity_wavelength0_nm,
                gamma: self.gamma_eo_pm_per_v,
                limits: self.veo_limits_v,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AxisKind {
    Strain,
    ElectroOptic,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    kind: AxisKind,
    lambda0: f64,
    gamma: f64,
    limits: (f64, f64),
}

impl Axis {
    fn tunable(&self) -> bool {
        self.gamma != 0.0
    }

    /// Voltage that puts this axis at `lambda`.
    fn voltage(&self, lambda: f64) -> f64 {
        if self.tunable() {
            (lambda - self.lambda0) * 1e3 / self.gamma
        } else {
            0.0_f64.clamp(self.limits.0, self.limits.1)
        }
    }

    fn wavelength(&self, v: f64) -> f64 {
        self.lambda0 + self.gamma * 1e-3 * v
    }

    /// Reachable wavelengths and which limit sets each end.
    fn reach(&self) -> (WavelengthInterval, Binding, Binding) {
        if !self.tunable() {
            let b = match self.kind {
                AxisKind::Strain => Binding::FixedEmitter,
                AxisKind::ElectroOptic => Binding::FixedCavity,
            };
            return (WavelengthInterval::point(self.lambda0), b, b);
        }
        let a = self.wavelength(self.limits.0);
        let b = self.wavelength(self.limits.1);
        let (min_b, max_b) = match self.kind {
            AxisKind::Strain => (Binding::VsMin, Binding::VsMax),
            AxisKind::ElectroOptic => (Binding::VeoMin, Binding::VeoMax),
        };
        if a <= b {
            (WavelengthInterval { lo_nm: a, hi_nm: b }, min_b, max_b)
        } else {
            (WavelengthInterval { lo_nm: b, hi_nm: a }, max_b, min_b)
        }
    }
}

/// Closed wavelength interval; empty when `lo_nm > hi_nm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavelengthInterval {
    pub lo_nm: f64,
    pub hi_nm: f64,
}

impl WavelengthInterval {
    pub fn point(x: f64) -> Self {
        Self { lo_nm: x, hi_nm: x }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo_nm <= self.hi_nm)
    }

    pub fn width_nm(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi_nm - self.lo_nm
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self {
            lo_nm: self.lo_nm.max(other.lo_nm),
            hi_nm: self.hi_nm.min(other.hi_nm),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo_nm <= x && x <= self.hi_nm
    }
}

/// Wavelengths `λ*` at which both axes of `spec` can sit.
pub fn device_reach(spec: &DeviceTuningSpec) -> WavelengthInterval {
    let [s, e] = spec.axes();
    s.reach().0.intersect(&e.reach().0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Minimise the largest `|V|` applied anywhere in the fleet.
    #[default]
    MinimizeMaxAbsVoltage,
    /// Maximise the smallest distance of any voltage to its limits.
    MaximizeMargin,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::MinimizeMaxAbsVoltage => "minimize_max_abs_voltage",
            Objective::MaximizeMargin => "maximize_margin",
        }
    }
}

/// A limit that bounds a device's reach.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    VsMin,
    VsMax,
    VeoMin,
    VeoMax,
    FixedEmitter,
    FixedCavity,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::VsMin => "vs_min",
            Binding::VsMax => "vs_max",
            Binding::VeoMin => "veo_min",
            Binding::VeoMax => "veo_max",
            Binding::FixedEmitter => "fixed_emitter",
            Binding::FixedCavity => "fixed_cavity",
        }
    }
}

/// Why a device limits an infeasible fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub device: usize,
    pub reach: WavelengthInterval,
    /// Limit that sets the device's lowest reachable wavelength, if that
    /// wavelength is the fleet-wide lower bound.
    pub binds_lower: Option<Binding>,
    /// Same for the upper bound.
    pub binds_upper: Option<Binding>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment {
    pub v_s: f64,
    pub v_eo: f64,
    pub qd_wavelength_nm: f64,
    pub cavity_wavelength_nm: f64,
}

impl Assignment {
    pub fn residual_detuning_nm(&self) -> f64 {
        self.qd_wavelength_nm - self.cavity_wavelength_nm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentPlan {
    pub objective_kind: Objective,
    pub feasible: bool,
    /// Common target; `None` when infeasible.
    pub target_wavelength_nm: Option<f64>,
    pub assignments: Vec<Assignment>,
    /// Largest `|V|` over all assignments.
    pub objective: f64,
    /// Smallest distance of any voltage to its limit.
    pub margin_v: f64,
    /// Fleet-wide reach (intersection over devices).
    pub reach: WavelengthInterval,
    pub diagnostics: Vec<Diagnosis>,
}

fn max_abs_voltage(devices: &[DeviceTuningSpec], lambda: f64) -> f64 {
    devices
        .iter()
        .flat_map(|d| d.axes())
        .map(|a| a.voltage(lambda).abs())
        .fold(0.0, f64::max)
}

fn min_margin(devices: &[DeviceTuningSpec], lambda: f64) -> f64 {
    devices
        .iter()
        .flat_map(|d| d.axes())
        .filter(|a| a.tunable())
        .map(|a| {
            let v = a.voltage(lambda);
            (v - a.limits.0).min(a.limits.1 - v)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Candidate optima: interval ends, zero crossings and pairwise crossings
/// of the affine pieces `±(λ − λ0)/γ` (minimax) or the slack lines
/// `(λ − λ0)/γ − lo`, `hi − (λ − λ0)/γ` (margin).
fn breakpoints(
    devices: &[DeviceTuningSpec],
    reach: WavelengthInterval,
    objective: Objective,
) -> Vec<f64> {
    // Each line is v(λ) = s·λ + c.
    let mut lines: Vec<(f64, f64)> = Vec::new();
    for a in devices
        .iter()
        .flat_map(|d| d.axes())
        .filter(|a| a.tunable())
    {
        let s = 1e3 / a.gamma;
        let c = -a.lambda0 * s;
        match objective {
            Objective::MinimizeMaxAbsVoltage => {
                lines.push((s, c));
                lines.push((-s, -c));
            }
            Objective::MaximizeMargin => {
                lines.push((s, c - a.limits.0));
                lines.push((-s, a.limits.1 - c));
            }
        }
    }
    let mut pts = vec![reach.lo_nm, reach.hi_nm];
    for (i, &(s1, c1)) in lines.iter().enumerate() {
        if objective == Objective::MinimizeMaxAbsVoltage {
            pts.push(-c1 / s1);
        }
        for &(s2, c2) in &lines[i + 1..] {
            if s1 != s2 {
                pts.push((c2 - c1) / (s1 - s2));
            }
        }
    }
    pts.retain(|x| x.is_finite() && reach.contains(*x));
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

/// Best common target for the fleet, or an infeasible plan with a
/// per-device account of the limits that close the window.
pub fn plan_alignment(
    devices: &[DeviceTuningSpec],
    objective: Objective,
) -> Result<AlignmentPlan, PlanError> {
    if devices.is_empty() {
        return Err(PlanError::EmptyFleet);
    }
    for (i, d) in devices.iter().enumerate() {
        d.validate(i)?;
    }
    let reaches: Vec<WavelengthInterval> = devices.iter().map(device_reach).collect();
    let reach = reaches
        .iter()
        .skip(1)
        .fold(reaches[0], |acc, r| acc.intersect(r));

    if reach.is_empty() {
        let diagnostics = devices
            .iter()
            .enumerate()
            .filter_map(|(i, d)| {
                let [s, e] = d.axes();
                let (rs, s_lo, s_hi) = s.reach();
                let (re, e_lo, e_hi) = e.reach();
                let own = rs.intersect(&re);
                let lower = if rs.lo_nm >= re.lo_nm { s_lo } else { e_lo };
                let upper = if rs.hi_nm <= re.hi_nm { s_hi } else { e_hi };
                let binds_lower = (own.lo_nm == reach.lo_nm).then_some(lower);
                let binds_upper = (own.hi_nm == reach.hi_nm).then_some(upper);
                (binds_lower.is_some() || binds_upper.is_some() || own.is_empty()).then_some(
                    Diagnosis {
                        device: i,
                        reach: own,
                        binds_lower,
                        binds_upper,
                    },
                )
            })
            .collect();
        return Ok(AlignmentPlan {
            objective_kind: objective,
            feasible: false,
            target_wavelength_nm: None,
            assignments: Vec::new(),
            objective: f64::INFINITY,
            margin_v: f64::NEG_INFINITY,
            reach,
            diagnostics,
        });
    }

    let score = |lambda: f64| match objective {
        Objective::MinimizeMaxAbsVoltage => max_abs_voltage(devices, lambda),
        Objective::MaximizeMargin => -min_margin(devices, lambda),
    };
    // Sorted ascending, so strict improvement keeps the smallest λ* on ties.
    let mut best = reach.lo_nm;
    let mut best_score = score(best);
    for x in breakpoints(devices, reach, objective) {
        let s = score(x);
        if s < best_score - 1e-12 * best_score.abs().max(1.0) {
            best = x;
            best_score = s;
        }
    }
    let assignments = devices
        .iter()
        .map(|d| {
            let [s, e] = d.axes();
            let (v_s, v_eo) = (s.voltage(best), e.voltage(best));
            Assignment {
                v_s,
                v_eo,
                qd_wavelength_nm: s.wavelength(v_s),
                cavity_wavelength_nm: e.wavelength(v_eo),
            }
        })
        .collect();
    Ok(AlignmentPlan {
        objective_kind: objective,
        feasible: true,
        target_wavelength_nm: Some(best),
        assignments,
        objective: max_abs_voltage(devices, best),
        margin_v: min_margin(devices, best),
        reach,
        diagnostics: Vec::new(),
    })
}

/// Per-device Purcell factors at the plan's residual detunings.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanPurcell {
    pub per_device: Vec<f64>,
    pub min: f64,
}

pub fn purcell_over_plan(
    plan: &AlignmentPlan,
    states: &[EmitterCavityState],
) -> Result<PlanPurcell, PlanError> {
    if !plan.feasible {
        return Err(PlanError::InfeasiblePlan);
    }
    if plan.assignments.len() != states.len() {
        return Err(PlanError::LengthMismatch {
            plan: plan.assignments.len(),
            states: states.len(),
        });
    }
    let per_device: Vec<f64> = plan
        .assignments
        .iter()
        .zip(states)
        .map(|(a, s)| purcell_at_detuning(s, a.residual_detuning_nm()))
        .collect();
    let min = per_device.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PlanPurcell { per_device, min })
}

/// True when every assignment is within its limits and resonant to a tenth
/// of the cavity linewidth.
pub fn verify_plan(plan: &AlignmentPlan, devices: &[DeviceTuningSpec]) -> bool {
    plan.feasible
        && plan.assignments.len() == devices.len()
        && plan.assignments.iter().zip(devices).all(|(a, d)| {
            let within = |v: f64, (lo, hi): (f64, f64)| v >= lo - 1e-9 && v <= hi + 1e-9;
            within(a.v_s, d.vs_limits_v)
                && within(a.v_eo, d.veo_limits_v)
                && a.residual_detuning_nm().abs() <= d.cavity_linewidth_nm / 10.0
        })
}
