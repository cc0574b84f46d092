//! Fleet description and alignment-plan files.
//!
//! ```toml
//! [[device]]
//! name = "A"
//! qd_wavelength0_nm = 910.02
//! cavity_wavelength0_nm = 910.1
//! gamma_s_pm_per_v = -0.47
//! gamma_eo_pm_per_v = 1.89
//! vs_min_v = -500.0
//! vs_max_v = 500.0
//! veo_min_v = -200.0
//! veo_max_v = 200.0
//! cavity_linewidth_nm = 0.0479
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_text, IoError};
use crate::planner::{AlignmentPlan, DeviceTuningSpec};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FleetFile {
    device: Vec<FleetDevice>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FleetDevice {
    name: String,
    qd_wavelength0_nm: f64,
    cavity_wavelength0_nm: f64,
    gamma_s_pm_per_v: f64,
    gamma_eo_pm_per_v: f64,
    vs_min_v: f64,
    vs_max_v: f64,
    veo_min_v: f64,
    veo_max_v: f64,
    cavity_linewidth_nm: f64,
}

/// Parses fleet text; `origin` names the source in errors.
pub fn parse_fleet(text: &str, origin: &str) -> Result<Vec<DeviceTuningSpec>, IoError> {
    let file: FleetFile = toml::from_str(text).map_err(|e| IoError::Schema {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let devices: Vec<DeviceTuningSpec> = file
        .device
        .into_iter()
        .map(|d| DeviceTuningSpec {
            name: d.name,
            qd_wavelength0_nm: d.qd_wavelength0_nm,
            cavity_wavelength0_nm: d.cavity_wavelength0_nm,
            gamma_s_pm_per_v: d.gamma_s_pm_per_v,
            gamma_eo_pm_per_v: d.gamma_eo_pm_per_v,
            vs_limits_v: (d.vs_min_v, d.vs_max_v),
            veo_limits_v: (d.veo_min_v, d.veo_max_v),
            cavity_linewidth_nm: d.cavity_linewidth_nm,
        })
        .collect();
    for (i, d) in devices.iter().enumerate() {
        d.validate(i).map_err(|e| IoError::Schema {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(devices)
}

pub fn read_fleet(path: impl AsRef<Path>) -> Result<Vec<DeviceTuningSpec>, IoError> {
    let path = path.as_ref();
    parse_fleet(&read_text(path)?, &path.display().to_string())
}

pub fn fleet_to_toml(devices: &[DeviceTuningSpec]) -> String {
    let file = FleetFile {
        device: devices
            .iter()
            .map(|d| FleetDevice {
                name: d.name.clone(),
                qd_wavelength0_nm: d.qd_wavelength0_nm,
                cavity_wavelength0_nm: d.cavity_wavelength0_nm,
                gamma_s_pm_per_v: d.gamma_s_pm_per_v,
                gamma_eo_pm_per_v: d.gamma_eo_pm_per_v,
                vs_min_v: d.vs_limits_v.0,
                vs_max_v: d.vs_limits_v.1,
                veo_min_v: d.veo_limits_v.0,
                veo_max_v: d.veo_limits_v.1,
                cavity_linewidth_nm: d.cavity_linewidth_nm,
            })
            .collect(),
    };
    toml::to_string(&file).expect("fleet serialises")
}

#[derive(Serialize)]
struct PlanFile<'a> {
    objective: &'static str,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    target_wavelength_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_voltage_v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin_v: Option<f64>,
    reach_lo_nm: f64,
    reach_hi_nm: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    assignment: Vec<PlanAssignment<'a>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    diagnostic: Vec<PlanDiagnostic<'a>>,
}

#[derive(Serialize)]
struct PlanAssignment<'a> {
    name: &'a str,
    v_s_v: f64,
    v_eo_v: f64,
    qd_wavelength_nm: f64,
    cavity_wavelength_nm: f64,
    residual_detuning_nm: f64,
}

#[derive(Serialize)]
struct PlanDiagnostic<'a> {
    name: &'a str,
    reach_lo_nm: f64,
    reach_hi_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    binds_lower: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    binds_upper: Option<&'static str>,
}

/// Plan as TOML, with devices named as in `devices`.
pub fn plan_to_toml(plan: &AlignmentPlan, devices: &[DeviceTuningSpec]) -> String {
    let name = |i: usize| devices.get(i).map_or("", |d| d.name.as_str());
    let file = PlanFile {
        objective: plan.objective_kind.as_str(),
        feasible: plan.feasible,
        target_wavelength_nm: plan.target_wavelength_nm,
        max_abs_voltage_v: plan.feasible.then_some(plan.objective),
        margin_v: plan.feasible.then_some(plan.margin_v),
        reach_lo_nm: plan.reach.lo_nm,
        reach_hi_nm: plan.reach.hi_nm,
        assignment: plan
            .assignments
            .iter()
            .enumerate()
            .map(|(i, a)| PlanAssignment {
                name: name(i),
                v_s_v: a.v_s,
                v_eo_v: a.v_eo,
                qd_wavelength_nm: a.qd_wavelength_nm,
                cavity_wavelength_nm: a.cavity_wavelength_nm,
                residual_detuning_nm: a.residual_detuning_nm(),
            })
            .collect(),
        diagnostic: plan
            .diagnostics
            .iter()
            .map(|d| PlanDiagnostic {
                name: name(d.device),
                reach_lo_nm: d.reach.lo_nm,
                reach_hi_nm: d.reach.hi_nm,
                binds_lower: d.binds_lower.map(|b| b.as_str()),
                binds_upper: d.binds_upper.map(|b| b.as_str()),
            })
            .collect(),
    };
    toml::to_string(&file).expect("plan serialises")
}
