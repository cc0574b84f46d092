//! Fit reports as TOML.
//!
//! ```toml
//! model = "exp_decay_irf"
//! converged = true
//! iterations = 9
//! residual_norm = 1012.4
//!
//! [parameters]
//! rate_per_ns = 1.9003
//!
//! [standard_errors]
//! rate_per_ns = 0.0041
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::estimation::FitReport;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    model: String,
    converged: bool,
    iterations: usize,
    residual_norm: f64,
    parameters: BTreeMap<String, f64>,
    #[serde(default)]
    standard_errors: BTreeMap<String, f64>,
}

pub fn report_to_toml(report: &FitReport) -> String {
    let file = ReportFile {
        model: report.model_id.clone(),
        converged: report.converged,
        iterations: report.iterations,
        residual_norm: report.residual_norm,
        parameters: report.parameters.clone(),
        standard_errors: report.standard_errors.clone(),
    };
    toml::to_string(&file).expect("report serialises")
}

pub fn parse_report(text: &str, origin: &str) -> Result<FitReport, IoError> {
    let f: ReportFile = toml::from_str(text).map_err(|e| IoError::Schema {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    Ok(FitReport {
        model_id: f.model,
        parameters: f.parameters,
        standard_errors: f.standard_errors,
        residual_norm: f.residual_norm,
        iterations: f.iterations,
        converged: f.converged,
    })
}
