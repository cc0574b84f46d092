//! File formats: TOML configuration and reports, CSV data, histogram
//! sidecars, fleet and plan files.
//!
//! Floats are written in Rust's shortest round-trip form, so every emitted
//! data file re-ingests to an identical in-memory value. All writes go to a
//! temporary file in the target directory that is then renamed into place.

mod config;
mod delimited;
mod fleet;
mod report;

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::data::DataError;

pub use config::{
    DecaySection, DeviceSection, G2Section, RunConfig, SweepSection, TransmissionSection,
};
pub use delimited::{
    read_histogram, read_mode_field, read_spectrum, read_tuning_points, sidecar_path,
    write_histogram, write_mode_field, write_spectrum, write_tuning_points, HistogramFile,
    HistogramKind, HistogramMeta,
};
pub use fleet::{fleet_to_toml, parse_fleet, plan_to_toml, read_fleet};
pub use report::{parse_report, report_to_toml};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: wavelength axis is not ascending")]
    NonMonotonicAxis { path: String, line: u64 },
    #[error("{path}:{line}: duplicate wavelength")]
    DuplicateWavelength { path: String, line: u64 },
    #[error("{path}: file not found")]
    MissingFile { path: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> IoError {
    IoError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    if !path.exists() {
        return Err(IoError::MissingFile {
            path: path.display().to_string(),
        });
    }
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.flush().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}
