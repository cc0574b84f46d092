//! Forward models, estimators and a voltage planner for hybrid GaAs/LN
//! ring-resonator cavity-QED devices.
//!
//! The crate is organised by physical subsystem:
//!
//! - [`materials`]: Voigt-notation tensors, crystal-frame rotation and the
//!   material database.
//! - [`resonator`]: loss budget, quality factor, free spectral range,
//!   all-pass transmission and effective mode volume.
//! - [`strain`]: voltage-induced strain in the GaAs layer, the Pikus-Bir
//!   band-gap shift and the resulting wavelength tuning curve.
//! - [`cqed`]: detuning-dependent Purcell enhancement, decay and pulsed g²
//!   histogram synthesis.
//! - [`estimation`]: damped least squares and the fitters that invert the
//!   forward models from measured data.
//! - [`planner`]: per-device strain / electro-optic voltage assignment for
//!   a common target wavelength.
//! - [`io`]: configuration, CSV ingestion and report emission.
//!
//! Interface units are nm, ns, V and dB/cm unless a function says otherwise.

pub mod cqed;
pub mod data;
pub mod device;
pub mod estimation;
pub mod io;
pub mod materials;
pub mod planner;
pub mod resonator;
pub mod strain;
pub mod units;

mod error;

pub use error::Error;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Result<T, E = Error> = std::result::Result<T, E>;
