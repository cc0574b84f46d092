use thiserror::Error;

use crate::cqed::CqedError;
use crate::data::DataError;
use crate::estimation::FitError;
use crate::io::IoError;
use crate::materials::MaterialsError;
use crate::planner::PlanError;
use crate::resonator::ResonatorError;
use crate::strain::StrainError;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Materials(#[from] MaterialsError),
    #[error(transparent)]
    Resonator(#[from] ResonatorError),
    #[error(transparent)]
    Strain(#[from] StrainError),
    #[error(transparent)]
    Cqed(#[from] CqedError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Io(#[from] IoError),
}
