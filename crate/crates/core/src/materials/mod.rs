//! Material tensors in Voigt notation and the crystal-frame rotation
//! machinery used to express the LN piezoelectric response in the device
//! frame.

mod database;
mod rotation;
pub mod voigt;

use nalgebra::{Matrix6, SMatrix};
use thiserror::Error;

pub use database::{parse_database, MaterialSet};
pub use rotation::{bond_matrix_from_rotation, rotate_piezo_to_xcut, FrameRotation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialsError {
    #[error(
        "rotation matrix is not proper orthogonal (max |AᵀA - I| = {deviation:.3e}, det = {det})"
    )]
    NonOrthogonalRotation { deviation: f64, det: f64 },
    #[error("compliance matrix is not symmetric")]
    AsymmetricCompliance,
    #[error("compliance matrix is not positive definite")]
    IndefiniteCompliance,
    #[error("compliance matrix does not have the cubic pattern")]
    NotCubic,
    #[error("piezoelectric tensor has non-finite entries")]
    NonFinitePiezo,
    #[error("piezoelectric tensor violates the trigonal 3m pattern")]
    Not3m,
    #[error("deformation potential {0} is not finite")]
    NonFinitePotential(&'static str),
    #[error("deformation potential {name} = {value} eV has the wrong sign")]
    PotentialSign { name: &'static str, value: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read material database {path}: {message}")]
    Io { path: String, message: String },
}

/// 6×6 elastic compliance in Voigt form, 1/Pa. Maps Voigt stress to
/// engineering-shear Voigt strain.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticCompliance {
    s: Matrix6<f64>,
}

impl ElasticCompliance {
    pub fn new(s: Matrix6<f64>) -> Result<Self, MaterialsError> {
        let scale = s.abs().max();
        if !scale.is_finite() || (s - s.transpose()).abs().max() > 1e-12 * scale {
            return Err(MaterialsError::AsymmetricCompliance);
        }
        if s.cholesky().is_none() {
            return Err(MaterialsError::IndefiniteCompliance);
        }
        Ok(Self { s })
    }

    /// Cubic compliance from its three independent entries.
    pub fn cubic(s11: f64, s12: f64, s44: f64) -> Result<Self, MaterialsError> {
        let mut s = Matrix6::zeros();
        for i in 0..3 {
            for j in 0..3 {
                s[(i, j)] = if i == j { s11 } else { s12 };
            }
            s[(i + 3, i + 3)] = s44;
        }
        Self::new(s)
    }

    /// `(s11, s12, s44)` when the matrix has the cubic pattern exactly.
    pub fn cubic_constants(&self) -> Option<(f64, f64, f64)> {
        let s = &self.s;
        let (s11, s12, s44) = (s[(0, 0)], s[(0, 1)], s[(3, 3)]);
        let expected = Self::cubic(s11, s12, s44).ok()?;
        (expected.s == self.s).then_some((s11, s12, s44))
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.s
    }
}

/// 3×6 piezoelectric tensor in stress-charge form, C/m².
///
/// Row `i` is the field/displacement index, columns are Voigt slots; the
/// stress response to a field is `σ = -eᵀ E`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiezoTensor {
    e: SMatrix<f64, 3, 6>,
}

impl PiezoTensor {
    pub fn new(e: SMatrix<f64, 3, 6>) -> Result<Self, MaterialsError> {
        if e.iter().any(|v| !v.is_finite()) {
            return Err(MaterialsError::NonFinitePiezo);
        }
        Ok(Self { e })
    }

    pub(crate) fn from_matrix_unchecked(e: SMatrix<f64, 3, 6>) -> Self {
        Self { e }
    }

    /// Trigonal class 3m tensor (mirror plane normal to crystal X), the
    /// point group of LiNbO₃:
    ///
    /// ```text
    /// |  0     0    0    0   e15  -e22 |
    /// | -e22  e22   0   e15   0     0  |
    /// |  e31  e31  e33   0    0     0  |
    /// ```
    pub fn trigonal_3m(e15: f64, e22: f64, e31: f64, e33: f64) -> Self {
        #[rustfmt::skip]
        let e = SMatrix::<f64, 3, 6>::from_row_slice(&[
            0.0, 0.0, 0.0, 0.0, e15, -e22,
            -e22, e22, 0.0, e15, 0.0, 0.0,
            e31, e31, e33, 0.0, 0.0, 0.0,
        ]);
        Self { e }
    }

    /// Whether the zero and sign relations of class 3m hold exactly.
    pub fn satisfies_3m_pattern(&self) -> bool {
        let e = &self.e;
        let (e15, e22, e31, e33) = (e[(0, 4)], e[(1, 1)], e[(2, 0)], e[(2, 2)]);
        Self::trigonal_3m(e15, e22, e31, e33).e == *e
    }

    pub fn matrix(&self) -> &SMatrix<f64, 3, 6> {
        &self.e
    }
}

/// Conduction/valence deformation potentials, eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationPotentials {
    pub a_c: f64,
    pub a_v: f64,
    pub b: f64,
    pub d: f64,
}

impl DeformationPotentials {
    pub fn new(a_c: f64, a_v: f64, b: f64, d: f64) -> Result<Self, MaterialsError> {
        for (name, v) in [("a_c", a_c), ("a_v", a_v), ("b", b), ("d", d)] {
            if !v.is_finite() {
                return Err(MaterialsError::NonFinitePotential(name));
            }
        }
        Ok(Self { a_c, a_v, b, d })
    }

    /// Zinc-blende shear potentials `b` and `d` are negative.
    pub fn check_zincblende_signs(&self) -> Result<(), MaterialsError> {
        for (name, value) in [("b", self.b), ("d", self.d)] {
            if value >= 0.0 {
                return Err(MaterialsError::PotentialSign { name, value });
            }
        }
        Ok(())
    }
}
