//! Crystal-frame to device-frame rotations and the Voigt stress
//! transformation (Bond matrix) they induce.

use nalgebra::{Matrix3, Matrix6, Rotation3, Unit, Vector3};

use super::voigt::VOIGT_PAIRS;
use super::{MaterialsError, PiezoTensor};

const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Builds the 6×6 matrix `M` with `Voigt(A σ Aᵀ) = M · Voigt(σ)` for
/// symmetric stress tensors `σ`.
///
/// Row `I` with tensor pair `(k, l)` and column `J` with pair `(m, n)`:
/// `A_km A_lm` for normal columns and `A_km A_ln + A_kn A_lm` for shear
/// columns.
pub fn bond_matrix_from_rotation(a: &Matrix3<f64>) -> Result<Matrix6<f64>, MaterialsError> {
    check_rotation(a)?;
    Ok(bond_matrix_unchecked(a))
}

fn bond_matrix_unchecked(a: &Matrix3<f64>) -> Matrix6<f64> {
    Matrix6::from_fn(|row, col| {
        let (k, l) = VOIGT_PAIRS[row];
        let (m, n) = VOIGT_PAIRS[col];
        if m == n {
            a[(k, m)] * a[(l, m)]
        } else {
            a[(k, m)] * a[(l, n)] + a[(k, n)] * a[(l, m)]
        }
    })
}

fn check_rotation(a: &Matrix3<f64>) -> Result<(), MaterialsError> {
    let deviation = (a.transpose() * a - Matrix3::identity()).abs().max();
    let det = a.determinant();
    if !deviation.is_finite()
        || deviation > ORTHOGONALITY_TOL
        || (det - 1.0).abs() > ORTHOGONALITY_TOL
    {
        return Err(MaterialsError::NonOrthogonalRotation { deviation, det });
    }
    Ok(())
}

/// Proper rotation `A` from the crystal frame to the device frame, together
/// with its stress Bond matrix `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRotation {
    a: Matrix3<f64>,
    m: Matrix6<f64>,
}

impl FrameRotation {
    pub fn new(a: Matrix3<f64>) -> Result<Self, MaterialsError> {
        let m = bond_matrix_from_rotation(&a)?;
        Ok(Self { a, m })
    }

    pub fn identity() -> Self {
        let a = Matrix3::identity();
        Self {
            m: bond_matrix_unchecked(&a),
            a,
        }
    }

    /// Frame used for x-cut thin-film LN.
    ///
    /// The wafer normal of an x-cut film is the crystal X axis, which is
    /// also the growth axis of the bonded GaAs layer, so it becomes the
    /// device z axis. The in-plane crystal axes map as Y → device x and
    /// Z (the c-axis, along which the tuning field is applied) → device y:
    ///
    /// ```text
    ///     | 0 1 0 |
    /// A = | 0 0 1 |      v_device = A · v_crystal
    ///     | 1 0 0 |
    /// ```
    pub fn x_cut() -> Self {
        Self::new(Matrix3::new(
            0.0, 1.0, 0.0, //
            0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0,
        ))
        .expect("cyclic permutation is a proper rotation")
    }

    pub fn about_axis(axis: Vector3<f64>, angle_rad: f64) -> Self {
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle_rad);
        let a = *rot.matrix();
        Self {
            m: bond_matrix_unchecked(&a),
            a,
        }
    }

    /// Rotation applying `self` first and then `then`.
    pub fn then(&self, then: &FrameRotation) -> Self {
        let a = then.a * self.a;
        Self {
            m: bond_matrix_unchecked(&a),
            a,
        }
    }

    pub fn inverse(&self) -> Self {
        let a = self.a.transpose();
        Self {
            m: bond_matrix_unchecked(&a),
            a,
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.a
    }

    pub fn bond_matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    /// Expresses a crystal-frame vector in the device frame.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.a * v
    }
}

/// Rotates a stress-charge piezoelectric tensor into the device frame:
/// `e' = A · e · Mᵀ`.
pub fn rotate_piezo_to_xcut(e_z: &PiezoTensor, frame: &FrameRotation) -> PiezoTensor {
    PiezoTensor::from_matrix_unchecked(frame.a * e_z.matrix() * frame.m.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::voigt::{stress_to_voigt, voigt_to_stress};
    use nalgebra::{SMatrix, Vector6};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rotation(rng: &mut ChaCha8Rng) -> FrameRotation {
        let axis = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        FrameRotation::about_axis(axis, rng.random_range(-3.0..3.0))
    }

    fn full_rank3(e: &SMatrix<f64, 3, 6>) -> [[[f64; 3]; 3]; 3] {
        let mut t = [[[0.0; 3]; 3]; 3];
        for (i, plane) in t.iter_mut().enumerate() {
            for (j, row) in plane.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = e[(i, crate::materials::voigt::voigt_index(j, k))];
                }
            }
        }
        t
    }

    /// Brute-force `e'_ijk = A_il A_jm A_kn e_lmn`.
    fn rotate_rank3(a: &Matrix3<f64>, e: &[[[f64; 3]; 3]; 3]) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut acc = 0.0;
                    for l in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                acc += a[(i, l)] * a[(j, m)] * a[(k, n)] * e[l][m][n];
                            }
                        }
                    }
                    out[i][j][k] = acc;
                }
            }
        }
        out
    }

    fn frob(t: &[[[f64; 3]; 3]; 3]) -> f64 {
        t.iter()
            .flatten()
            .flatten()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    fn ln_like() -> PiezoTensor {
        PiezoTensor::trigonal_3m(3.7, 2.5, 0.2, 1.3)
    }

    #[test]
    fn identity_rotation_gives_identity_bond_matrix() {
        let m = bond_matrix_from_rotation(&Matrix3::identity()).unwrap();
        assert_eq!(m, Matrix6::identity());
    }

    #[test]
    fn quarter_turn_about_z_permutes_uniaxial_stress() {
        let frame = FrameRotation::about_axis(Vector3::z(), std::f64::consts::FRAC_PI_2);
        let out = frame.bond_matrix() * Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let expected = Vector6::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert!((out - expected).abs().max() < 1e-15);
    }

    #[test]
    fn bond_matrix_matches_direct_tensor_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let frame = random_rotation(&mut rng);
            let v = Vector6::from_fn(|_, _| rng.random_range(-1.0..1.0));
            let sigma = voigt_to_stress(&v);
            let a = frame.matrix();
            let direct = stress_to_voigt(&(a * sigma * a.transpose()));
            assert!((frame.bond_matrix() * v - direct).abs().max() < 1e-10);
        }
    }

    #[test]
    fn rejects_improper_and_skewed_matrices() {
        let reflection = Matrix3::new(-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            bond_matrix_from_rotation(&reflection),
            Err(MaterialsError::NonOrthogonalRotation { .. })
        ));
        let skew = Matrix3::new(1.0, 1e-6, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(FrameRotation::new(skew).is_err());
    }

    #[test]
    fn x_cut_maps_crystal_axes() {
        let f = FrameRotation::x_cut();
        assert_eq!(f.apply(&Vector3::x()), Vector3::z());
        assert_eq!(f.apply(&Vector3::y()), Vector3::x());
        assert_eq!(f.apply(&Vector3::z()), Vector3::y());
        let a = f.matrix();
        assert!((a.transpose() * a - Matrix3::identity()).abs().max() < 1e-12);
        assert!((a.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_frame_leaves_piezo_unchanged() {
        let e = ln_like();
        assert_eq!(rotate_piezo_to_xcut(&e, &FrameRotation::identity()), e);
    }

    #[test]
    fn x_cut_piezo_matches_rank3_rotation() {
        let e = ln_like();
        let frame = FrameRotation::x_cut();
        let rotated = rotate_piezo_to_xcut(&e, &frame);
        let oracle = rotate_rank3(frame.matrix(), &full_rank3(e.matrix()));
        let got = full_rank3(rotated.matrix());
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((got[i][j][k] - oracle[i][j][k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_rotations_match_rank3_oracle_and_preserve_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e = ln_like();
        let before = frob(&full_rank3(e.matrix()));
        for _ in 0..100 {
            let frame = random_rotation(&mut rng);
            let rotated = rotate_piezo_to_xcut(&e, &frame);
            let got = full_rank3(rotated.matrix());
            let oracle = rotate_rank3(frame.matrix(), &full_rank3(e.matrix()));
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        assert!((got[i][j][k] - oracle[i][j][k]).abs() < 1e-10);
                    }
                }
            }
            assert!((frob(&got) - before).abs() < 1e-10);
        }
    }

    #[test]
    fn successive_rotations_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = ln_like();
        for _ in 0..50 {
            let r1 = random_rotation(&mut rng);
            let r2 = random_rotation(&mut rng);
            let two_step = rotate_piezo_to_xcut(&rotate_piezo_to_xcut(&e, &r1), &r2);
            let one_step = rotate_piezo_to_xcut(&e, &r1.then(&r2));
            assert!((two_step.matrix() - one_step.matrix()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn inverse_rotation_recovers_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = ln_like();
        for _ in 0..50 {
            let r = random_rotation(&mut rng);
            let back = rotate_piezo_to_xcut(&rotate_piezo_to_xcut(&e, &r), &r.inverse());
            assert!((back.matrix() - e.matrix()).abs().max() < 1e-10);
        }
    }
}
