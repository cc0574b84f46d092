//! Voigt index bookkeeping for symmetric rank-2 tensors.
//!
//! Ordering is `(xx, yy, zz, yz, xz, xy)`. Stress vectors store the tensor
//! components directly. Strain vectors use engineering shear, so the last
//! three entries are `2ε_yz, 2ε_xz, 2ε_xy`.

use nalgebra::{Matrix3, Vector6};

/// Tensor index pair for each Voigt slot.
pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

/// Voigt slot of the tensor index pair `(i, j)`.
pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        (0, 1) => 5,
        _ => panic!("tensor index out of range: ({i}, {j})"),
    }
}

pub fn stress_to_voigt(s: &Matrix3<f64>) -> Vector6<f64> {
    Vector6::from_fn(|k, _| {
        let (i, j) = VOIGT_PAIRS[k];
        s[(i, j)]
    })
}

pub fn voigt_to_stress(v: &Vector6<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| v[voigt_index(i, j)])
}

pub fn strain_to_voigt(e: &Matrix3<f64>) -> Vector6<f64> {
    Vector6::from_fn(|k, _| {
        let (i, j) = VOIGT_PAIRS[k];
        if i == j {
            e[(i, j)]
        } else {
            2.0 * e[(i, j)]
        }
    })
}

pub fn voigt_to_strain(v: &Vector6<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| {
        let k = voigt_index(i, j);
        if i == j {
            v[k]
        } else {
            0.5 * v[k]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn symmetric(vals: [f64; 6]) -> Matrix3<f64> {
        Matrix3::new(
            vals[0], vals[5], vals[4], //
            vals[5], vals[1], vals[3], //
            vals[4], vals[3], vals[2],
        )
    }

    #[test]
    fn engineering_shear_doubles_off_diagonal() {
        let e = symmetric([1.0, 2.0, 3.0, 0.5, 0.25, 0.125]);
        let v = strain_to_voigt(&e);
        assert_eq!(v.as_slice(), &[1.0, 2.0, 3.0, 1.0, 0.5, 0.25]);
        let s = stress_to_voigt(&e);
        assert_eq!(s.as_slice(), &[1.0, 2.0, 3.0, 0.5, 0.25, 0.125]);
    }

    proptest! {
        #[test]
        fn voigt_round_trip(vals in proptest::array::uniform6(-1e3f64..1e3)) {
            let t = symmetric(vals);
            prop_assert_eq!(voigt_to_stress(&stress_to_voigt(&t)), t);
            let back = voigt_to_strain(&strain_to_voigt(&t));
            prop_assert!((back - t).abs().max() <= 1e-12 * t.abs().max());
        }
    }
}
