//! Dense complex matrix aliases and Hermitian solves.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Condition number guard used for every Hermitian inversion.
pub const MAX_CONDITION: f64 = 1e12;

/// Eigen-decomposition based inverse of a Hermitian matrix.
///
/// Returns the inverse and the 2-norm condition number. Fails with `None` when
/// any eigenvalue is non-positive or the condition number exceeds `max_condition`;
/// in that case the condition number is still reported.
pub fn hermitian_pd_inverse(m: &CMatrix, max_condition: f64) -> (Option<CMatrix>, f64) {
    let eig = SymmetricEigen::new(m.clone());
    let (min, max) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(min > 0.0) {
        return (None, f64::INFINITY);
    }
    let condition = max / min;
    if condition > max_condition {
        return (None, condition);
    }
    let inv_diag: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&v| Complex64::new(1.0 / v, 0.0))
        .collect();
    let q = &eig.eigenvectors;
    let scaled = q * DMatrix::from_diagonal(&DVector::from_vec(inv_diag));
    (Some(scaled * q.adjoint()), condition)
}

/// Hermitian part `(M + M^H) / 2`, used to scrub round-off asymmetry.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt_ext()
}

trait SqrtExt {
    fn sqrt_ext(self) -> f64;
}

impl SqrtExt for f64 {
    fn sqrt_ext(self) -> f64 {
        num_traits::Float::sqrt(self)
    }
}
