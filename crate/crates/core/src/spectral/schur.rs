use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{companion_matrix, eigenvalues_2x2, is_conjugate_pair, DEFAULT_CONJUGATE_TOL};
use crate::error::{Error, Result};
use crate::methods::TwoStepCoefficients;

/// `M = U·T·Uᴴ` with `U` unitary and `T` upper triangular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurFactors {
    pub u: Matrix2<Complex64>,
    pub t: Matrix2<Complex64>,
}

impl SchurFactors {
    pub fn reconstruct(&self) -> Matrix2<Complex64> {
        self.u * self.t * self.u.adjoint()
    }
}

/// Closed-form Schur factorization of a companion block whose eigenvalues
/// form a conjugate pair.
///
/// The first column of `U` is the normalized eigenvector `(λ₁, 1)`; the
/// second is its orthogonal complement `(1, −λ̄₁)` with the same norm.
/// `T` carries `λ₁, λ₂` on the diagonal, an exact zero below it, and
/// `t12 = u₁ᴴ·M·u₂`.
pub fn schur_2x2(c: &TwoStepCoefficients) -> Result<SchurFactors> {
    if !is_conjugate_pair(c, DEFAULT_CONJUGATE_TOL) {
        return Err(Error::NotConjugatePair { a: c.a, b: c.b });
    }
    let pair = eigenvalues_2x2(c);
    let lambda = pair.lambda1;
    let one = Complex64::new(1.0, 0.0);
    let scale = Complex64::new(1.0 / (1.0 + lambda.norm_sqr()).sqrt(), 0.0);

    let u1 = nalgebra::Vector2::new(lambda, one) * scale;
    let u2 = nalgebra::Vector2::new(one, -lambda.conj()) * scale;
    let u = Matrix2::from_columns(&[u1, u2]);

    let m = companion_matrix(c).map(|v| Complex64::new(v, 0.0));
    let t12 = (u1.adjoint() * m * u2)[(0, 0)];
    let t = Matrix2::new(pair.lambda1, t12, Complex64::new(0.0, 0.0), pair.lambda2);
    Ok(SchurFactors { u, t })
}
