//! Spectral analysis of the per-coordinate 2×2 iteration matrices
//! `M = [[a, b], [1, 0]]`.
//!
//! After rotating into the eigenbasis of `W` and interleaving the state
//! `(x_k, x_{k−1})` coordinate by coordinate, the full `2d × 2d` iteration
//! matrix is block diagonal with one companion block per eigenvalue of `W`.
//! Everything here therefore works block by block; the big matrix is never
//! formed.

mod certificate;
mod jacobi;
mod schur;

pub use certificate::{analyze, CoordinateSpectrum, SpectralCertificate};
pub use jacobi::symmetric_eigendecomposition;
pub use schur::{schur_2x2, SchurFactors};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::methods::TwoStepCoefficients;

/// Relative slack on the discriminant test `a² + 4b ≤ 0`.
pub const DEFAULT_CONJUGATE_TOL: f64 = 1e-12;

/// Eigenvalues of a companion block. `lambda1` is the one of larger
/// modulus; for complex pairs it has positive imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPair {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl ComplexPair {
    /// Largest modulus of the two.
    pub fn radius(&self) -> f64 {
        self.lambda1.norm().max(self.lambda2.norm())
    }
}

pub fn companion_matrix(c: &TwoStepCoefficients) -> Matrix2<f64> {
    Matrix2::new(c.a, c.b, 1.0, 0.0)
}

pub fn discriminant(c: &TwoStepCoefficients) -> f64 {
    c.a * c.a + 4.0 * c.b
}

/// Roots of `z² − a·z − b`.
pub fn eigenvalues_2x2(c: &TwoStepCoefficients) -> ComplexPair {
    let disc = discriminant(c);
    if disc < 0.0 {
        let re = 0.5 * c.a;
        let im = 0.5 * (-disc).sqrt();
        return ComplexPair {
            lambda1: Complex64::new(re, im),
            lambda2: Complex64::new(re, -im),
        };
    }
    // Larger root first, the smaller via the product −b to avoid cancellation.
    let root = disc.sqrt();
    let big = if c.a >= 0.0 {
        0.5 * (c.a + root)
    } else {
        0.5 * (c.a - root)
    };
    let small = if big == 0.0 { 0.0 } else { -c.b / big };
    ComplexPair {
        lambda1: Complex64::new(big, 0.0),
        lambda2: Complex64::new(small, 0.0),
    }
}

/// `true` when the eigenvalues are complex conjugates or a repeated real
/// root, i.e. `a² + 4b ≤ tol·max(1, a², |4b|)`.
pub fn is_conjugate_pair(c: &TwoStepCoefficients, tol: f64) -> bool {
    let scale = 1f64.max(c.a * c.a).max((4.0 * c.b).abs());
    discriminant(c) <= tol * scale
}
