use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `W = Q·diag(λ)·Qᵀ` of a symmetric matrix by cyclic
/// Jacobi rotations. Eigenvalues come back nondecreasing with the columns
/// of `Q` permuted to match.
///
/// Rejects matrices whose asymmetry exceeds `1e-10·max(1, max|W|)`.
pub fn symmetric_eigendecomposition(w: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = w.nrows();
    if n != w.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix must be square, got {}x{}",
            n,
            w.ncols()
        )));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    let scale = w.amax().max(1.0);
    let asymmetry = (w - w.transpose()).amax();
    if asymmetry > 1e-10 * scale {
        return Err(Error::NotSymmetric(asymmetry));
    }

    let mut a = (w + w.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let total = a.norm();
    let mut last_off = f64::INFINITY;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        // stop at convergence or once rounding noise stops shrinking
        if off <= 1e-15 * total || off >= last_off {
            break;
        }
        last_off = off;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigvals = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let q = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((q, eigvals))
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += a[(p, q)] * a[(p, q)];
        }
    }
    sum.sqrt()
}

/// Applies the rotation `J(p, q, θ)` as `A ← JᵀAJ`, `V ← VJ`, zeroing
/// `A[p, q]`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    let (app, aqq, apq) = (a[(p, p)], a[(q, q)], a[(p, q)]);
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    a[(p, p)] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    a[(q, q)] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::generate_quadratic;

    fn reconstruction_error(w: &DMatrix<f64>, q: &DMatrix<f64>, vals: &DVector<f64>) -> f64 {
        (q * DMatrix::from_diagonal(vals) * q.transpose() - w).norm()
            / w.norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn identity() {
        let (q, vals) = symmetric_eigendecomposition(&DMatrix::identity(4, 4)).unwrap();
        assert!(vals.iter().all(|&v| v == 1.0));
        assert_eq!(q, DMatrix::identity(4, 4));
    }

    #[test]
    fn diagonal_is_sorted() {
        let w = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0]));
        let (q, vals) = symmetric_eigendecomposition(&w).unwrap();
        assert_eq!(vals.as_slice(), &[1.0, 3.0]);
        assert_eq!(q[(0, 0)].abs(), 0.0);
        assert_eq!(q[(1, 0)].abs(), 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let w = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            symmetric_eigendecomposition(&w),
            Err(Error::NotSymmetric(_))
        ));
        assert!(symmetric_eigendecomposition(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn recovers_generated_spectrum() {
        let p = generate_quadratic(50, 0.5, 40.0, 6).unwrap();
        let (q, vals) = symmetric_eigendecomposition(p.matrix()).unwrap();
        assert!((&vals - p.eigvals()).amax() <= 1e-8);
        assert!(reconstruction_error(p.matrix(), &q, &vals) <= 1e-8);
        assert!((q.transpose() * &q - DMatrix::identity(50, 50)).amax() <= 1e-10);
    }

    #[test]
    fn handles_indefinite_and_repeated() {
        let w = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let (q, vals) = symmetric_eigendecomposition(&w).unwrap();
        assert!(
            (vals[0] - 1.0).abs() < 1e-14
                && (vals[1] - 3.0).abs() < 1e-14
                && (vals[2] - 3.0).abs() < 1e-14
        );
        assert!(reconstruction_error(&w, &q, &vals) < 1e-14);
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (_, vals) = symmetric_eigendecomposition(&w).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }
}
