//! The three-point Lyapunov candidate
//! `V(x_k, x_{k−1}, x_{k−2}) = ‖x_{k−1} − x*‖² − ⟨x_k − x*, x_{k−2} − x*⟩`.
//!
//! For any scalar sequence obeying `x_{k+1} = a·x_k + b·x_{k−1}` the scalar
//! form satisfies `V_{k+1} = −b·V_k` exactly. When `a² + 4b ≤ 0` the value
//! is also a positive multiple of `|x_k − λᴹ·x_{k−1}|²`, hence nonnegative,
//! and it decays at rate `|λᴹ|² = −b`. Values are unnormalized.

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::methods::TwoStepCoefficients;
use crate::spectral::{is_conjugate_pair, DEFAULT_CONJUGATE_TOL};

/// Tolerance used when checking monotonicity of measured series.
pub const DEFAULT_MONOTONE_TOL: f64 = 1e-9;

pub fn scalar_v(x_k: f64, x_km1: f64, x_km2: f64) -> f64 {
    x_km1 * x_km1 - x_k * x_km2
}

pub fn vector_v(
    x_k: &DVector<f64>,
    x_km1: &DVector<f64>,
    x_km2: &DVector<f64>,
    x_star: &DVector<f64>,
) -> Result<f64> {
    let d = x_star.len();
    check_dim(d, x_k.len())?;
    check_dim(d, x_km1.len())?;
    check_dim(d, x_km2.len())?;
    let e_km1 = x_km1 - x_star;
    Ok(e_km1.norm_squared() - (x_k - x_star).dot(&(x_km2 - x_star)))
}

/// Same as [`vector_v`] for deviations already measured from the solution.
pub fn deviation_v(e_k: &DVector<f64>, e_km1: &DVector<f64>, e_km2: &DVector<f64>) -> Result<f64> {
    check_dim(e_k.len(), e_km1.len())?;
    check_dim(e_k.len(), e_km2.len())?;
    Ok(e_km1.norm_squared() - e_k.dot(e_km2))
}

/// Coordinate-wise [`scalar_v`]; for eigen-coordinates the entries sum to
/// [`vector_v`].
pub fn per_coordinate_v(
    x_k: &DVector<f64>,
    x_km1: &DVector<f64>,
    x_km2: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_dim(x_k.len(), x_km1.len())?;
    check_dim(x_k.len(), x_km2.len())?;
    Ok(DVector::from_fn(x_k.len(), |i, _| {
        scalar_v(x_k[i], x_km1[i], x_km2[i])
    }))
}

/// Exact per-step multiplier `−b` of the scalar series for a conjugate
/// block.
pub fn contraction_factor(c: &TwoStepCoefficients) -> Result<f64> {
    if !is_conjugate_pair(c, DEFAULT_CONJUGATE_TOL) {
        return Err(Error::NotConjugatePair { a: c.a, b: c.b });
    }
    Ok(-c.b)
}

/// `V_k` values for `k = start_index, start_index + 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSeries {
    pub values: Vec<f64>,
    pub start_index: usize,
    pub tolerance: f64,
}

impl LyapunovSeries {
    /// Series starting at `k = 2` with the default tolerance.
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            start_index: 2,
            tolerance: DEFAULT_MONOTONE_TOL,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    /// `k` of the earlier value `V_k`.
    pub index: usize,
    pub v_prev: f64,
    pub v_next: f64,
    /// `V_{k+1} − V_k`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub violations: Vec<Violation>,
    /// Largest `V_{k+1}/V_k` over positive `V_k`, if any.
    pub max_ratio: Option<f64>,
}

impl MonotonicityReport {
    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Flags every `k` with `V_{k+1} > V_k + tol·max(1, |V_k|)`.
pub fn check_monotone(series: &LyapunovSeries) -> MonotonicityReport {
    let mut violations = Vec::new();
    let mut max_ratio: Option<f64> = None;
    for (offset, pair) in series.values.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        if prev > 0.0 {
            let ratio = next / prev;
            max_ratio = Some(max_ratio.map_or(ratio, |m| m.max(ratio)));
        }
        let allowed = prev + series.tolerance * prev.abs().max(1.0);
        if next > allowed || next.is_nan() || prev.is_nan() {
            violations.push(Violation {
                index: series.start_index + offset,
                v_prev: prev,
                v_next: next,
                excess: next - prev,
            });
        }
    }
    MonotonicityReport {
        monotone: violations.is_empty(),
        violations,
        max_ratio,
    }
}
