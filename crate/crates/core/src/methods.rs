//! The four two-step methods (Heavy Ball, Nesterov, Triple Momentum,
//! Nesterov with Gauss-Seidel splitting), their tunings, and the iteration
//! engines.
//!
//! Every method, applied to a quadratic, reduces in each eigen-direction of
//! `W` to the scalar recurrence `x_{k+1} = a(λ)·x_k + b(λ)·x_{k−1}` with
//! `a` and `b` affine in the eigenvalue `λ`. Three engines are provided and
//! must agree on quadratics:
//!
//! * [`step_quadratic_eigenbasis`]: the scalar recurrence per coordinate;
//! * [`step_quadratic`]: the full-space form `x* + A(x−x*) + B(x_prev−x*)`
//!   with `A`, `B` affine in `W`;
//! * [`step_general`]: the literal update driven by a gradient oracle.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::problems::{Oracle, QuadraticProblem};
use crate::spectral::{is_conjugate_pair, DEFAULT_CONJUGATE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    /// Polyak's Heavy Ball.
    HeavyBall,
    /// Nesterov accelerated gradient.
    Nesterov,
    /// Triple Momentum Method.
    TripleMomentum,
    /// Nesterov accelerated gradient with Gauss-Seidel splitting.
    NesterovGaussSeidel,
}

impl MethodKind {
    pub const ALL: [MethodKind; 4] = [
        MethodKind::HeavyBall,
        MethodKind::Nesterov,
        MethodKind::TripleMomentum,
        MethodKind::NesterovGaussSeidel,
    ];

    /// Short label: `HB`, `NAG`, `TMM`, `NAG-GS`.
    pub fn label(self) -> &'static str {
        match self {
            MethodKind::HeavyBall => "HB",
            MethodKind::Nesterov => "NAG",
            MethodKind::TripleMomentum => "TMM",
            MethodKind::NesterovGaussSeidel => "NAG-GS",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('_', "-").as_str() {
            "HB" | "HEAVY-BALL" => Ok(MethodKind::HeavyBall),
            "NAG" | "NESTEROV" => Ok(MethodKind::Nesterov),
            "TMM" | "TRIPLE-MOMENTUM" => Ok(MethodKind::TripleMomentum),
            "NAG-GS" | "NAGGS" => Ok(MethodKind::NesterovGaussSeidel),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

/// A method together with its step size `alpha`, momentum `beta` and (TMM
/// only) extrapolation `gamma`.
///
/// Non-optimal values are accepted as long as they are finite, `alpha > 0`
/// and, except for TMM, `beta >= 0`. Whether a tuning is suitable is decided
/// by the spectral certificate, not here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    kind: MethodKind,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl MethodSpec {
    /// `gamma` is ignored (stored as 0) for every method but TMM.
    pub fn new(kind: MethodKind, alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParameter(
                "hyperparameters must be finite".into(),
            ));
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if kind != MethodKind::TripleMomentum && beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beta must be nonnegative for {kind}, got {beta}"
            )));
        }
        let gamma = if kind == MethodKind::TripleMomentum {
            gamma
        } else {
            0.0
        };
        Ok(Self {
            kind,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn heavy_ball(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MethodKind::HeavyBall, alpha, beta, 0.0)
    }

    pub fn nesterov(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MethodKind::Nesterov, alpha, beta, 0.0)
    }

    pub fn triple_momentum(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Self::new(MethodKind::TripleMomentum, alpha, beta, gamma)
    }

    pub fn nesterov_gauss_seidel(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MethodKind::NesterovGaussSeidel, alpha, beta, 0.0)
    }

    pub fn kind(&self) -> MethodKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(a0, a1, b0, b1)` with `a(λ) = a0 + a1·λ` and `b(λ) = b0 + b1·λ`.
    fn affine_coefficients(&self) -> (f64, f64, f64, f64) {
        let (alpha, beta, gamma) = (self.alpha, self.beta, self.gamma);
        match self.kind {
            MethodKind::HeavyBall => (1.0 + beta, -alpha, -beta, 0.0),
            MethodKind::Nesterov => (1.0 + beta, -alpha * (1.0 + beta), -beta, alpha * beta),
            MethodKind::TripleMomentum => {
                (1.0 + beta, -alpha * (1.0 + gamma), -beta, alpha * gamma)
            }
            MethodKind::NesterovGaussSeidel => {
                let one_minus = 1.0 - beta;
                (
                    2.0 * beta + one_minus * one_minus,
                    -alpha * one_minus,
                    -beta * beta,
                    0.0,
                )
            }
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} alpha={} beta={}", self.kind, self.alpha, self.beta)?;
        if self.kind == MethodKind::TripleMomentum {
            write!(f, " gamma={}", self.gamma)?;
        }
        Ok(())
    }
}

/// Coefficients of `x_{k+1} = a·x_k + b·x_{k−1}` for one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepCoefficients {
    pub a: f64,
    pub b: f64,
}

impl TwoStepCoefficients {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }
}

/// Tuning that minimizes the worst-case spectral radius over `[mu, L]`.
///
/// Requires `mu > 0`; for merely convex problems pass explicit values to
/// [`MethodSpec::new`].
pub fn optimal_hyperparams(kind: MethodKind, mu: f64, lipschitz: f64) -> Result<MethodSpec> {
    if !(mu > 0.0 && mu.is_finite() && lipschitz.is_finite()) || lipschitz < mu {
        return Err(Error::InvalidParameter(format!(
            "optimal tuning needs 0 < mu <= L (got mu={mu}, L={lipschitz})"
        )));
    }
    let (sqrt_l, sqrt_mu) = (lipschitz.sqrt(), mu.sqrt());
    match kind {
        MethodKind::HeavyBall => {
            let ratio = (sqrt_l - sqrt_mu) / (sqrt_l + sqrt_mu);
            MethodSpec::heavy_ball(4.0 / (sqrt_l + sqrt_mu).powi(2), ratio * ratio)
        }
        MethodKind::Nesterov => {
            MethodSpec::nesterov(1.0 / lipschitz, (sqrt_l - sqrt_mu) / (sqrt_l + sqrt_mu))
        }
        MethodKind::TripleMomentum => {
            let rho = 1.0 - (mu / lipschitz).sqrt();
            MethodSpec::triple_momentum(
                (1.0 + rho) / lipschitz,
                rho * rho / (2.0 - rho),
                rho * rho / ((1.0 + rho) * (2.0 - rho)),
            )
        }
        MethodKind::NesterovGaussSeidel => {
            let denom = lipschitz + mu + 2.0 * (mu * lipschitz).sqrt();
            MethodSpec::nesterov_gauss_seidel(
                (2.0 + 2.0 * (lipschitz / mu).sqrt()) / denom,
                (lipschitz - mu) / denom,
            )
        }
    }
}

/// Per-eigenvalue two-step coefficients of `spec`.
pub fn scalar_coefficients(spec: &MethodSpec, lambda: f64) -> TwoStepCoefficients {
    let (a0, a1, b0, b1) = spec.affine_coefficients();
    TwoStepCoefficients::new(a0 + a1 * lambda, b0 + b1 * lambda)
}

/// Asymptotic rate `ρ(M)` in closed form, valid when the eigenvalues at
/// `λ = mu` form a conjugate pair.
pub fn theoretical_rate(spec: &MethodSpec, mu: f64) -> Result<f64> {
    let coeffs = scalar_coefficients(spec, mu);
    if !is_conjugate_pair(&coeffs, DEFAULT_CONJUGATE_TOL) {
        return Err(Error::NotConjugatePair {
            a: coeffs.a,
            b: coeffs.b,
        });
    }
    let (alpha, beta, gamma) = (spec.alpha, spec.beta, spec.gamma);
    let rate = match spec.kind {
        MethodKind::HeavyBall => beta.sqrt(),
        MethodKind::Nesterov => ((1.0 - alpha * mu) * beta).max(0.0).sqrt(),
        MethodKind::TripleMomentum => (beta - alpha * gamma * mu).max(0.0).sqrt(),
        MethodKind::NesterovGaussSeidel => beta,
    };
    Ok(rate)
}

/// Iterate pair `(x_k, x_{k−1})` plus the y-sequence for methods that keep
/// one.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub current: DVector<f64>,
    pub previous: DVector<f64>,
    pub auxiliary: Option<DVector<f64>>,
}

impl IterationState {
    pub fn new(current: DVector<f64>, previous: DVector<f64>) -> Result<Self> {
        check_dim(current.len(), previous.len())?;
        Ok(Self {
            current,
            previous,
            auxiliary: None,
        })
    }

    /// Standard start `x_{−1} = x_0`; NAG-GS also gets `y_{−1} = x_0`.
    pub fn start(kind: MethodKind, x0: DVector<f64>) -> Self {
        let auxiliary = (kind == MethodKind::NesterovGaussSeidel).then(|| x0.clone());
        Self {
            previous: x0.clone(),
            current: x0,
            auxiliary,
        }
    }

    pub fn dim(&self) -> usize {
        self.current.len()
    }

    fn advance(self, next: DVector<f64>, auxiliary: Option<DVector<f64>>) -> Self {
        Self {
            previous: self.current,
            current: next,
            auxiliary,
        }
    }
}

/// One step of the decoupled scalar recurrences; the state must be in
/// eigen-coordinates relative to the solution.
pub fn step_quadratic_eigenbasis(
    coeffs: &[TwoStepCoefficients],
    state: IterationState,
) -> Result<IterationState> {
    check_dim(state.dim(), coeffs.len())?;
    check_dim(state.dim(), state.previous.len())?;
    let next = DVector::from_fn(state.dim(), |i, _| {
        coeffs[i].a * state.current[i] + coeffs[i].b * state.previous[i]
    });
    Ok(state.advance(next, None))
}

/// `A·e + B·e_prev` for deviations from the solution, where `A` and `B` are
/// the method's affine-in-`W` matrices.
pub(crate) fn step_deviation(
    problem: &QuadraticProblem,
    spec: &MethodSpec,
    error: &DVector<f64>,
    previous_error: &DVector<f64>,
) -> DVector<f64> {
    let (a0, a1, b0, b1) = spec.affine_coefficients();
    let mut through_w = error * a1;
    if b1 != 0.0 {
        through_w.axpy(b1, previous_error, 1.0);
    }
    let mut next = problem.matrix() * through_w;
    next.axpy(a0, error, 1.0);
    next.axpy(b0, previous_error, 1.0);
    next
}

/// Full-space step of `spec` on a quadratic, computed as
/// `x* + A(x_k − x*) + B(x_{k−1} − x*)`.
pub fn step_quadratic(
    problem: &QuadraticProblem,
    spec: &MethodSpec,
    state: IterationState,
) -> Result<IterationState> {
    check_dim(problem.dim(), state.dim())?;
    check_dim(problem.dim(), state.previous.len())?;
    let x_star = problem.minimizer();
    let error = &state.current - x_star;
    let previous_error = &state.previous - x_star;
    let next = step_deviation(problem, spec, &error, &previous_error) + x_star;
    let auxiliary = auxiliary_from_two_step(spec, &next, &state);
    Ok(state.advance(next, auxiliary))
}

/// Recovers the y-sequence implied by a two-step update so that
/// [`step_quadratic`] and [`step_general`] produce comparable states.
fn auxiliary_from_two_step(
    spec: &MethodSpec,
    next: &DVector<f64>,
    state: &IterationState,
) -> Option<DVector<f64>> {
    match spec.kind {
        // y_{k+1} = x_k + β(x_k − x_{k−1})
        MethodKind::Nesterov => {
            Some(&state.current + (&state.current - &state.previous) * spec.beta)
        }
        // x_{k+1} = β·x_k + (1−β)·y_k
        MethodKind::NesterovGaussSeidel if spec.beta != 1.0 => {
            Some((next - &state.current * spec.beta) / (1.0 - spec.beta))
        }
        _ => None,
    }
}

/// Literal update of `spec` using only gradient queries.
pub fn step_general<O: Oracle + ?Sized>(
    obj: &O,
    spec: &MethodSpec,
    state: IterationState,
) -> Result<IterationState> {
    check_dim(obj.dim(), state.dim())?;
    check_dim(obj.dim(), state.previous.len())?;
    let (alpha, beta, gamma) = (spec.alpha, spec.beta, spec.gamma);
    let x = &state.current;
    let x_prev = &state.previous;
    match spec.kind {
        MethodKind::HeavyBall => {
            let grad = obj.gradient(x)?;
            let next = x - grad * alpha + (x - x_prev) * beta;
            Ok(state.advance(next, None))
        }
        MethodKind::Nesterov => {
            let y = x + (x - x_prev) * beta;
            let grad = obj.gradient(&y)?;
            let next = &y - grad * alpha;
            Ok(state.advance(next, Some(y)))
        }
        MethodKind::TripleMomentum => {
            let probe = x * (1.0 + gamma) - x_prev * gamma;
            let grad = obj.gradient(&probe)?;
            let next = x * (1.0 + beta) - x_prev * beta - grad * alpha;
            Ok(state.advance(next, None))
        }
        MethodKind::NesterovGaussSeidel => {
            let y_prev = state.auxiliary.as_ref().ok_or(Error::MissingAuxiliary)?;
            check_dim(obj.dim(), y_prev.len())?;
            let grad = obj.gradient(x)?;
            let y = y_prev * beta + x * (1.0 - beta) - grad * alpha;
            let next = x * beta + &y * (1.0 - beta);
            Ok(state.advance(next, Some(y)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::generate_quadratic;
    use crate::rng;
    use rand::Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    /// Per-method rows of the general-parameter two-step table, written out
    /// independently of `affine_coefficients`.
    fn table_coefficients(spec: &MethodSpec, lambda: f64) -> (f64, f64) {
        let (al, be, ga) = (spec.alpha(), spec.beta(), spec.gamma());
        match spec.kind() {
            MethodKind::HeavyBall => (1.0 - al * lambda + be, -be),
            MethodKind::Nesterov => ((1.0 - al * lambda) * (1.0 + be), -(1.0 - al * lambda) * be),
            MethodKind::TripleMomentum => {
                (1.0 + be - al * (1.0 + ga) * lambda, al * ga * lambda - be)
            }
            MethodKind::NesterovGaussSeidel => (
                2.0 * be + (1.0 - be).powi(2) - al * (1.0 - be) * lambda,
                -be * be,
            ),
        }
    }

    fn random_spec<R: Rng>(rng: &mut R, kind: MethodKind) -> MethodSpec {
        MethodSpec::new(
            kind,
            rng.random_range(0.01..1.0),
            rng.random_range(0.0..0.95),
            rng.random_range(0.0..0.5),
        )
        .unwrap()
    }

    #[test]
    fn optimal_tunings_for_mu1_l4() {
        let hb = optimal_hyperparams(MethodKind::HeavyBall, 1.0, 4.0).unwrap();
        assert!(close(hb.alpha(), 4.0 / 9.0, 1e-15) && close(hb.beta(), 1.0 / 9.0, 1e-15));
        let nag = optimal_hyperparams(MethodKind::Nesterov, 1.0, 4.0).unwrap();
        assert!(close(nag.alpha(), 0.25, 1e-15) && close(nag.beta(), 1.0 / 3.0, 1e-15));
        let tmm = optimal_hyperparams(MethodKind::TripleMomentum, 1.0, 4.0).unwrap();
        assert!(close(tmm.alpha(), 3.0 / 8.0, 1e-15));
        assert!(close(tmm.beta(), 1.0 / 6.0, 1e-15));
        assert!(close(tmm.gamma(), 1.0 / 9.0, 1e-15));
        let gs = optimal_hyperparams(MethodKind::NesterovGaussSeidel, 1.0, 4.0).unwrap();
        // denominator 4 + 1 + 2·2 = 9
        assert!(close(gs.alpha(), 6.0 / 9.0, 1e-15) && close(gs.beta(), 3.0 / 9.0, 1e-15));
    }

    #[test]
    fn heavy_ball_with_mu_equal_l_is_gradient_descent() {
        let hb = optimal_hyperparams(MethodKind::HeavyBall, 2.5, 2.5).unwrap();
        assert!(close(hb.alpha(), 1.0 / 2.5, 1e-15));
        assert_eq!(hb.beta(), 0.0);
        let c = scalar_coefficients(&hb, 2.5);
        assert!(c.a.abs() < 1e-15 && c.b == 0.0);
    }

    #[test]
    fn optimal_tuning_rejects_non_strongly_convex() {
        for kind in MethodKind::ALL {
            assert!(optimal_hyperparams(kind, 0.0, 1.0).is_err());
            assert!(optimal_hyperparams(kind, 2.0, 1.0).is_err());
        }
    }

    #[test]
    fn spec_validation() {
        assert!(MethodSpec::heavy_ball(0.0, 0.5).is_err());
        assert!(MethodSpec::heavy_ball(0.1, -0.5).is_err());
        assert!(MethodSpec::nesterov(0.1, -0.1).is_err());
        assert!(MethodSpec::nesterov_gauss_seidel(0.1, f64::NAN).is_err());
        assert!(MethodSpec::triple_momentum(0.1, -0.1, 0.2).is_ok());
        assert_eq!(
            MethodSpec::new(MethodKind::HeavyBall, 0.1, 0.2, 0.7)
                .unwrap()
                .gamma(),
            0.0
        );
        assert_eq!(
            "nag-gs".parse::<MethodKind>().unwrap(),
            MethodKind::NesterovGaussSeidel
        );
        assert_eq!("HB".parse::<MethodKind>().unwrap(), MethodKind::HeavyBall);
        assert!("adam".parse::<MethodKind>().is_err());
    }

    #[test]
    fn scalar_coefficient_examples() {
        let hb = MethodSpec::heavy_ball(4.0 / 9.0, 1.0 / 9.0).unwrap();
        let c = scalar_coefficients(&hb, 2.0);
        assert!(close(c.a, 2.0 / 9.0, 1e-15) && close(c.b, -1.0 / 9.0, 1e-15));

        let gd = MethodSpec::heavy_ball(0.3, 0.0).unwrap();
        let c = scalar_coefficients(&gd, 2.0);
        assert!(close(c.a, 1.0 - 0.6, 1e-15) && c.b == 0.0);

        let tmm = optimal_hyperparams(MethodKind::TripleMomentum, 1.0, 4.0).unwrap();
        let c = scalar_coefficients(&tmm, 4.0);
        assert!(c.b.abs() < 1e-15 && close(c.a, -0.5, 1e-14));
    }

    #[test]
    fn coefficients_match_general_table() {
        let mut rng = rng::seeded(3, 0);
        for kind in MethodKind::ALL {
            for _ in 0..200 {
                let spec = random_spec(&mut rng, kind);
                let lambda = rng.random_range(0.0..10.0);
                let c = scalar_coefficients(&spec, lambda);
                let (a, b) = table_coefficients(&spec, lambda);
                assert!(
                    close(c.a, a, 1e-13) && close(c.b, b, 1e-13),
                    "{spec} at {lambda}"
                );
            }
        }
    }

    #[test]
    fn optimal_coefficients_match_closed_forms() {
        // Optimal-parameter rows that agree with substitution: HB (a, b),
        // NAG (a, b), TMM (a) and NAG-GS (b).
        let (mu, l): (f64, f64) = (1.3, 57.0);
        let (sl, sm) = (l.sqrt(), mu.sqrt());
        let hb = optimal_hyperparams(MethodKind::HeavyBall, mu, l).unwrap();
        let nag = optimal_hyperparams(MethodKind::Nesterov, mu, l).unwrap();
        let tmm = optimal_hyperparams(MethodKind::TripleMomentum, mu, l).unwrap();
        let gs = optimal_hyperparams(MethodKind::NesterovGaussSeidel, mu, l).unwrap();
        for i in 0..=50 {
            let lambda = mu + (l - mu) * i as f64 / 50.0;
            let c = scalar_coefficients(&hb, lambda);
            assert!(close(
                c.a,
                2.0 * (l + mu - 2.0 * lambda) / (sl + sm).powi(2),
                1e-12
            ));
            assert!(close(c.b, -((sl - sm) / (sl + sm)).powi(2), 1e-12));
            let c = scalar_coefficients(&nag, lambda);
            assert!(close(c.a, 2.0 * sl * (l - lambda) / ((sl + sm) * l), 1e-12));
            assert!(close(
                c.b,
                -(sl - sm) * (l - lambda) / ((sl + sm) * l),
                1e-12
            ));
            let c = scalar_coefficients(&tmm, lambda);
            let q = (mu / l).sqrt();
            assert!(close(
                c.a,
                (2.0 * l + mu - 3.0 * lambda - (l - lambda) * q) / (l * (1.0 + q)),
                1e-12
            ));
            let c = scalar_coefficients(&gs, lambda);
            assert!(close(
                c.b,
                -((l - mu) / (l + mu + 2.0 * sm * sl)).powi(2),
                1e-12
            ));
        }
    }

    #[test]
    fn theoretical_rate_examples() {
        let hb = MethodSpec::heavy_ball(4.0 / 9.0, 1.0 / 9.0).unwrap();
        assert!(close(theoretical_rate(&hb, 1.0).unwrap(), 1.0 / 3.0, 1e-15));
        let gs = MethodSpec::nesterov_gauss_seidel(1.0, 0.5).unwrap();
        assert!(close(theoretical_rate(&gs, 1.0).unwrap(), 0.5, 1e-15));
        let gd = MethodSpec::heavy_ball(1.0 / 3.0, 0.0).unwrap();
        assert_eq!(theoretical_rate(&gd, 3.0).unwrap(), 0.0);
        // TMM optimal has real distinct roots at both ends of [1, 4]
        let tmm = optimal_hyperparams(MethodKind::TripleMomentum, 1.0, 4.0).unwrap();
        assert!(theoretical_rate(&tmm, 2.5).is_ok());
        assert!(matches!(
            theoretical_rate(&tmm, 1.0),
            Err(Error::NotConjugatePair { .. })
        ));
        assert!(matches!(
            theoretical_rate(&tmm, 4.0),
            Err(Error::NotConjugatePair { .. })
        ));
    }

    #[test]
    fn eigenbasis_step_examples() {
        let coeffs = [TwoStepCoefficients::new(2.0 / 9.0, -1.0 / 9.0)];
        let state =
            IterationState::new(DVector::from_element(1, 1.0), DVector::from_element(1, 1.0))
                .unwrap();
        let next = step_quadratic_eigenbasis(&coeffs, state).unwrap();
        assert!(close(next.current[0], 1.0 / 9.0, 1e-15));
        assert_eq!(next.previous[0], 1.0);

        let zeros = [TwoStepCoefficients::new(0.0, 0.0); 3];
        let state = IterationState::new(
            DVector::from_element(3, 2.0),
            DVector::from_element(3, -1.0),
        )
        .unwrap();
        assert_eq!(
            step_quadratic_eigenbasis(&zeros, state).unwrap().current,
            DVector::zeros(3)
        );

        let origin = IterationState::start(MethodKind::HeavyBall, DVector::zeros(2));
        let coeffs = [TwoStepCoefficients::new(0.4, -0.3); 2];
        assert_eq!(
            step_quadratic_eigenbasis(&coeffs, origin).unwrap().current,
            DVector::zeros(2)
        );

        let mismatch = IterationState::start(MethodKind::HeavyBall, DVector::zeros(3));
        assert!(step_quadratic_eigenbasis(&coeffs, mismatch).is_err());
    }

    #[test]
    fn first_step_is_a_gradient_step() {
        let p = generate_quadratic(6, 0.5, 8.0, 13).unwrap();
        let mut rng = rng::seeded(13, 1);
        let x0 = rng::normal_vector(&mut rng, 6);
        for kind in MethodKind::ALL {
            if kind == MethodKind::NesterovGaussSeidel {
                continue;
            }
            let spec = optimal_hyperparams(kind, 0.5, 8.0).unwrap();
            let expected = &x0 - p.gradient(&x0).unwrap() * spec.alpha();
            let quad = step_quadratic(&p, &spec, IterationState::start(kind, x0.clone())).unwrap();
            let general = step_general(&p, &spec, IterationState::start(kind, x0.clone())).unwrap();
            assert!((&quad.current - &expected).amax() < 1e-12, "{kind}");
            assert!((&general.current - &expected).amax() < 1e-12, "{kind}");
        }
    }

    #[test]
    fn solution_is_a_fixed_point() {
        let p = generate_quadratic(5, 1.0, 9.0, 4).unwrap();
        for kind in MethodKind::ALL {
            let spec = optimal_hyperparams(kind, 1.0, 9.0).unwrap();
            let start = IterationState::start(kind, p.minimizer().clone());
            let q = step_quadratic(&p, &spec, start.clone()).unwrap();
            let g = step_general(&p, &spec, start).unwrap();
            assert!((&q.current - p.minimizer()).amax() < 1e-12);
            assert!((&g.current - p.minimizer()).amax() < 1e-12);
        }
    }

    #[test]
    fn engines_agree_on_quadratics() {
        let p = generate_quadratic(12, 0.2, 20.0, 5).unwrap();
        let mut rng = rng::seeded(5, 1);
        for kind in MethodKind::ALL {
            let spec = random_spec(&mut rng, kind);
            let coeffs: Vec<_> = p
                .eigvals()
                .iter()
                .map(|&l| scalar_coefficients(&spec, l))
                .collect();
            let x0 = rng::normal_vector(&mut rng, 12);
            let mut quad = IterationState::start(kind, x0.clone());
            let mut general = quad.clone();
            let mut eigen =
                IterationState::new(p.to_eigenbasis(&x0).unwrap(), p.to_eigenbasis(&x0).unwrap())
                    .unwrap();
            for _ in 0..30 {
                quad = step_quadratic(&p, &spec, quad).unwrap();
                general = step_general(&p, &spec, general).unwrap();
                eigen = step_quadratic_eigenbasis(&coeffs, eigen).unwrap();
                let via_eigen = p.from_eigenbasis(&eigen.current).unwrap();
                let scale = quad.current.amax().max(1.0);
                assert!(
                    (&quad.current - &general.current).amax() <= 1e-10 * scale,
                    "{kind}"
                );
                assert!(
                    (&quad.current - &via_eigen).amax() <= 1e-10 * scale,
                    "{kind}"
                );
            }
        }
    }

    #[test]
    fn nesterov_without_momentum_is_gradient_descent() {
        let p = generate_quadratic(4, 1.0, 3.0, 8).unwrap();
        let spec = MethodSpec::nesterov(0.2, 0.0).unwrap();
        let mut rng = rng::seeded(8, 1);
        let x = rng::normal_vector(&mut rng, 4);
        let xp = rng::normal_vector(&mut rng, 4);
        let next = step_general(&p, &spec, IterationState::new(x.clone(), xp).unwrap()).unwrap();
        let expected = &x - p.gradient(&x).unwrap() * 0.2;
        assert!((next.current - expected).amax() < 1e-14);
    }

    #[test]
    fn two_step_reduction_on_one_dimensional_problems() {
        // Eliminating the y-sequence must give the tabulated (a, b).
        let mut rng = rng::seeded(9, 0);
        for kind in MethodKind::ALL {
            for _ in 0..20 {
                let lambda = rng.random_range(0.1..5.0);
                let p = QuadraticProblem::from_factors(
                    nalgebra::DMatrix::identity(1, 1),
                    DVector::from_element(1, lambda),
                    DVector::zeros(1),
                    0.0,
                )
                .unwrap();
                let spec = random_spec(&mut rng, kind);
                let (a, b) = table_coefficients(&spec, lambda);
                let mut state = IterationState::start(kind, DVector::from_element(1, 1.0));
                for _ in 0..5 {
                    let (xk, xkm1) = (state.current[0], state.previous[0]);
                    state = step_general(&p, &spec, state).unwrap();
                    let want = a * xk + b * xkm1;
                    assert!(
                        (state.current[0] - want).abs() <= 1e-12 * want.abs().max(1.0),
                        "{kind}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_seidel_needs_auxiliary_state() {
        let p = generate_quadratic(3, 1.0, 2.0, 0).unwrap();
        let spec = MethodSpec::nesterov_gauss_seidel(0.3, 0.2).unwrap();
        let bare = IterationState::new(DVector::zeros(3), DVector::zeros(3)).unwrap();
        assert!(matches!(
            step_general(&p, &spec, bare),
            Err(Error::MissingAuxiliary)
        ));
    }
}
