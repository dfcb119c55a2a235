//! Test objectives: seeded quadratics with a prescribed spectrum, plus the
//! non-quadratic counterexamples (cosine-perturbed parabola, exp-norm,
//! Rosenbrock).

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::spectral::symmetric_eigendecomposition;

/// Anything the iteration engines can query for values and gradients.
pub trait Oracle {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> Result<f64>;
    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
    fn minimizer(&self) -> Option<&DVector<f64>>;
}

/// `f(x) = ½ xᵀWx − linearᵀx + constant` with `W` symmetric positive
/// semidefinite, stored together with its eigenfactors `W = Q·diag(λ)·Qᵀ`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    matrix: DMatrix<f64>,
    linear: DVector<f64>,
    constant: f64,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
    minimizer: DVector<f64>,
    minimizer_unique: bool,
}

impl QuadraticProblem {
    /// Builds a problem from explicit eigenfactors and a chosen solution
    /// `x*`; the linear term is set to `W·x*`.
    ///
    /// `eigvals` must be nondecreasing and nonnegative, `eigvecs` square
    /// with matching order.
    pub fn from_factors(
        eigvecs: DMatrix<f64>,
        eigvals: DVector<f64>,
        minimizer: DVector<f64>,
        constant: f64,
    ) -> Result<Self> {
        let dim = eigvals.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_dim(dim, eigvecs.nrows())?;
        check_dim(dim, eigvecs.ncols())?;
        check_dim(dim, minimizer.len())?;
        validate_spectrum(&eigvals)?;

        let scaled = &eigvecs * DMatrix::from_diagonal(&eigvals);
        let mut matrix = scaled * eigvecs.transpose();
        symmetrize(&mut matrix);
        let linear = &matrix * &minimizer;
        Ok(Self {
            matrix,
            linear,
            constant,
            minimizer_unique: eigvals[0] > 0.0,
            eigvals,
            eigvecs,
            minimizer,
        })
    }

    /// Builds a problem from a user-supplied symmetric matrix. The
    /// eigenfactors are computed with cyclic Jacobi; when `W` is singular
    /// the stored minimizer is the minimum-norm solution and
    /// [`Self::minimizer_is_unique`] reports `false`.
    pub fn from_matrix(matrix: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        check_dim(dim, linear.len())?;
        let (eigvecs, eigvals) = symmetric_eigendecomposition(&matrix)?;
        validate_spectrum(&eigvals)?;

        let scale = eigvals[dim - 1].abs().max(f64::MIN_POSITIVE);
        let rotated = eigvecs.transpose() * &linear;
        let solved = DVector::from_fn(dim, |i, _| {
            if eigvals[i] > 1e-12 * scale {
                rotated[i] / eigvals[i]
            } else {
                0.0
            }
        });
        let minimizer = &eigvecs * solved;
        let mut matrix = matrix;
        symmetrize(&mut matrix);
        Ok(Self {
            matrix,
            linear,
            constant,
            minimizer_unique: eigvals[0] > 1e-12 * scale,
            eigvals,
            eigvecs,
            minimizer,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn linear(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Eigenvalues of `W`, nondecreasing.
    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    /// Orthogonal eigenvector matrix `Q` (columns match [`Self::eigvals`]).
    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    /// The solution `x*`. For singular `W` this is one of infinitely many.
    pub fn minimizer(&self) -> &DVector<f64> {
        &self.minimizer
    }

    pub fn minimizer_is_unique(&self) -> bool {
        self.minimizer_unique
    }

    /// Smallest eigenvalue (strong convexity constant).
    pub fn mu(&self) -> f64 {
        self.eigvals[0]
    }

    /// Largest eigenvalue (gradient Lipschitz constant).
    pub fn lipschitz(&self) -> f64 {
        self.eigvals[self.dim() - 1]
    }

    pub fn evaluate(&self, x: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let wx = &self.matrix * x;
        Ok(0.5 * x.dot(&wx) - self.linear.dot(x) + self.constant)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.matrix * x - &self.linear)
    }

    /// Maps a point to eigen-coordinates relative to the solution,
    /// `Qᵀ(x − x*)`.
    pub fn to_eigenbasis(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eigvecs.tr_mul(&(x - &self.minimizer)))
    }

    /// Inverse of [`Self::to_eigenbasis`]: `Q·x̂ + x*`.
    pub fn from_eigenbasis(&self, coords: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim(), coords.len())?;
        Ok(&self.eigvecs * coords + &self.minimizer)
    }
}

impl Oracle for QuadraticProblem {
    fn dim(&self) -> usize {
        QuadraticProblem::dim(self)
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        self.evaluate(x)
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        QuadraticProblem::gradient(self, x)
    }

    fn minimizer(&self) -> Option<&DVector<f64>> {
        Some(&self.minimizer)
    }
}

fn validate_spectrum(eigvals: &DVector<f64>) -> Result<()> {
    if eigvals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("spectrum must be finite".into()));
    }
    if eigvals.as_slice().windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "spectrum must be nondecreasing".into(),
        ));
    }
    let scale = eigvals[eigvals.len() - 1].abs().max(1.0);
    if eigvals[0] < -1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "matrix is not positive semidefinite (smallest eigenvalue {:e})",
            eigvals[0]
        )));
    }
    Ok(())
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// `dim` equally spaced values from `mu` to `lipschitz` inclusive; a single
/// value `lipschitz` when `dim == 1`.
pub fn equally_spaced_spectrum(dim: usize, mu: f64, lipschitz: f64) -> DVector<f64> {
    if dim == 1 {
        return DVector::from_element(1, lipschitz);
    }
    let step = (lipschitz - mu) / (dim - 1) as f64;
    DVector::from_fn(dim, |i, _| {
        if i == dim - 1 {
            lipschitz
        } else {
            mu + i as f64 * step
        }
    })
}

/// Haar-distributed orthogonal matrix: QR of a standard-normal matrix with
/// the columns sign-corrected so that `diag(R) > 0`.
pub fn haar_orthogonal<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let gaussian = rng::normal_matrix(rng, dim, dim);
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

/// Random quadratic with spectrum spread evenly over `[mu, lipschitz]`,
/// Haar-random eigenvectors, a standard-normal solution `x*` and
/// `linear = W·x*`. The constant term is zero.
///
/// `mu = 0` is allowed; the problem is then only convex and `x*` is the
/// generating solution, not the unique one.
pub fn generate_quadratic(
    dim: usize,
    mu: f64,
    lipschitz: f64,
    seed: u64,
) -> Result<QuadraticProblem> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(mu.is_finite() && lipschitz.is_finite()) || mu < 0.0 || lipschitz <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= mu and L > 0 (got mu={mu}, L={lipschitz})"
        )));
    }
    if lipschitz < mu || (lipschitz == mu && dim > 1) {
        return Err(Error::InvalidParameter(format!(
            "need L > mu for dim > 1 (got mu={mu}, L={lipschitz})"
        )));
    }

    let mut rng = rng::seeded(seed, rng::PROBLEM_STREAM);
    let eigvecs = haar_orthogonal(&mut rng, dim);
    let minimizer = rng::normal_vector(&mut rng, dim);
    let eigvals = equally_spaced_spectrum(dim, mu, lipschitz);
    QuadraticProblem::from_factors(eigvecs, eigvals, minimizer, 0.0)
}

type ValueFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;

/// A general smooth objective given by value and gradient closures.
#[derive(Clone)]
pub struct Objective {
    name: String,
    dim: usize,
    value: Arc<ValueFn>,
    gradient: Arc<GradientFn>,
    minimizer: Option<DVector<f64>>,
    mu: Option<f64>,
    lipschitz: Option<f64>,
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Objective")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("minimizer", &self.minimizer)
            .field("mu", &self.mu)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

impl Objective {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            minimizer: None,
            mu: None,
            lipschitz: None,
        }
    }

    pub fn with_minimizer(mut self, minimizer: DVector<f64>) -> Self {
        self.minimizer = Some(minimizer);
        self
    }

    pub fn with_constants(mut self, mu: f64, lipschitz: f64) -> Self {
        self.mu = Some(mu);
        self.lipschitz = Some(lipschitz);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}

impl Oracle for Objective {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((self.value)(x))
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.dim, x.len())?;
        Ok((self.gradient)(x))
    }

    fn minimizer(&self) -> Option<&DVector<f64>> {
        self.minimizer.as_ref()
    }
}

const COSINE_AMPLITUDE: f64 = 1.99 / 400.0;
const COSINE_FREQUENCY: f64 = 20.0;

/// `f(x) = x² + (1.99/400)·cos(20x)`: strongly convex with `f'' ∈ [0.01, 3.99]`,
/// yet Heavy Ball with the quadratic-optimal tuning fails on it.
pub fn cosine_counterexample() -> Objective {
    Objective::new(
        "cosine",
        1,
        |x| x[0] * x[0] + COSINE_AMPLITUDE * (COSINE_FREQUENCY * x[0]).cos(),
        |x| {
            DVector::from_element(
                1,
                2.0 * x[0] - COSINE_AMPLITUDE * COSINE_FREQUENCY * (COSINE_FREQUENCY * x[0]).sin(),
            )
        },
    )
    .with_minimizer(DVector::zeros(1))
    .with_constants(0.01, 3.99)
}

/// `f(x) = exp(‖x‖²)`, minimized at the origin.
pub fn exp_norm_objective(dim: usize) -> Result<Objective> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(Objective::new(
        "exp-norm",
        dim,
        |x| x.norm_squared().exp(),
        |x| x * (2.0 * x.norm_squared().exp()),
    )
    .with_minimizer(DVector::zeros(dim)))
}

/// `f(x, y) = (1 − x)² + 100(y − x²)²`, minimized at `(1, 1)`.
pub fn rosenbrock_objective() -> Objective {
    Objective::new(
        "rosenbrock",
        2,
        |p| {
            let (x, y) = (p[0], p[1]);
            (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
        },
        |p| {
            let (x, y) = (p[0], p[1]);
            let inner = y - x * x;
            DVector::from_vec(vec![-2.0 * (1.0 - x) - 400.0 * x * inner, 200.0 * inner])
        },
    )
    .with_minimizer(DVector::from_element(2, 1.0))
}
