use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::lyapunov::{deviation_v, LyapunovSeries};
use crate::methods::{step_deviation, step_general, IterationState, MethodSpec};
use crate::problems::{Oracle, QuadraticProblem};
use crate::rng;

/// Distance from the solution beyond which a run counts as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// What a trace runs on.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    /// Uses the exact two-step update on deviations from `x*`.
    Quadratic(&'a QuadraticProblem),
    /// Uses the literal gradient-based update; needs a known minimizer.
    General(&'a dyn Oracle),
}

impl Target<'_> {
    fn dim(&self) -> usize {
        match self {
            Target::Quadratic(p) => p.dim(),
            Target::General(o) => o.dim(),
        }
    }

    fn default_label(&self) -> String {
        match self {
            Target::Quadratic(p) => format!(
                "quadratic(d={}, mu={}, L={})",
                p.dim(),
                p.mu(),
                p.lipschitz()
            ),
            Target::General(o) => format!("objective(d={})", o.dim()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TraceOptions {
    /// Stop once `|V_k|` and `‖x_k − x*‖²` are both at or below this level.
    pub stop_tolerance: Option<f64>,
    /// `x_{−1}`; defaults to `x_0`.
    pub previous: Option<DVector<f64>>,
    /// Problem descriptor stored in the trace.
    pub label: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceMetrics {
    /// `f(x_k) − f(x*)`.
    pub objective_gap: f64,
    /// `‖x_k − x*‖`.
    pub distance: f64,
    /// `V(x_k, x_{k−1}, x_{k−2})`, defined from `k = 2`.
    pub lyapunov: Option<f64>,
}

/// Iterates `x_0, x_1, ...` of one run together with their metrics.
#[derive(Debug, Clone)]
pub struct Trace {
    pub method: MethodSpec,
    pub problem: String,
    pub seed: Option<u64>,
    pub iterates: Vec<DVector<f64>>,
    pub metrics: Vec<TraceMetrics>,
    /// Set when the distance passed [`DIVERGENCE_THRESHOLD`] or the oracle
    /// overflowed; the trace ends at that iterate.
    pub diverged: bool,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.metrics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metrics.is_empty()
    }

    pub fn lyapunov_series(&self) -> LyapunovSeries {
        LyapunovSeries::new(self.metrics.iter().filter_map(|m| m.lyapunov).collect())
    }

    pub fn distances(&self) -> Vec<f64> {
        self.metrics.iter().map(|m| m.distance).collect()
    }

    pub fn objective_gaps(&self) -> Vec<f64> {
        self.metrics.iter().map(|m| m.objective_gap).collect()
    }

    /// Number of `k` with `distance_{k+1} > distance_k`.
    pub fn distance_increases(&self) -> usize {
        self.metrics
            .windows(2)
            .filter(|w| w[1].distance > w[0].distance)
            .count()
    }

    pub fn last_lyapunov(&self) -> Option<f64> {
        self.metrics.iter().rev().find_map(|m| m.lyapunov)
    }
}

/// Runs `iters` iterates (counting `x_0`) with the default options.
pub fn run_trace(
    target: Target<'_>,
    spec: &MethodSpec,
    x0: &DVector<f64>,
    iters: usize,
) -> Result<Trace> {
    run_trace_with(target, spec, x0, iters, &TraceOptions::default())
}

pub fn run_trace_with(
    target: Target<'_>,
    spec: &MethodSpec,
    x0: &DVector<f64>,
    iters: usize,
    options: &TraceOptions,
) -> Result<Trace> {
    if iters < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 iterates, got {iters}"
        )));
    }
    check_dim(target.dim(), x0.len())?;
    if let Some(prev) = &options.previous {
        check_dim(target.dim(), prev.len())?;
    }
    let mut trace = Trace {
        method: *spec,
        problem: options
            .label
            .clone()
            .unwrap_or_else(|| target.default_label()),
        seed: options.seed,
        iterates: Vec::with_capacity(iters),
        metrics: Vec::with_capacity(iters),
        diverged: false,
    };
    match target {
        Target::Quadratic(p) => run_quadratic(p, spec, x0, iters, options, &mut trace)?,
        Target::General(o) => run_general(o, spec, x0, iters, options, &mut trace)?,
    }
    Ok(trace)
}

/// Keeps the last three deviations for `V`.
struct Window {
    errors: [Option<DVector<f64>>; 3],
}

impl Window {
    fn push(&mut self, e: DVector<f64>) -> Result<Option<f64>> {
        self.errors.rotate_right(1);
        self.errors[0] = Some(e);
        match &self.errors {
            [Some(e0), Some(e1), Some(e2)] => deviation_v(e0, e1, e2).map(Some),
            _ => Ok(None),
        }
    }
}

fn should_stop(options: &TraceOptions, m: &TraceMetrics) -> bool {
    match (options.stop_tolerance, m.lyapunov) {
        (Some(tol), Some(v)) => v.abs() <= tol && m.distance * m.distance <= tol,
        _ => false,
    }
}

fn run_quadratic(
    p: &QuadraticProblem,
    spec: &MethodSpec,
    x0: &DVector<f64>,
    iters: usize,
    options: &TraceOptions,
    trace: &mut Trace,
) -> Result<()> {
    let x_star = p.minimizer();
    let gap = |e: &DVector<f64>| 0.5 * e.dot(&(p.matrix() * e));
    let mut window = Window {
        errors: [None, None, None],
    };
    let mut e = x0 - x_star;
    let mut e_prev = options
        .previous
        .as_ref()
        .map_or_else(|| e.clone(), |x| x - x_star);
    for k in 0..iters {
        if k > 0 {
            let next = step_deviation(p, spec, &e, &e_prev);
            e_prev = std::mem::replace(&mut e, next);
        }
        let distance = e.norm();
        if distance.is_nan() || distance > DIVERGENCE_THRESHOLD {
            trace.diverged = true;
            break;
        }
        let metrics = TraceMetrics {
            objective_gap: gap(&e),
            distance,
            lyapunov: window.push(e.clone())?,
        };
        trace.iterates.push(&e + x_star);
        trace.metrics.push(metrics);
        if should_stop(options, &metrics) {
            break;
        }
    }
    Ok(())
}

fn run_general(
    o: &dyn Oracle,
    spec: &MethodSpec,
    x0: &DVector<f64>,
    iters: usize,
    options: &TraceOptions,
    trace: &mut Trace,
) -> Result<()> {
    let x_star = o.minimizer().ok_or(Error::MissingMinimizer)?.clone();
    check_dim(o.dim(), x_star.len())?;
    let f_star = o.value(&x_star)?;
    let mut window = Window {
        errors: [None, None, None],
    };
    let mut state = IterationState::start(spec.kind(), x0.clone());
    if let Some(prev) = &options.previous {
        state.previous = prev.clone();
    }
    for k in 0..iters {
        if k > 0 {
            state = step_general(o, spec, state)?;
        }
        let x = &state.current;
        if x.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite(k));
        }
        let e = x - &x_star;
        let distance = e.norm();
        if distance.is_nan() || distance > DIVERGENCE_THRESHOLD {
            trace.diverged = true;
            break;
        }
        let value = o.value(x)?;
        if value.is_nan() {
            return Err(Error::NonFinite(k));
        }
        if value.is_infinite() {
            trace.diverged = true;
            break;
        }
        let metrics = TraceMetrics {
            objective_gap: value - f_star,
            distance,
            lyapunov: window.push(e)?,
        };
        trace.iterates.push(x.clone());
        trace.metrics.push(metrics);
        if should_stop(options, &metrics) {
            break;
        }
    }
    Ok(())
}

/// Standard-normal direction scaled so that `‖x_0 − center‖ = radius`.
pub fn start_point(center: &DVector<f64>, radius: f64, seed: u64) -> DVector<f64> {
    let mut rng = rng::seeded(seed, rng::START_STREAM);
    let mut dir = rng::normal_vector(&mut rng, center.len());
    let n = dir.norm();
    if n > 0.0 {
        dir /= n;
    }
    center + dir * radius
}
