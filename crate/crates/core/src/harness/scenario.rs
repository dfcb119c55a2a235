use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::Rng;

use super::io::{export_csv, write_certificate_csv, write_certificate_report};
use super::svg::{render_svg, Panel, PointCloud, Series};
use super::trace::{run_trace_with, start_point, Target, Trace, TraceOptions};
use crate::error::{Error, Result};
use crate::lyapunov::{check_monotone, MonotonicityReport, DEFAULT_MONOTONE_TOL};
use crate::methods::{optimal_hyperparams, MethodKind, MethodSpec};
use crate::problems::{
    cosine_counterexample, equally_spaced_spectrum, exp_norm_objective, generate_quadratic,
    rosenbrock_objective, Objective, Oracle, QuadraticProblem,
};
use crate::rng;
use crate::spectral::{analyze, SpectralCertificate, DEFAULT_CONJUGATE_TOL};

/// Named scenarios with a one-line description.
pub const SCENARIOS: [(&str, &str); 10] = [
    (
        "fig1",
        "d=107, optimal tuning: non-monotone distance next to monotone V",
    ),
    (
        "spectrum",
        "iteration-matrix spectra of the optimal tunings",
    ),
    (
        "quad-optimal",
        "optimal tuning on random quadratics over a sweep of dimensions",
    ),
    (
        "quad-nonoptimal",
        "detuned but still eligible hyperparameters",
    ),
    ("convex-mu0", "convex quadratic with a zero eigenvalue"),
    (
        "cosine",
        "Heavy Ball on x^2 + (1.99/400)cos(20x): V is not monotone",
    ),
    (
        "cosine-sweep",
        "exploratory: lowers beta until V becomes monotone on the cosine objective",
    ),
    (
        "tmm-witness",
        "searches for a non-monotone V under optimal Triple Momentum",
    ),
    ("exp-norm", "f(x) = exp(|x|^2)"),
    ("rosenbrock", "two-dimensional Rosenbrock function"),
];

/// How each method's hyperparameters are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyperparameters {
    /// Optimal for `(mu, L)`.
    Optimal,
    /// Optimal for `(mu/factor, factor·L)`.
    Detuned {
        factor: f64,
    },
    /// Optimal for `(L/kappa, L)`; usable when `mu = 0`.
    Capped {
        kappa: f64,
    },
    Explicit {
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
}

impl Hyperparameters {
    pub fn resolve(&self, kind: MethodKind, mu: f64, lipschitz: f64) -> Result<MethodSpec> {
        match *self {
            Hyperparameters::Optimal => optimal_hyperparams(kind, mu, lipschitz),
            Hyperparameters::Detuned { factor } => {
                optimal_hyperparams(kind, mu / factor, lipschitz * factor)
            }
            Hyperparameters::Capped { kappa } => {
                optimal_hyperparams(kind, lipschitz / kappa, lipschitz)
            }
            Hyperparameters::Explicit { alpha, beta, gamma } => {
                MethodSpec::new(kind, alpha, beta, gamma)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Problem dimensions; quadratic scenarios run once per entry.
    pub dims: Vec<usize>,
    pub mu: f64,
    pub lipschitz: f64,
    pub methods: Vec<MethodKind>,
    pub hyperparameters: Hyperparameters,
    /// Iterates per trace, counting `x_0`.
    pub iters: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Early stop level for `|V|` and `‖x − x*‖²`.
    pub stop_tolerance: Option<f64>,
    /// `‖x_0 − x*‖`.
    pub start_radius: f64,
    /// Number of seeds tried by search scenarios.
    pub samples: usize,
}

impl ScenarioConfig {
    /// Default configuration of a named scenario.
    pub fn preset(name: &str, out_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut c = ScenarioConfig {
            name: name.to_string(),
            dims: vec![100],
            mu: 1.0,
            lipschitz: 100.0,
            methods: MethodKind::ALL.to_vec(),
            hyperparameters: Hyperparameters::Optimal,
            iters: 2000,
            seed: 0,
            out_dir: out_dir.into(),
            stop_tolerance: Some(DEFAULT_MONOTONE_TOL),
            start_radius: 10.0,
            samples: 100,
        };
        match name {
            "fig1" => {
                c.dims = vec![107];
                c.lipschitz = 1000.0;
                c.stop_tolerance = None;
            }
            "spectrum" | "quad-optimal" => {
                if name == "quad-optimal" {
                    c.dims = vec![100, 200, 500];
                }
            }
            "quad-nonoptimal" => c.hyperparameters = Hyperparameters::Detuned { factor: 2.0 },
            "convex-mu0" => {
                c.mu = 0.0;
                c.hyperparameters = Hyperparameters::Capped { kappa: 100.0 };
                c.stop_tolerance = None;
            }
            "cosine" | "cosine-sweep" => {
                c.dims = vec![1];
                c.mu = 0.01;
                c.lipschitz = 3.99;
                c.methods = vec![MethodKind::HeavyBall];
                c.iters = 500;
                c.stop_tolerance = None;
                c.start_radius = 2.0;
            }
            "tmm-witness" => {
                c.dims = vec![2, 3, 5, 10, 20];
                c.methods = vec![MethodKind::TripleMomentum];
                c.iters = 300;
                c.stop_tolerance = None;
                c.samples = 200;
            }
            "exp-norm" => {
                c.dims = vec![10];
                c.mu = 2.0;
                c.lipschitz = 6.0 * std::f64::consts::E;
                c.start_radius = 0.5;
            }
            "rosenbrock" => {
                c.dims = vec![2];
                c.mu = 0.4;
                c.lipschitz = 1002.0;
                c.iters = 5000;
            }
            other => return Err(Error::UnknownScenario(other.to_string())),
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !SCENARIOS.iter().any(|(n, _)| *n == self.name) {
            return Err(Error::UnknownScenario(self.name.clone()));
        }
        if self.iters < 3 {
            return Err(Error::InvalidParameter(format!(
                "iters must be at least 3, got {}",
                self.iters
            )));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidParameter(
                "dimensions must be positive".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods selected".into()));
        }
        if !(self.start_radius > 0.0 && self.start_radius.is_finite()) {
            return Err(Error::InvalidParameter(
                "start radius must be positive".into(),
            ));
        }
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported but not part of the verdict.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    fn expect(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        Self {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }

    fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Info,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "INFO",
        };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Condensed record of one trace.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub label: String,
    pub method: MethodSpec,
    pub iterates: usize,
    pub diverged: bool,
    pub distance_increases: usize,
    pub final_lyapunov: Option<f64>,
    pub monotonicity: MonotonicityReport,
}

impl RunSummary {
    fn of(label: &str, trace: &Trace) -> Self {
        Self {
            label: label.to_string(),
            method: trace.method,
            iterates: trace.len(),
            diverged: trace.diverged,
            distance_increases: trace.distance_increases(),
            final_lyapunov: trace.last_lyapunov(),
            monotonicity: check_monotone(&trace.lyapunov_series()),
        }
    }

    fn describe(&self) -> String {
        let mut s = format!(
            "{} iterates, final V {}",
            self.iterates,
            fmt_opt(self.final_lyapunov)
        );
        match self.monotonicity.first_violation() {
            None => s.push_str(", V monotone"),
            Some(v) => {
                let _ = write!(
                    s,
                    ", {} V violations, first at k={} ({:.3e} -> {:.3e})",
                    self.monotonicity.violations.len(),
                    v.index,
                    v.v_prev,
                    v.v_next
                );
            }
        }
        if self.diverged {
            s.push_str(", diverged");
        }
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3e}"))
}

#[derive(Debug, Clone, Default)]
pub struct ScenarioOutcome {
    pub name: String,
    pub checks: Vec<Check>,
    pub certificates: Vec<(String, SpectralCertificate)>,
    pub runs: Vec<RunSummary>,
    pub files: Vec<PathBuf>,
}

impl ScenarioOutcome {
    /// `true` when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn report(&self) -> String {
        let mut s = format!("scenario: {}\n", self.name);
        for r in &self.runs {
            let _ = writeln!(s, "run {} [{}]: {}", r.label, r.method, r.describe());
        }
        for c in &self.checks {
            let _ = writeln!(s, "{c}");
        }
        let _ = writeln!(
            s,
            "verdict: {}",
            if self.passed() { "pass" } else { "fail" }
        );
        s
    }
}

/// Runs a scenario, writing its artifacts under `out_dir/<name>/`.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    config.validate()?;
    let dir = config.out_dir.join(&config.name);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut out = ScenarioOutcome {
        name: config.name.clone(),
        ..Default::default()
    };
    match config.name.as_str() {
        "fig1" | "quad-optimal" | "quad-nonoptimal" | "convex-mu0" => {
            quadratic_family(config, &dir, &mut out)?
        }
        "spectrum" => spectrum(config, &dir, &mut out)?,
        "cosine" => cosine(config, &dir, &mut out)?,
        "cosine-sweep" => cosine_sweep(config, &dir, &mut out)?,
        "tmm-witness" => tmm_witness(config, &dir, &mut out)?,
        "exp-norm" | "rosenbrock" => general_objective(config, &dir, &mut out)?,
        other => return Err(Error::UnknownScenario(other.to_string())),
    }
    let summary = dir.join("summary.txt");
    std::fs::write(&summary, out.report()).map_err(|e| Error::io(&summary, e))?;
    out.files.push(summary);
    Ok(out)
}

struct MethodRun {
    kind: MethodKind,
    trace: Trace,
    certificate: Option<SpectralCertificate>,
}

fn certify(
    dir: &Path,
    stem: &str,
    cert: &SpectralCertificate,
    out: &mut ScenarioOutcome,
) -> Result<()> {
    let csv = dir.join(format!("{stem}_certificate.csv"));
    let txt = dir.join(format!("{stem}_certificate.txt"));
    write_certificate_csv(cert, &csv)?;
    write_certificate_report(cert, &txt)?;
    out.files.extend([csv, txt]);
    out.certificates.push((stem.to_string(), cert.clone()));
    Ok(())
}

fn save_trace(dir: &Path, stem: &str, trace: &Trace, out: &mut ScenarioOutcome) -> Result<()> {
    let path = dir.join(format!("{stem}.csv"));
    export_csv(trace, &path)?;
    out.files.push(path);
    out.runs.push(RunSummary::of(stem, trace));
    Ok(())
}

fn metric_panels(label: &str, runs: &[MethodRun]) -> [(String, Panel); 3] {
    let series = |f: &dyn Fn(&Trace) -> (Vec<f64>, usize)| {
        runs.iter()
            .map(|r| {
                let (values, offset) = f(&r.trace);
                Series::indexed(r.kind.label(), &values, offset)
            })
            .collect::<Vec<_>>()
    };
    [
        (
            "objective_gap".into(),
            Panel::LogLines {
                title: format!("{label}: f(x_k) - f*"),
                series: series(&|t| (t.objective_gaps(), 0)),
            },
        ),
        (
            "distance".into(),
            Panel::LogLines {
                title: format!("{label}: |x_k - x*|"),
                series: series(&|t| (t.distances(), 0)),
            },
        ),
        (
            "lyapunov".into(),
            Panel::LogLines {
                title: format!("{label}: V_k"),
                series: series(&|t| (t.lyapunov_series().values, 2)),
            },
        ),
    ]
}

fn spectrum_panel(title: String, certs: &[(MethodKind, &SpectralCertificate)]) -> Panel {
    let clouds = certs
        .iter()
        .map(|(kind, c)| PointCloud {
            label: kind.label().into(),
            points: c.spectrum().collect(),
        })
        .collect();
    Panel::Scatter { title, clouds }
}

fn write_panel(dir: &Path, file: &str, panels: &[Panel], out: &mut ScenarioOutcome) -> Result<()> {
    let path = dir.join(file);
    render_svg(panels, &path)?;
    out.files.push(path);
    Ok(())
}

fn quadratic_family(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    let nonoptimal = matches!(config.hyperparameters, Hyperparameters::Detuned { .. });
    for &dim in &config.dims {
        let label = format!("{}_d{dim}", config.name);
        let problem = generate_quadratic(dim, config.mu, config.lipschitz, config.seed)?;
        let x0 = start_point(problem.minimizer(), config.start_radius, config.seed);
        let options = TraceOptions {
            stop_tolerance: config.stop_tolerance,
            label: Some(format!(
                "quadratic d={dim} mu={} L={}",
                config.mu, config.lipschitz
            )),
            seed: Some(config.seed),
            ..Default::default()
        };
        let mut runs = Vec::new();
        for &kind in &config.methods {
            let spec = config
                .hyperparameters
                .resolve(kind, config.mu, config.lipschitz)?;
            let cert = analyze(&spec, problem.eigvals().as_slice(), DEFAULT_CONJUGATE_TOL);
            let stem = format!("{label}_{}", kind.label());
            certify(dir, &stem, &cert, out)?;
            let trace = run_trace_with(
                Target::Quadratic(&problem),
                &spec,
                &x0,
                config.iters,
                &options,
            )?;
            save_trace(dir, &stem, &trace, out)?;
            runs.push(MethodRun {
                kind,
                trace,
                certificate: Some(cert),
            });
        }
        let panels = metric_panels(&label, &runs);
        for (metric, panel) in &panels {
            write_panel(
                dir,
                &format!("{label}_{metric}.svg"),
                std::slice::from_ref(panel),
                out,
            )?;
        }
        let certs: Vec<_> = runs
            .iter()
            .filter_map(|r| r.certificate.as_ref().map(|c| (r.kind, c)))
            .collect();
        let spectrum = spectrum_panel(format!("{label}: eigenvalues of M"), &certs);
        write_panel(
            dir,
            &format!("{label}_spectrum.svg"),
            std::slice::from_ref(&spectrum),
            out,
        )?;
        if config.name == "fig1" {
            let [gap, dist, v] = panels.map(|(_, p)| p);
            write_panel(dir, &format!("{label}.svg"), &[gap, dist, v, spectrum], out)?;
        }

        for run in &runs {
            quadratic_checks(config, &label, &problem, run, nonoptimal, out);
        }
    }
    Ok(())
}

fn quadratic_checks(
    config: &ScenarioConfig,
    label: &str,
    problem: &QuadraticProblem,
    run: &MethodRun,
    nonoptimal: bool,
    out: &mut ScenarioOutcome,
) {
    let name = format!("{label} {}", run.kind.label());
    let cert = run
        .certificate
        .as_ref()
        .expect("quadratic runs carry a certificate");
    let report = check_monotone(&run.trace.lyapunov_series());
    let summary = RunSummary::of(label, &run.trace).describe();
    if cert.eligible {
        out.checks.push(Check::expect(
            format!("{name} V monotone (certificate eligible)"),
            report.monotone,
            summary,
        ));
    } else {
        out.checks.push(Check::info(
            format!("{name} certificate not eligible"),
            summary,
        ));
    }
    match config.name.as_str() {
        "fig1" if matches!(run.kind, MethodKind::HeavyBall | MethodKind::Nesterov) => {
            let n = run.trace.distance_increases();
            out.checks.push(Check::expect(
                format!("{name} distance not monotone"),
                n >= 1,
                format!("{n} strict increases of |x_k - x*|"),
            ));
        }
        "quad-optimal" | "quad-nonoptimal" if cert.eligible => {
            let last = run.trace.last_lyapunov();
            let ok = last.is_some_and(|v| v.abs() <= DEFAULT_MONOTONE_TOL);
            out.checks.push(Check::expect(
                format!("{name} terminal V at or below 1e-9"),
                ok,
                format!(
                    "final V {} after {} iterates",
                    fmt_opt(last),
                    run.trace.len()
                ),
            ));
        }
        "convex-mu0" => {
            let zero = cert
                .per_coordinate
                .iter()
                .find(|c| c.lambda_w == problem.mu());
            let unit = zero.is_some_and(|c| (c.eigenpair.lambda1.norm() - 1.0).abs() <= 1e-12);
            out.checks.push(Check::expect(
                format!("{name} unit eigenvalue at lambda_w=0, not eligible"),
                unit && !cert.eligible,
                zero.map_or_else(
                    || "no zero eigenvalue in the spectrum".into(),
                    |c| {
                        format!(
                            "eigenvalues {} and {}",
                            c.eigenpair.lambda1, c.eigenpair.lambda2
                        )
                    },
                ),
            ));
            out.checks.push(Check::info(
                format!("{name} V regime"),
                plateau_summary(&run.trace),
            ));
        }
        _ => {}
    }
    if nonoptimal {
        out.checks.push(Check::expect(
            format!("{name} detuned certificate eligible"),
            cert.eligible,
            format!(
                "{} spectral radius {:.6}",
                cert.method, cert.spectral_radius
            ),
        ));
    }
}

/// Describes the late phase of a `V` series: the level it settles at and
/// whether it keeps shrinking.
fn plateau_summary(trace: &Trace) -> String {
    let v = trace.lyapunov_series().values;
    if v.len() < 8 {
        return "series too short".into();
    }
    let tail = &v[3 * v.len() / 4..];
    let level = tail.iter().fold(0f64, |m, x| m.max(x.abs()));
    let sign_changes = tail
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    let rises = tail.windows(2).filter(|w| w[1] > w[0]).count();
    format!(
        "V_2 {:.3e}, last-quarter max |V| {level:.3e}, {sign_changes} sign changes and {rises} rises in the last quarter",
        v[0]
    )
}

fn spectrum(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    let grid = equally_spaced_spectrum(config.dims[0], config.mu, config.lipschitz);
    let mut certs = Vec::new();
    for &kind in &config.methods {
        let spec = config
            .hyperparameters
            .resolve(kind, config.mu, config.lipschitz)?;
        let cert = analyze(&spec, grid.as_slice(), DEFAULT_CONJUGATE_TOL);
        certify(dir, &format!("spectrum_{}", kind.label()), &cert, out)?;
        let spread = cert.modulus_spread();
        let (name, ok) = match kind {
            MethodKind::HeavyBall | MethodKind::NesterovGaussSeidel => {
                ("moduli on a circle", spread < 1e-6)
            }
            MethodKind::Nesterov | MethodKind::TripleMomentum => {
                ("moduli spread out", spread > 1e-3)
            }
        };
        let check_name = format!("{} {name}", kind.label());
        let detail = format!(
            "modulus spread {spread:.3e}, spectral radius {:.6}",
            cert.spectral_radius
        );
        if config.hyperparameters == Hyperparameters::Optimal {
            out.checks.push(Check::expect(check_name, ok, detail));
        } else {
            out.checks.push(Check::info(check_name, detail));
        }
        certs.push((kind, cert));
    }
    let refs: Vec<_> = certs.iter().map(|(k, c)| (*k, c)).collect();
    let title = format!("eigenvalues of M, mu={} L={}", config.mu, config.lipschitz);
    write_panel(dir, "spectrum.svg", &[spectrum_panel(title, &refs)], out)
}

/// `x_0` drawn uniformly from `[−r, r]^d` around the minimizer.
fn uniform_start(center: &DVector<f64>, radius: f64, seed: u64) -> DVector<f64> {
    let mut rng = rng::seeded(seed, rng::START_STREAM);
    center.map(|c| c + rng.random_range(-radius..=radius))
}

fn cosine_trace(
    f: &Objective,
    spec: &MethodSpec,
    config: &ScenarioConfig,
    seed: u64,
) -> Result<Trace> {
    let x0 = uniform_start(
        f.minimizer().expect("cosine objective has a minimizer"),
        config.start_radius,
        seed,
    );
    let options = TraceOptions {
        stop_tolerance: config.stop_tolerance,
        label: Some("cosine".into()),
        seed: Some(seed),
        ..Default::default()
    };
    run_trace_with(Target::General(f), spec, &x0, config.iters, &options)
}

fn cosine(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    let f = cosine_counterexample();
    let spec =
        config
            .hyperparameters
            .resolve(MethodKind::HeavyBall, config.mu, config.lipschitz)?;
    let grid = equally_spaced_spectrum(1000, config.mu, config.lipschitz);
    let cert = analyze(&spec, grid.as_slice(), DEFAULT_CONJUGATE_TOL);
    certify(dir, "cosine_HB", &cert, out)?;
    out.checks.push(Check::info(
        "quadratic certificate over [mu, L]",
        format!(
            "eligible={} spectral radius {:.6}",
            cert.eligible, cert.spectral_radius
        ),
    ));

    let mut violating = Vec::new();
    let mut first = None;
    for seed in config.seed..config.seed + config.samples as u64 {
        let trace = cosine_trace(&f, &spec, config, seed)?;
        let report = check_monotone(&trace.lyapunov_series());
        if !report.monotone {
            violating.push(seed);
            first.get_or_insert(trace);
        }
    }
    let shown = match first {
        Some(t) => t,
        None => cosine_trace(&f, &spec, config, config.seed)?,
    };
    let stem = format!("cosine_seed{}", shown.seed.unwrap_or(config.seed));
    save_trace(dir, &stem, &shown, out)?;
    let run = MethodRun {
        kind: MethodKind::HeavyBall,
        trace: shown,
        certificate: None,
    };
    let [_, (_, dist), (_, v)] = metric_panels("cosine", std::slice::from_ref(&run));
    write_panel(dir, "cosine.svg", &[dist, v], out)?;

    let detail = match violating.first() {
        Some(&seed) => {
            let v = &out
                .runs
                .last()
                .expect("trace saved")
                .monotonicity
                .violations[0];
            format!(
                "{}/{} seeds violate; seed {seed} first at k={} with excess {:.3e}",
                violating.len(),
                config.samples,
                v.index,
                v.excess
            )
        }
        None => format!("no violation in {} seeds", config.samples),
    };
    out.checks.push(Check::expect(
        "V violation exhibited",
        !violating.is_empty(),
        detail,
    ));
    Ok(())
}

fn cosine_sweep(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    const STEPS: usize = 20;
    let f = cosine_counterexample();
    let base =
        config
            .hyperparameters
            .resolve(MethodKind::HeavyBall, config.mu, config.lipschitz)?;
    let path = dir.join("cosine_beta_sweep.csv");
    let to_err = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)
        .map_err(to_err)?;
    w.write_record(["alpha", "beta", "violating_seeds", "samples"])
        .map_err(to_err)?;
    // the tuned step, then the conservative 1/L
    for alpha in [base.alpha(), 1.0 / config.lipschitz] {
        let mut boundary = None;
        for j in 0..=STEPS {
            let beta = base.beta() * (1.0 - j as f64 / STEPS as f64);
            let spec = MethodSpec::heavy_ball(alpha, beta)?;
            let mut count = 0;
            for seed in config.seed..config.seed + config.samples as u64 {
                if !check_monotone(&cosine_trace(&f, &spec, config, seed)?.lyapunov_series())
                    .monotone
                {
                    count += 1;
                }
            }
            w.write_record([
                format!("{alpha:.16e}"),
                format!("{beta:.16e}"),
                count.to_string(),
                config.samples.to_string(),
            ])
            .map_err(to_err)?;
            if count == 0 && boundary.is_none() {
                boundary = Some(beta);
            }
        }
        out.checks.push(Check::info(
            format!("alpha={alpha:.6}: largest beta with monotone V on every seed (exploratory)"),
            match boundary {
                Some(b) => format!("beta={b:.6} (beta*={:.6})", base.beta()),
                None => format!("none on the grid from beta*={:.6} down to 0", base.beta()),
            },
        ));
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    out.files.push(path);
    Ok(())
}

fn tmm_witness(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    let mut found = Vec::new();
    for &dim in &config.dims {
        if let Some(seed) = tmm_witness_in(config, dim, dir, out)? {
            found.push(format!("d={dim} seed {seed}"));
        }
    }
    let detail = if found.is_empty() {
        format!(
            "no witness in {} seeds for d in {:?}",
            config.samples, config.dims
        )
    } else {
        found.join(", ")
    };
    out.checks.push(Check::expect(
        "non-monotone V witness found",
        !found.is_empty(),
        detail,
    ));
    Ok(())
}

/// Searches seeds on one dimension; returns the first seed whose trace has
/// a V violation.
fn tmm_witness_in(
    config: &ScenarioConfig,
    dim: usize,
    dir: &Path,
    out: &mut ScenarioOutcome,
) -> Result<Option<u64>> {
    let label = format!("tmm_witness_d{dim}");
    let problem = generate_quadratic(dim, config.mu, config.lipschitz, config.seed)?;
    let spec =
        config
            .hyperparameters
            .resolve(MethodKind::TripleMomentum, config.mu, config.lipschitz)?;
    let cert = analyze(&spec, problem.eigvals().as_slice(), DEFAULT_CONJUGATE_TOL);
    certify(dir, &format!("{label}_TMM"), &cert, out)?;

    let x_star = problem.minimizer();
    let seeds = config.seed..config.seed + config.samples as u64;
    let run = |seed: u64, previous: Option<DVector<f64>>| {
        let x0 = start_point(x_star, config.start_radius, seed);
        let options = TraceOptions {
            previous,
            label: Some(format!("quadratic d={dim}")),
            seed: Some(seed),
            ..Default::default()
        };
        run_trace_with(
            Target::Quadratic(&problem),
            &spec,
            &x0,
            config.iters,
            &options,
        )
    };

    let mut standard = 0;
    for seed in seeds.clone() {
        if !check_monotone(&run(seed, None)?.lyapunov_series()).monotone {
            standard += 1;
        }
    }

    let mut witness = None;
    for seed in seeds {
        let mut rng = rng::seeded(seed, rng::SEARCH_STREAM);
        let previous = x_star + rng::normal_vector(&mut rng, dim).normalize() * config.start_radius;
        let trace = run(seed, Some(previous))?;
        if !check_monotone(&trace.lyapunov_series()).monotone {
            witness = Some(trace);
            break;
        }
    }
    let mut detail = format!(
        "{}/{dim} conjugate pairs; x_{{-1}} = x_0: {standard}/{} seeds violate; independent x_{{-1}}: ",
        cert.conjugate_count(),
        config.samples
    );
    let seed = match &witness {
        Some(t) => {
            let seed = t.seed.unwrap_or_default();
            save_trace(dir, &format!("{label}_seed{seed}"), t, out)?;
            let v = &out
                .runs
                .last()
                .expect("trace saved")
                .monotonicity
                .violations[0];
            let _ = write!(
                detail,
                "seed {seed} first violation at k={} ({:.3e} -> {:.3e})",
                v.index, v.v_prev, v.v_next
            );
            Some(seed)
        }
        None => {
            detail.push_str("none");
            None
        }
    };
    out.checks
        .push(Check::info(format!("{label} search"), detail));
    Ok(seed)
}

fn general_objective(config: &ScenarioConfig, dir: &Path, out: &mut ScenarioOutcome) -> Result<()> {
    let (f, x0) = if config.name == "exp-norm" {
        let f = exp_norm_objective(config.dims[0])?;
        let x0 = start_point(
            f.minimizer().expect("exp-norm has a minimizer"),
            config.start_radius,
            config.seed,
        );
        (f, x0)
    } else {
        (rosenbrock_objective(), DVector::zeros(2))
    };
    let options = TraceOptions {
        stop_tolerance: config.stop_tolerance,
        label: Some(f.name().to_string()),
        seed: Some(config.seed),
        ..Default::default()
    };
    let mut runs = Vec::new();
    for &kind in &config.methods {
        let spec = config
            .hyperparameters
            .resolve(kind, config.mu, config.lipschitz)?;
        let trace = run_trace_with(Target::General(&f), &spec, &x0, config.iters, &options)?;
        let stem = format!("{}_{}", config.name, kind.label());
        save_trace(dir, &stem, &trace, out)?;
        out.checks.push(Check::info(
            stem,
            out.runs.last().expect("trace saved").describe(),
        ));
        runs.push(MethodRun {
            kind,
            trace,
            certificate: None,
        });
    }
    for (metric, panel) in metric_panels(&config.name, &runs) {
        write_panel(dir, &format!("{}_{metric}.svg", config.name), &[panel], out)?;
    }
    Ok(())
}
