mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lyapcert::harness::{
    self, certificate_report, export_csv, read_matrix_csv, read_trace_csv, start_point,
    write_certificate_csv, write_certificate_report, write_matrix_csv, write_vector_csv,
    Hyperparameters, ScenarioConfig, Target, TraceOptions, SCENARIOS,
};
use lyapcert::problems::equally_spaced_spectrum;
use lyapcert::spectral::symmetric_eigendecomposition;
use lyapcert::{
    analyze, check_monotone, generate_quadratic, LyapunovSeries, MethodKind, DEFAULT_CONJUGATE_TOL,
};

use crate::config::ConfigFile;

#[derive(Parser, Debug)]
#[command(
    name = "lyapcert",
    version,
    about = "Spectral Lyapunov certificates for momentum methods on quadratics"
)]
struct Cli {
    /// Flat `key = value` file supplying defaults for the flags
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random quadratic with an equally spaced spectrum
    Generate(Common),
    /// Build spectral certificates for one or more methods
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Symmetric matrix W as headerless CSV; otherwise the spectrum is
        /// `dim` equally spaced values in [mu, L]
        #[arg(long, value_name = "CSV")]
        matrix: Option<PathBuf>,
    },
    /// Run one method on a generated quadratic and write its trace CSV
    Run(Common),
    /// Run a named scenario (use `--list` to see them)
    Scenario {
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[command(flatten)]
        common: Common,
        /// Seeds tried by the search scenarios
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        list: bool,
    },
    /// Check the V column of a trace CSV for monotone decrease
    Check {
        input: PathBuf,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    /// Problem dimension(s), comma separated
    #[arg(long, value_delimiter = ',')]
    dim: Vec<usize>,
    /// Smallest eigenvalue
    #[arg(long)]
    mu: Option<f64>,
    /// Largest eigenvalue
    #[arg(long = "L", value_name = "L")]
    lipschitz: Option<f64>,
    /// HB, NAG, TMM or NAG-GS, comma separated
    #[arg(long, value_delimiter = ',')]
    method: Vec<MethodKind>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Use the optimal hyperparameters for (mu, L)
    #[arg(long)]
    optimal: bool,
    /// Iterates per trace, counting x_0
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file or directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    /// Fills every flag left unset from the config file.
    fn merge(&mut self, cfg: &ConfigFile) -> Result<()> {
        if self.dim.is_empty() {
            self.dim = cfg.get_list("dim")?.unwrap_or_default();
        }
        if self.method.is_empty() {
            self.method = cfg.get_list("method")?.unwrap_or_default();
        }
        self.mu = self.mu.or(cfg.get("mu")?);
        self.lipschitz = self.lipschitz.or(cfg.get("L")?);
        self.alpha = self.alpha.or(cfg.get("alpha")?);
        self.beta = self.beta.or(cfg.get("beta")?);
        self.gamma = self.gamma.or(cfg.get("gamma")?);
        self.optimal = self.optimal || cfg.get("optimal")?.unwrap_or(false);
        self.iters = self.iters.or(cfg.get("iters")?);
        self.seed = self.seed.or(cfg.get("seed")?);
        self.out = self.out.take().or(cfg.get("out")?);
        Ok(())
    }

    fn single_dim(&self, default: usize) -> Result<usize> {
        match self.dim.as_slice() {
            [] => Ok(default),
            [d] => Ok(*d),
            _ => bail!("this command takes a single --dim"),
        }
    }

    fn hyperparameters(&self) -> Result<Option<Hyperparameters>> {
        match (self.alpha, self.optimal) {
            (Some(_), true) => bail!("--optimal conflicts with --alpha"),
            (Some(alpha), false) => Ok(Some(Hyperparameters::Explicit {
                alpha,
                beta: self.beta.unwrap_or(0.0),
                gamma: self.gamma.unwrap_or(0.0),
            })),
            (None, true) => Ok(Some(Hyperparameters::Optimal)),
            (None, false) if self.beta.is_some() || self.gamma.is_some() => {
                bail!("--beta/--gamma need --alpha")
            }
            (None, false) => Ok(None),
        }
    }

    fn methods(&self) -> Vec<MethodKind> {
        if self.method.is_empty() {
            MethodKind::ALL.to_vec()
        } else {
            self.method.clone()
        }
    }
}

fn generate(c: &Common) -> Result<ExitCode> {
    let dim = c.single_dim(100)?;
    let p = generate_quadratic(
        dim,
        c.mu.unwrap_or(1.0),
        c.lipschitz.unwrap_or(100.0),
        c.seed.unwrap_or(0),
    )?;
    let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("problem"));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    write_matrix_csv(p.matrix(), dir.join("W.csv"))?;
    write_vector_csv(p.linear(), dir.join("linear.csv"))?;
    write_vector_csv(p.minimizer(), dir.join("minimizer.csv"))?;
    write_vector_csv(p.eigvals(), dir.join("eigvals.csv"))?;
    println!(
        "wrote d={dim} quadratic (mu={}, L={}) to {}",
        p.mu(),
        p.lipschitz(),
        dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn analyze_cmd(c: &Common, matrix: Option<&Path>) -> Result<ExitCode> {
    let eigvals: Vec<f64> = match matrix {
        Some(path) => {
            let w = read_matrix_csv(path)?;
            symmetric_eigendecomposition(&w)?
                .1
                .iter()
                .copied()
                .collect()
        }
        None => {
            let dim = c.single_dim(100)?;
            equally_spaced_spectrum(dim, c.mu.unwrap_or(1.0), c.lipschitz.unwrap_or(100.0))
                .iter()
                .copied()
                .collect()
        }
    };
    let mu = c.mu.unwrap_or(eigvals[0]);
    let lipschitz = c.lipschitz.unwrap_or(eigvals[eigvals.len() - 1]);
    let hyper = c.hyperparameters()?.unwrap_or(Hyperparameters::Optimal);
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for kind in c.methods() {
        let spec = hyper.resolve(kind, mu, lipschitz)?;
        let cert = analyze(&spec, &eigvals, DEFAULT_CONJUGATE_TOL);
        print!("{}", certificate_report(&cert));
        println!();
        if let Some(dir) = &c.out {
            write_certificate_csv(&cert, dir.join(format!("{}_certificate.csv", kind.label())))?;
            write_certificate_report(&cert, dir.join(format!("{}_certificate.txt", kind.label())))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(c: &Common) -> Result<ExitCode> {
    let dim = c.single_dim(100)?;
    let (mu, lipschitz, seed) = (
        c.mu.unwrap_or(1.0),
        c.lipschitz.unwrap_or(100.0),
        c.seed.unwrap_or(0),
    );
    let kind = match c.method.as_slice() {
        [] => MethodKind::HeavyBall,
        [k] => *k,
        _ => bail!("run takes a single --method"),
    };
    let spec = c
        .hyperparameters()?
        .unwrap_or(Hyperparameters::Optimal)
        .resolve(kind, mu, lipschitz)?;
    let p = generate_quadratic(dim, mu, lipschitz, seed)?;
    let x0 = start_point(p.minimizer(), 10.0, seed);
    let options = TraceOptions {
        seed: Some(seed),
        ..Default::default()
    };
    let trace = harness::run_trace_with(
        Target::Quadratic(&p),
        &spec,
        &x0,
        c.iters.unwrap_or(2000),
        &options,
    )?;
    let out = c.out.clone().unwrap_or_else(|| PathBuf::from("trace.csv"));
    export_csv(&trace, &out)?;

    let cert = analyze(&spec, p.eigvals().as_slice(), DEFAULT_CONJUGATE_TOL);
    let report = check_monotone(&trace.lyapunov_series());
    println!(
        "{spec}: {} iterates written to {}",
        trace.len(),
        out.display()
    );
    println!(
        "certificate eligible: {}, spectral radius {:.6}",
        cert.eligible, cert.spectral_radius
    );
    println!(
        "V monotone: {} ({} violations)",
        report.monotone,
        report.violations.len()
    );
    if trace.diverged {
        println!("diverged");
    }
    Ok(if cert.eligible && !report.monotone {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn scenario(name: &str, c: &Common, samples: Option<usize>) -> Result<ExitCode> {
    let mut cfg = ScenarioConfig::preset(
        name,
        c.out.clone().unwrap_or_else(|| PathBuf::from("results")),
    )?;
    if !c.dim.is_empty() {
        cfg.dims = c.dim.clone();
    }
    cfg.mu = c.mu.unwrap_or(cfg.mu);
    cfg.lipschitz = c.lipschitz.unwrap_or(cfg.lipschitz);
    if !c.method.is_empty() {
        cfg.methods = c.method.clone();
    }
    if let Some(h) = c.hyperparameters()? {
        cfg.hyperparameters = h;
    }
    cfg.iters = c.iters.unwrap_or(cfg.iters);
    cfg.seed = c.seed.unwrap_or(cfg.seed);
    cfg.samples = samples.unwrap_or(cfg.samples);
    let outcome = harness::run_scenario(&cfg)?;
    print!("{}", outcome.report());
    println!("artifacts in {}", cfg.out_dir.join(&cfg.name).display());
    Ok(if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn check(input: &Path, tolerance: Option<f64>) -> Result<ExitCode> {
    let rows = read_trace_csv(input)?;
    let mut series = LyapunovSeries::new(rows.iter().filter_map(|r| r.lyapunov).collect());
    if let Some(t) = tolerance {
        series = series.with_tolerance(t);
    }
    let report = check_monotone(&series);
    println!(
        "{} V values, monotone: {}",
        series.values.len(),
        report.monotone
    );
    for v in report.violations.iter().take(10) {
        println!(
            "  k={}: {:.6e} -> {:.6e} (excess {:.3e})",
            v.index, v.v_prev, v.v_next, v.excess
        );
    }
    if report.violations.len() > 10 {
        println!("  ... {} more", report.violations.len() - 10);
    }
    Ok(if report.monotone {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Generate(mut c) => {
            c.merge(&cfg)?;
            generate(&c)
        }
        Command::Analyze { mut common, matrix } => {
            common.merge(&cfg)?;
            analyze_cmd(&common, matrix.as_deref())
        }
        Command::Run(mut c) => {
            c.merge(&cfg)?;
            run(&c)
        }
        Command::Scenario { list: true, .. } => {
            for (name, about) in SCENARIOS {
                println!("{name:16} {about}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenario {
            name,
            mut common,
            samples,
            ..
        } => {
            common.merge(&cfg)?;
            let samples = samples.or(cfg.get("samples")?);
            scenario(name.as_deref().unwrap_or_default(), &common, samples)
        }
        Command::Check { input, tolerance } => check(&input, tolerance.or(cfg.get("tolerance")?)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
