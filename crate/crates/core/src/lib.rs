//! Spectral Lyapunov certificates for two-step momentum methods on
//! quadratic objectives.
//!
//! A method such as Heavy Ball, Nesterov, Triple Momentum or
//! Nesterov Gauss-Seidel reduces, in each eigen-coordinate of the quadratic,
//! to `x_{k+1} = a·x_k + b·x_{k−1}`. When every coordinate's companion
//! matrix has a conjugate eigenvalue pair, the function
//! `V = ‖x_{k−1}−x*‖² − ⟨x_k−x*, x_{k−2}−x*⟩` decreases monotonically.
//!
//! ```
//! use lyapcert::{analyze, optimal_hyperparams, MethodKind, DEFAULT_CONJUGATE_TOL};
//!
//! let spec = optimal_hyperparams(MethodKind::HeavyBall, 1.0, 4.0).unwrap();
//! let cert = analyze(&spec, &[1.0, 2.0, 4.0], DEFAULT_CONJUGATE_TOL);
//! assert!(cert.eligible);
//! assert!((cert.spectral_radius - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod harness;
pub mod lyapunov;
pub mod methods;
pub mod problems;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use harness::{run_scenario, run_trace, ScenarioConfig, Target, Trace};
pub use lyapunov::{
    check_monotone, contraction_factor, per_coordinate_v, scalar_v, vector_v, LyapunovSeries,
    MonotonicityReport, Violation,
};
pub use methods::{
    optimal_hyperparams, scalar_coefficients, step_general, step_quadratic,
    step_quadratic_eigenbasis, theoretical_rate, IterationState, MethodKind, MethodSpec,
    TwoStepCoefficients,
};
pub use problems::{generate_quadratic, Objective, Oracle, QuadraticProblem};
pub use spectral::{analyze, schur_2x2, ComplexPair, SpectralCertificate, DEFAULT_CONJUGATE_TOL};
