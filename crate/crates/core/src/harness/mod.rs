//! Running methods, recording traces and writing CSV/SVG artifacts.

pub mod io;
pub mod scenario;
pub mod svg;
pub mod trace;

pub use io::{
    certificate_report, export_csv, lyapunov_from_rows, read_matrix_csv, read_trace_csv,
    read_vector_csv, write_certificate_csv, write_certificate_report, write_matrix_csv,
    write_trace_csv, write_vector_csv, TraceRow,
};
pub use scenario::{
    run_scenario, Check, CheckStatus, Hyperparameters, ScenarioConfig, ScenarioOutcome, SCENARIOS,
};
pub use svg::{render_svg, render_svg_string, Panel, PointCloud, Series};
pub use trace::{
    run_trace, run_trace_with, start_point, Target, Trace, TraceMetrics, TraceOptions,
};
