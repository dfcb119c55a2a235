use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::trace::Trace;
use crate::error::{Error, Result};
use crate::lyapunov::LyapunovSeries;
use crate::spectral::SpectralCertificate;

pub const TRACE_HEADER: [&str; 4] = ["iter", "objective_gap", "distance", "lyapunov"];
pub const CERTIFICATE_HEADER: [&str; 7] = [
    "lambda_w",
    "a",
    "b",
    "re",
    "im",
    "modulus",
    "conjugate_pair",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn create(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(writer(BufWriter::new(file)))
}

fn finish<W: Write>(path: &Path, w: csv::Writer<W>) -> Result<()> {
    let mut inner = w
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    inner.flush().map_err(|e| Error::io(path, e))
}

/// Writes `iter,objective_gap,distance,lyapunov`, one row per iterate.
pub fn write_trace_csv<W: Write>(trace: &Trace, out: W) -> std::result::Result<W, csv::Error> {
    let mut w = writer(out);
    w.write_record(TRACE_HEADER)?;
    for (k, m) in trace.metrics.iter().enumerate() {
        let v = m.lyapunov.map(num).unwrap_or_default();
        w.write_record([k.to_string(), num(m.objective_gap), num(m.distance), v])?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

pub fn export_csv(trace: &Trace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = write_trace_csv(trace, BufWriter::new(file)).map_err(|e| csv_error(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// One parsed row of a trace CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub objective_gap: f64,
    pub distance: f64,
    pub lyapunov: Option<f64>,
}

pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::Parse(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("{}: `{s}`: {e}", path.display())))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let iter = record[0]
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("{}: `{}`: {e}", path.display(), &record[0])))?;
        let lyapunov = match &record[3] {
            "" => None,
            s => Some(parse(s)?),
        };
        rows.push(TraceRow {
            iter,
            objective_gap: parse(&record[1])?,
            distance: parse(&record[2])?,
            lyapunov,
        });
    }
    Ok(rows)
}

/// The `V` column of parsed rows as a series.
pub fn lyapunov_from_rows(rows: &[TraceRow]) -> LyapunovSeries {
    LyapunovSeries::new(rows.iter().filter_map(|r| r.lyapunov).collect())
}

/// One row per coordinate with the dominant eigenvalue `λ₁`.
pub fn write_certificate_csv(cert: &SpectralCertificate, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    w.write_record(CERTIFICATE_HEADER)
        .map_err(|e| csv_error(path, e))?;
    for c in &cert.per_coordinate {
        let l = c.eigenpair.lambda1;
        w.write_record([
            num(c.lambda_w),
            num(c.coeffs.a),
            num(c.coeffs.b),
            num(l.re),
            num(l.im),
            num(c.rate),
            c.conjugate_pair.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

/// Human-readable summary of a certificate.
pub fn certificate_report(cert: &SpectralCertificate) -> String {
    let n = cert.per_coordinate.len();
    let mut s = String::new();
    let _ = writeln!(s, "method: {}", cert.method);
    let _ = writeln!(s, "coordinates: {n}");
    let _ = writeln!(
        s,
        "conjugate pairs: {}/{n} (tolerance {:e})",
        cert.conjugate_count(),
        cert.tolerance
    );
    let _ = writeln!(s, "spectral radius: {:.12e}", cert.spectral_radius);
    let _ = writeln!(s, "modulus spread: {:.6e}", cert.modulus_spread());
    let _ = writeln!(
        s,
        "max V contraction per step: {:.12e}",
        cert.max_contraction()
    );
    if cert.eligible {
        let _ = writeln!(
            s,
            "verdict: eligible, V decreases monotonically along every trajectory"
        );
    } else {
        let _ = writeln!(s, "verdict: not eligible");
        let bad: Vec<_> = cert
            .per_coordinate
            .iter()
            .filter(|c| !c.conjugate_pair)
            .collect();
        if let (Some(first), Some(last)) = (bad.first(), bad.last()) {
            let _ = writeln!(
                s,
                "  {} coordinates with real distinct eigenvalues, lambda_w in [{}, {}]",
                bad.len(),
                first.lambda_w,
                last.lambda_w
            );
        }
        if cert.spectral_radius >= 1.0 {
            let _ = writeln!(s, "  spectral radius is not below one");
        }
    }
    s
}

pub fn write_certificate_report(cert: &SpectralCertificate, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, certificate_report(cert)).map_err(|e| Error::io(path, e))
}

/// Headerless numeric CSV, one matrix row per line.
pub fn write_matrix_csv(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = create(path)?;
    for r in 0..m.nrows() {
        w.write_record(m.row(r).iter().map(|&v| num(v)))
            .map_err(|e| csv_error(path, e))?;
    }
    finish(path, w)
}

pub fn write_vector_csv(v: &DVector<f64>, path: impl AsRef<Path>) -> Result<()> {
    write_matrix_csv(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()), path)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut values = Vec::new();
    let mut cols = None;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if *cols.get_or_insert(record.len()) != record.len() {
            return Err(Error::Parse(format!("{}: ragged rows", path.display())));
        }
        for field in record.iter() {
            values.push(
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{}: `{field}`: {e}", path.display())))?,
            );
        }
    }
    let cols = cols.ok_or_else(|| Error::Parse(format!("{}: empty matrix", path.display())))?;
    Ok(DMatrix::from_row_slice(values.len() / cols, cols, &values))
}

pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<DVector<f64>> {
    let m = read_matrix_csv(path)?;
    Ok(DVector::from_column_slice(m.as_slice()))
}
