//! Criterion benchmarks for lyapcert; see `benches/`.
