use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lyapcert::harness::start_point;
use lyapcert::problems::equally_spaced_spectrum;
use lyapcert::spectral::symmetric_eigendecomposition;
use lyapcert::{
    analyze, check_monotone, generate_quadratic, optimal_hyperparams, run_trace, MethodKind,
    Target, DEFAULT_CONJUGATE_TOL,
};

fn certificate(c: &mut Criterion) {
    let mut group = c.benchmark_group("analyze");
    for dim in [100, 1000, 10_000] {
        let grid = equally_spaced_spectrum(dim, 1.0, 100.0);
        let spec = optimal_hyperparams(MethodKind::Nesterov, 1.0, 100.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &grid, |b, g| {
            b.iter(|| analyze(black_box(&spec), g.as_slice(), DEFAULT_CONJUGATE_TOL))
        });
    }
    group.finish();
}

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    group.sample_size(10);
    for dim in [20, 50, 100] {
        let p = generate_quadratic(dim, 1.0, 100.0, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), p.matrix(), |b, w| {
            b.iter(|| symmetric_eigendecomposition(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn trace(c: &mut Criterion) {
    let mut group = c.benchmark_group("trace_500_iters");
    group.sample_size(10);
    for dim in [100, 500] {
        let p = generate_quadratic(dim, 1.0, 100.0, 0).unwrap();
        let spec = optimal_hyperparams(MethodKind::HeavyBall, 1.0, 100.0).unwrap();
        let x0 = start_point(p.minimizer(), 10.0, 0);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &p, |b, p| {
            b.iter(|| {
                let t = run_trace(Target::Quadratic(p), &spec, &x0, 500).unwrap();
                check_monotone(&t.lyapunov_series())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, certificate, eigensolver, trace);
criterion_main!(benches);
