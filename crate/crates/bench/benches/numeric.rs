use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use logdgla_bench::smooth_rhs;
use logdgla_core::ode::{fourier_modes, solve, SolveConfig};

fn ode(c: &mut Criterion) {
    let mut group = c.benchmark_group("ode");
    group.sample_size(10);
    for n_r in [64, 128, 256] {
        let f = smooth_rhs(n_r, 64);
        group.bench_with_input(BenchmarkId::new("modes", n_r), &f, |b, f| b.iter(|| fourier_modes(f, 32).unwrap()));
        group.bench_with_input(BenchmarkId::new("solve", n_r), &f, |b, f| {
            b.iter(|| solve(f, 0.5, &SolveConfig::default()).unwrap().1.residual)
        });
    }
    group.finish();
}

criterion_group!(benches, ode);
criterion_main!(benches);
