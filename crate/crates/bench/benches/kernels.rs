use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sepmod_core::jacobi::{self, JacobiParams};
use sepmod_core::rng::stream;
use sepmod_core::{
    alg_p_gauge, build_maximal_net, eval_dual, gauge_bounds, AlgOptions, Exponent, NetParams, RealMatrix,
    SymmetricGauge,
};

fn svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("singular_values");
    for n in [4, 16, 64] {
        let a = RealMatrix::gaussian(n, &mut stream(1, n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| a.singular_values()));
    }
    group.finish();
}

fn dual(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_dual");
    for (desc, n) in [("lp:3", 4), ("kyfan:2", 8)] {
        let g = SymmetricGauge::parse(desc, n).unwrap();
        let bounds = gauge_bounds(&g).unwrap();
        let a: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        group.bench_function(format!("{desc}/n={n}"), |b| b.iter(|| eval_dual(black_box(&a), &g, &bounds, 0.1)));
    }
    group.finish();
}

fn net(c: &mut Criterion) {
    let params = NetParams::new(5, Exponent::TWO, 0.5).unwrap();
    c.bench_function("maximal_net/n=5", |b| b.iter(|| build_maximal_net(&params, u64::MAX).count()));
}

fn diameter(c: &mut Criterion) {
    let g = SymmetricGauge::parse("kyfan:2", 4).unwrap();
    let mut group = c.benchmark_group("alg_p");
    group.sample_size(10);
    group.bench_function("kyfan:2/n=4/δ=0.5", |b| {
        b.iter(|| alg_p_gauge(&g, Exponent::TWO, 0.5, &AlgOptions::default()))
    });
    group.finish();
}

fn jacobi_kernels(c: &mut Criterion) {
    let j = JacobiParams::new(3, 2).unwrap();
    c.bench_function("quadrature_z/n=3", |b| b.iter(|| jacobi::quadrature_z(black_box(j))));
    c.bench_function("rayleigh_closed/n=50", |b| {
        b.iter(|| jacobi::rayleigh_closed(black_box(JacobiParams::new(50, 50).unwrap())))
    });
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("mc_matrix/n=2/1e4", |b| {
        b.iter(|| jacobi::mc_matrix_rayleigh(JacobiParams::new(2, 1).unwrap(), 10_000, 0))
    });
    group.finish();
}

criterion_group!(benches, svd, dual, net, diameter, jacobi_kernels);
criterion_main!(benches);
