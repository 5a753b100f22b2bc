use std::hint::black_box;

use cavispin::{
    build_h_eliminated, build_h_full, build_h_xy, build_h_zz, build_space, compute_xy_coefficients, evolve,
    product_state, AtomicLevels, Boundary, Level, Method, ModelParams, PhotonTruncation, PropagatorConfig, TimeGrid,
    TrotterOrder, TrotterSequence, ZzCoefficients,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn builders(c: &mut Criterion) {
    let p = ModelParams::fig2();
    let xy = compute_xy_coefficients(&p).unwrap();
    let three = build_space(2, AtomicLevels::Three, PhotonTruncation::TotalCap(2)).unwrap();
    let five = build_space(2, AtomicLevels::Five, PhotonTruncation::TotalCap(2)).unwrap();

    let mut group = c.benchmark_group("build");
    group.bench_function("five-level N=2", |b| b.iter(|| build_h_full(black_box(&p), &five).unwrap()));
    group.bench_function("eliminated N=2", |b| b.iter(|| build_h_eliminated(black_box(&p), &three).unwrap()));
    for n in [4, 6, 8] {
        group.bench_with_input(BenchmarkId::new("xy chain", n), &n, |b, &n| {
            b.iter(|| build_h_xy(black_box(&xy), n, Boundary::Periodic).unwrap())
        });
    }
    group.finish();
}

fn static_routes(c: &mut Criterion) {
    let p = ModelParams { n_sites: 3, ..ModelParams::fig2() };
    let space = build_space(3, AtomicLevels::Three, PhotonTruncation::TotalCap(2)).unwrap();
    let h = build_h_eliminated(&p, &space).unwrap();
    let psi0 = product_state(&space, &[Level::B, Level::C, Level::A], &[0, 0, 0]).unwrap();
    let grid = TimeGrid::new(0.0, 50.0, 11).unwrap();

    let mut group = c.benchmark_group(format!("evolve eliminated N=3 (dim {})", space.dimension()));
    group.sample_size(10);
    for method in [Method::Eigendecomposition, Method::Krylov, Method::Rk4Adaptive] {
        let cfg = PropagatorConfig::with_method(method);
        group.bench_function(method.to_string(), |b| b.iter(|| evolve(&h, black_box(&psi0), &grid, &cfg).unwrap()));
    }
    group.finish();
}

fn time_dependent(c: &mut Criterion) {
    let p = ModelParams::fig2();
    let space = build_space(2, AtomicLevels::Five, PhotonTruncation::TotalCap(2)).unwrap();
    let h = build_h_full(&p, &space).unwrap();
    let psi0 = product_state(&space, &[Level::B, Level::C], &[0, 0]).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, 3).unwrap();
    let cfg = PropagatorConfig::default();

    let mut group = c.benchmark_group("evolve five-level N=2");
    group.sample_size(10);
    group.bench_function("rk4-adaptive t=1", |b| b.iter(|| evolve(&h, black_box(&psi0), &grid, &cfg).unwrap()));
    group.finish();
}

fn trotter(c: &mut Criterion) {
    let xy = compute_xy_coefficients(&ModelParams::fig2()).unwrap();
    let zz = ZzCoefficients { u_coef: f64::NAN, alpha: 0.01, beta: 0.005 };
    let mut group = c.benchmark_group("trotter 64 steps");
    for n in [3, 5] {
        let h_xy = build_h_xy(&xy, n, Boundary::Open).unwrap();
        let h_zz = build_h_zz(&zz, n, Boundary::Open).unwrap();
        let levels: Vec<Level> = (0..n).map(|j| [Level::A, Level::B, Level::C][j % 3]).collect();
        let psi0 = product_state(h_xy.space(), &levels, &vec![0; n]).unwrap();
        let seq = TrotterSequence::new(&h_xy, &h_zz, 1.0, TrotterOrder::XyFirst).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| seq.advance(black_box(&psi0), 64).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, builders, static_routes, time_dependent, trotter);
criterion_main!(benches);
