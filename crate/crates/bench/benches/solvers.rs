use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mechsqueeze_core::exact::{period_map, solve_continuous_lyapunov};
use mechsqueeze_core::*;
use nalgebra::Matrix6;

fn reference_cascade(db: f64) -> Cascade {
    let system = SystemParams::transfer_reference();
    let d = derive_params(&system).unwrap();
    let rates = cooling_rates(d.coupling, d.kappa, d.omega_m0, d.gamma_m).unwrap();
    let spec = nm_to_opo(db, 20.0 * d.omega_m0).unwrap();
    build_cascade(&d, &rates, &spec, 0.0, ResonanceReference::Dressed).unwrap()
}

fn lyapunov(c: &mut Criterion) {
    let cascade = reference_cascade(6.0);
    let (a, d) = (cascade.model.a0, cascade.model.diffusion());
    c.bench_function("continuous_lyapunov_6x6", |b| b.iter(|| solve_continuous_lyapunov(black_box(&a), &d)));

    let toy = Matrix6::from_fn(|i, j| if i == j { -1.0 } else { 0.1 * (i as f64 - j as f64) });
    c.bench_function("continuous_lyapunov_toy", |b| {
        b.iter(|| solve_continuous_lyapunov(black_box(&toy), &Matrix6::identity()))
    });
}

fn periodic(c: &mut Criterion) {
    let cascade = reference_cascade(6.0);
    let opts = PeriodicOptions::default();
    let mut group = c.benchmark_group("periodic");
    group.sample_size(20);
    group.bench_function("period_map", |b| b.iter(|| period_map(black_box(&cascade.model), opts.rtol)));
    group.bench_function("solve_cascade_6db", |b| b.iter(|| solve_cascade(black_box(&cascade), &opts)));
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let system = SystemParams::transfer_reference();
    let d = derive_params(&system).unwrap();
    let rates = cooling_rates(d.coupling, d.kappa, d.omega_m0, d.gamma_m).unwrap();
    let spec = nm_to_opo(6.0, 2.0 * d.omega_m0).unwrap();
    c.bench_function("cooling_rates", |b| {
        b.iter(|| cooling_rates(black_box(d.coupling), d.kappa, d.omega_m0, d.gamma_m))
    });
    c.bench_function("variance_finite_bandwidth", |b| {
        b.iter(|| variance_finite_bandwidth(black_box(&spec), 0.3, d.coupling, d.kappa, &rates, d.n_th))
    });
}

criterion_group!(benches, lyapunov, periodic, closed_forms);
criterion_main!(benches);
