use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nmep_core::dynamics::SpectralModel;
use nmep_core::spectra::symmetric_grid;
use nmep_core::{
    analytic_spectrum, build_matrix, decompose_finite, diagonalize_oracle, digamma,
    evolve_eigenbasis, solve_alpha_finite, SystemConfig, TimeGrid,
};

const DW: f64 = 0.002;
const GAMMA: f64 = 0.0035;

fn config(n_modes: usize) -> SystemConfig {
    SystemConfig::from_gamma(GAMMA, DW, n_modes).unwrap()
}

fn eigen(c: &mut Criterion) {
    c.bench_function("digamma", |b| b.iter(|| digamma(black_box(2000.37)).unwrap()));
    let c4001 = config(4001);
    c.bench_function("solve_alpha_finite k=0 N=4000", |b| {
        b.iter(|| solve_alpha_finite(black_box(0), &c4001).unwrap())
    });
    let c2001 = config(2001);
    c.bench_function("decompose_finite N=2000", |b| b.iter(|| decompose_finite(&c2001).unwrap()));
    let matrix = build_matrix(&config(101)).unwrap();
    c.bench_function("jacobi N=100", |b| b.iter(|| diagonalize_oracle(&matrix).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let cfg = config(4001);
    let t_r = cfg.revival_time();
    let grid = TimeGrid::covering(3.0 * t_r, t_r, 2000).unwrap();
    let mut group = c.benchmark_group("evolve");
    group.sample_size(10);
    group.bench_function("eigenbasis N=4000 3 T_R", |b| {
        b.iter(|| evolve_eigenbasis(&cfg, &grid, SpectralModel::Finite, false).unwrap())
    });
    group.finish();
}

fn spectra(c: &mut Criterion) {
    let omegas = symmetric_grid(25.0 * GAMMA, GAMMA / 200.0).unwrap();
    c.bench_function("analytic_spectrum n=5", |b| {
        b.iter(|| analytic_spectrum(black_box(5), &omegas, GAMMA).unwrap())
    });
}

criterion_group!(benches, eigen, dynamics, spectra);
criterion_main!(benches);
