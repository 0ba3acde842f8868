use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jnnwg::evolution::step_exponential;
use jnnwg::scenario::{builtin, compute_scenario};
use jnnwg::{
    build_hamiltonian, evolve_static, gaussian_packet, solve_chiral_linear, solve_symmetric_linear, AtomSpec,
    Boundary, CouplingProfile, EvolutionConfig, Method, WaveguideSpec,
};
use num_complex::Complex64;

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for order in [1, 3, 5, 8] {
        g.bench_with_input(BenchmarkId::new("chiral", order), &order, |b, &j| {
            b.iter(|| solve_chiral_linear(black_box(j), 1.0).unwrap())
        });
    }
    g.bench_function("symmetric/5", |b| b.iter(|| solve_symmetric_linear(black_box(5), 1.0).unwrap()));
    g.finish();
}

fn hamiltonian(c: &mut Criterion) {
    let wg = WaveguideSpec::new(400, Boundary::Open, solve_chiral_linear(5, 1.0).unwrap()).unwrap();
    let atoms = [
        AtomSpec::two_point("1", 50, 0.0, CouplingProfile::Constant { g: 0.1 }),
        AtomSpec::two_point("2", 150, 0.0, CouplingProfile::Constant { g: 0.1 }),
    ];
    c.bench_function("hamiltonian/build_400", |b| {
        b.iter(|| build_hamiltonian(black_box(&wg), &atoms, 0.0).unwrap())
    });

    let h = build_hamiltonian(&wg, &atoms, 0.0).unwrap();
    let x: Vec<Complex64> = (0..h.dim()).map(|i| Complex64::new((i as f64).sin(), 0.0)).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); h.dim()];
    c.bench_function("hamiltonian/apply_400", |b| b.iter(|| h.apply(black_box(&x), &mut y)));

    let mut psi = x.clone();
    let mut scratch = y.clone();
    let mut term = y.clone();
    c.bench_function("hamiltonian/taylor_step_400", |b| {
        b.iter(|| step_exponential(&h, black_box(0.04), &mut psi, &mut scratch, &mut term))
    });
}

fn evolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("evolve");
    g.sample_size(10);
    for len in [100, 300] {
        let wg = WaveguideSpec::new(len, Boundary::Periodic, solve_chiral_linear(5, 1.0).unwrap()).unwrap();
        let psi0 = gaussian_packet(&wg, 0, 3.0, 10.0, 0.0).unwrap();
        let h = build_hamiltonian(&wg, &[], 0.0).unwrap();
        let cfg = EvolutionConfig::new(50.0, 1.0, Method::ExactDiagonal);
        g.bench_with_input(BenchmarkId::new("exact_diagonal", len), &len, |b, _| {
            b.iter(|| evolve_static(&h, black_box(&psi0), &cfg).unwrap())
        });
    }
    g.finish();
}

fn scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("scenario");
    g.sample_size(10);
    for name in ["fig2a", "fig6_rabi"] {
        let cfg = builtin(name).unwrap();
        g.bench_function(name, |b| b.iter(|| compute_scenario(black_box(&cfg)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, solvers, hamiltonian, evolution, scenarios);
criterion_main!(benches);
