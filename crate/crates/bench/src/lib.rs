//! Criterion benchmarks for the scheme's hot paths.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use stvflow_core::experiments::random_dirichlet;
use stvflow_core::noise::UniformStream;
use stvflow_core::{
    lemma_pairing, make_mesh, sample_increments, solve_path, step, EnergyParams, FEFunction,
    NoisePlan, Profile, Projection, SchemeParams, SolverOptions,
};

fn scheme(cells: usize, epsilon: f64, steps: usize) -> SchemeParams {
    let mesh = make_mesh(cells).expect("valid mesh");
    let x0 = Profile::Step.build(mesh.clone(), Projection::Lumped, 0.0, 0);
    let g = Profile::Sin.build(mesh, Projection::Lumped, 0.0, 0);
    let energy = EnergyParams::new(epsilon, 1.0, g).expect("valid energy");
    SchemeParams::new(energy, 1.0 / steps as f64, steps, x0, SolverOptions::default())
        .expect("valid scheme")
}

pub fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("implicit_step");
    for cells in [16, 64, 256] {
        for epsilon in [0.25, 0.01] {
            let p = scheme(cells, epsilon, 32);
            group.bench_with_input(
                BenchmarkId::new(format!("eps={epsilon}"), cells),
                &p,
                |b, p| b.iter(|| step(black_box(&p.x0), 0.05, p).expect("step converges")),
            );
        }
    }
    group.finish();
}

pub fn bench_path(c: &mut Criterion) {
    let p = scheme(32, 0.25, 64);
    let plan = NoisePlan::new(64, p.tau, 7, 0).expect("valid plan");
    let increments = sample_increments(&plan);
    c.bench_function("solve_path J=32 N=64", |b| {
        b.iter(|| solve_path(&p, black_box(&increments)).expect("path solves"))
    });
}

pub fn bench_pairing(c: &mut Criterion) {
    let mesh = make_mesh(512).expect("valid mesh");
    let stream = UniformStream::new(3);
    let v: FEFunction = random_dirichlet(&mesh, &stream, 0, 10.0);
    c.bench_function("lemma_pairing J=512", |b| b.iter(|| lemma_pairing(black_box(&v), 0.01)));
}

pub fn benchmarks(c: &mut Criterion) {
    bench_step(c);
    bench_path(c);
    bench_pairing(c);
}
