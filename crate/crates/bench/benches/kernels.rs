use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hme_bench::perturbed_state;
use hme_core::assembly::linearize;
use hme_core::collision::qbar_binary;
use hme_core::stability::{space_sweep_1d, sweep_points, time_sweep};
use hme_core::{CollisionModel, LinearModel, MomentBasis, SystemMatrices};

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    for (dim, order) in [(1, 8), (2, 6), (3, 5)] {
        let s = perturbed_state(dim, order);
        g.bench_with_input(BenchmarkId::new("matrices", format!("D{dim}M{order}")), &s, |b, s| {
            b.iter(|| SystemMatrices::assemble(black_box(s)))
        });
        let basis = MomentBasis::new(dim, order).unwrap();
        g.bench_with_input(
            BenchmarkId::new("linearize", format!("D{dim}M{order}")),
            &basis,
            |b, basis| b.iter(|| linearize(black_box(basis), 1.0, 1.0).unwrap()),
        );
    }
    g.finish();
}

fn binary_quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("binary");
    g.sample_size(10);
    for (order, nodes) in [(3, 10), (4, 16)] {
        let basis = MomentBasis::new(2, order).unwrap();
        g.bench_function(format!("M{order}n{nodes}"), |b| {
            b.iter(|| qbar_binary(black_box(&basis), 1.0, nodes, nodes).unwrap())
        });
    }
    g.finish();
}

fn dispersion(c: &mut Criterion) {
    let mut g = c.benchmark_group("dispersion");
    let basis = MomentBasis::new(1, 6).unwrap();
    let lin = linearize(&basis, 1.0, 1.0).unwrap();
    let q = CollisionModel::Shakhov {
        tau: 1.0,
        pr: 2.0 / 3.0,
    }
    .qbar(&basis)
    .unwrap();
    let model = LinearModel::hme(&lin, q).unwrap();
    let ks: Vec<Vec<f64>> = sweep_points(1e-2, 1e2, 200, true)
        .unwrap()
        .into_iter()
        .map(|k| vec![k])
        .collect();
    let omegas = sweep_points(1e-2, 1e2, 100, true).unwrap();
    g.bench_function("time_200", |b| b.iter(|| time_sweep(black_box(&model), &ks).unwrap()));
    g.bench_function("space_100", |b| {
        b.iter(|| space_sweep_1d(black_box(&model), &omegas).unwrap())
    });
    g.finish();
}

criterion_group!(benches, assembly, binary_quadrature, dispersion);
criterion_main!(benches);
