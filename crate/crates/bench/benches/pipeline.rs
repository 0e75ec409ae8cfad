use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schurscape::classical::{norm_landscape, ClassicalMap, Ensemble};
use schurscape::compare::jsd;
use schurscape::density::{smooth_field, smoothing_sigma, solve_threshold, SupportMode};
use schurscape::model::{build_floquet, RotorParams};
use schurscape::phasespace::{husimi_sum_columns, CoherentFactory, Field, TorusGrid};
use schurscape::spectral::{ordered_schur, quasienergies, schur_fraction_sets};

fn schur(c: &mut Criterion) {
    let mut g = c.benchmark_group("ordered_schur");
    g.sample_size(10);
    for n in [101, 301] {
        let u = build_floquet(&RotorParams::pt(n, 1.1, 0.001).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &u.matrix, |b, m| b.iter(|| ordered_schur(black_box(m)).unwrap()));
    }
    g.finish();
}

fn husimi(c: &mut Criterion) {
    let mut g = c.benchmark_group("husimi_sum");
    g.sample_size(10);
    let n = 301;
    let u = build_floquet(&RotorParams::pt(n, 1.1, 0.001).unwrap()).unwrap();
    let s = ordered_schur(&u.matrix).unwrap();
    let sets = schur_fraction_sets(&quasienergies(&u).unwrap());
    let factory = CoherentFactory::new(n).unwrap();
    let grid = TorusGrid::new(128, 128).unwrap();
    for (name, cols) in [("single", vec![0]), ("gain", sets.gain), ("stable", sets.stable)] {
        g.bench_function(name, |b| b.iter(|| husimi_sum_columns(&s.v, black_box(&cols), &grid, &factory).unwrap()));
    }
    g.finish();
}

fn landscape(c: &mut Criterion) {
    let mut g = c.benchmark_group("landscape");
    g.sample_size(10);
    let grid = TorusGrid::new(100, 100).unwrap();
    let map = ClassicalMap::Pt { k: 10.0, gamma: 0.003 };
    let ens = Ensemble::for_dimension(1001, 0);
    g.bench_function("norm_landscape_100x100_tf14", |b| b.iter(|| norm_landscape(&map, &grid, black_box(14), &ens).unwrap()));
    let l = norm_landscape(&map, &grid, 14, &ens).unwrap();
    g.bench_function("solve_threshold_gain", |b| b.iter(|| solve_threshold(&l, SupportMode::Gain, black_box(470), 1001).unwrap()));
    g.finish();
}

fn fields(c: &mut Criterion) {
    let grid = TorusGrid::new(400, 400).unwrap();
    let a = Field::from_fn(grid, |q, p| (6.0 * q).sin().abs() + p * p);
    let b = Field::from_fn(grid, |q, p| (5.0 * p).cos().abs() + q);
    c.bench_function("smooth_400x400", |bch| bch.iter(|| smooth_field(black_box(&a), smoothing_sigma(1001))));
    c.bench_function("jsd_400x400", |bch| bch.iter(|| jsd(black_box(&a), black_box(&b)).unwrap()));
}

criterion_group!(benches, schur, husimi, landscape, fields);
criterion_main!(benches);
