use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use isotoda::homology::betti_table;
use isotoda::schrodinger::{forbidden_zones, SchrodingerOperator, DEFAULT_ZONE_TOL};
use isotoda::spectrum::{analyze, DEFAULT_GROUPING_TOL};
use isotoda::tiling::{build_complex, dual_poset_stats, COMPLEX_CAP};
use isotoda::toda::{integrate, TodaConfig};
use isotoda_bench::sample_matrix;

fn numerics(c: &mut Criterion) {
    let l = sample_matrix(8, 1);
    c.bench_function("eigenvalues n=8", |b| {
        b.iter(|| black_box(&l).eigenvalues().unwrap())
    });
    let s = l.spectrum().unwrap();
    c.bench_function("analyze n=8", |b| {
        b.iter(|| analyze(black_box(&s), DEFAULT_GROUPING_TOL).unwrap())
    });
    let op = SchrodingerOperator::from_matrix(&l).unwrap();
    c.bench_function("spectral polynomial n=8", |b| {
        b.iter(|| black_box(&op).spectral_polynomial().unwrap())
    });
    c.bench_function("forbidden zones n=8", |b| {
        b.iter(|| forbidden_zones(black_box(&l), DEFAULT_ZONE_TOL).unwrap())
    });
    let l5 = sample_matrix(5, 2);
    let cfg = TodaConfig {
        t_end: 0.1,
        ..TodaConfig::default()
    };
    c.bench_function("toda 100 steps n=5", |b| {
        b.iter(|| integrate(black_box(&l5), &cfg).unwrap())
    });
}

fn combinatorics(c: &mut Criterion) {
    c.bench_function("build complex n=6", |b| {
        b.iter(|| build_complex(black_box(6), COMPLEX_CAP).unwrap())
    });
    c.bench_function("dual poset stats n=20", |b| {
        b.iter(|| dual_poset_stats(black_box(20)).unwrap())
    });
    c.bench_function("betti table n=10", |b| {
        b.iter(|| betti_table(black_box(10), 4, 5).unwrap())
    });
}

criterion_group!(benches, numerics, combinatorics);
criterion_main!(benches);
