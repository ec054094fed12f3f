use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use defrisk::corpus::{random_measure, random_two_alternating, random_variable, rng};
use defrisk::distortion::DistortionFunction;
use defrisk::regulatory::{rwa_curve, SignConvention};
use defrisk::var::rho_var;
use defrisk::{DefaultRiskMeasure, MonetaryRiskMeasure};

fn choquet(c: &mut Criterion) {
    let mut group = c.benchmark_group("choquet");
    for n in [8, 12, 16] {
        let mut r = rng(1);
        let cap = random_two_alternating(&mut r, n, 3).unwrap();
        let x = random_variable(&mut r, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| cap.choquet(black_box(&x))));
    }
    group.finish();
}

fn two_alternating(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_two_alternating");
    group.sample_size(10);
    for n in [6, 8, 10] {
        let cap = random_two_alternating(&mut rng(2), n, 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| cap.is_two_alternating(black_box(4096), 0))
        });
    }
    group.finish();
}

fn envelope(c: &mut Criterion) {
    let mut group = c.benchmark_group("coherent_envelope");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let cap = random_two_alternating(&mut rng(3), n, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| cap.coherent_envelope(black_box(256), 0).unwrap())
        });
    }
    group.finish();
}

fn var(c: &mut Criterion) {
    let n = 32;
    let mut r = rng(4);
    let p = random_measure(&mut r, n, false);
    let x = random_variable(&mut r, n);
    let measures = [
        ("pd", DefaultRiskMeasure::pd(p.clone())),
        ("sqrt_pd", DefaultRiskMeasure::distorted_pd(p.clone(), DistortionFunction::sqrt())),
        ("binary_mean", DefaultRiskMeasure::binary(MonetaryRiskMeasure::expectation(p))),
    ];
    let mut group = c.benchmark_group("rho_var");
    for (name, rho) in &measures {
        group.bench_function(*name, |b| b.iter(|| rho_var(rho, black_box(0.05), &x).unwrap()));
    }
    group.finish();
}

fn rwa(c: &mut Criterion) {
    c.bench_function("rwa_curve/1000", |b| {
        b.iter(|| rwa_curve(black_box(1000), 1.0, 0.4, SignConvention::Plus).unwrap())
    });
}

criterion_group!(benches, choquet, two_alternating, envelope, var, rwa);
criterion_main!(benches);
