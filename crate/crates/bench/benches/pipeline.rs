use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use finfree::convolution::{
    laguerre_profile, lln_limit_roots, multiplicative_convolve, multiplicative_power,
};
use finfree::empirical::{discretize_measure, ks_distance, EmpiricalMeasure};
use finfree::free_limit::{MeasureSpec, PhiQuantileFn};
use finfree::solver::{roots_of_power, SolverConfig};
use finfree::symmetric::{RootMultiset, SymmetricProfile};
use num_rational::BigRational;

fn sample_roots(d: usize) -> RootMultiset {
    let r = (1..=d as i64)
        .map(|k| BigRational::new(k.into(), 7.into()))
        .collect();
    RootMultiset::new(r).unwrap()
}

fn profile(c: &mut Criterion) {
    let mut g = c.benchmark_group("profile_from_roots");
    for d in [16, 64, 128] {
        let r = sample_roots(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &r, |b, r| {
            b.iter(|| SymmetricProfile::from_roots(black_box(r)))
        });
    }
    g.finish();
}

fn convolve(c: &mut Criterion) {
    let mut g = c.benchmark_group("convolve");
    for d in [16, 64] {
        let p = SymmetricProfile::from_roots(&sample_roots(d));
        let q = laguerre_profile(d);
        g.bench_with_input(BenchmarkId::new("product", d), &d, |b, _| {
            b.iter(|| multiplicative_convolve(black_box(&p), black_box(&q)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("power_64", d), &d, |b, _| {
            b.iter(|| multiplicative_power(black_box(&p), 64))
        });
        g.bench_with_input(BenchmarkId::new("limit", d), &d, |b, _| {
            b.iter(|| lln_limit_roots(black_box(&p)))
        });
    }
    g.finish();
}

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("roots_of_power");
    g.sample_size(10);
    let cfg = SolverConfig::new(1e-30).unwrap();
    for (d, n) in [(4, 16), (8, 64), (16, 64)] {
        let p = laguerre_profile(d);
        g.bench_with_input(BenchmarkId::new(format!("laguerre_{d}"), n), &n, |b, &n| {
            b.iter(|| roots_of_power(black_box(&p), n, &cfg).unwrap())
        });
    }
    g.finish();
}

fn empirical(c: &mut Criterion) {
    let mut g = c.benchmark_group("empirical");
    let mp = MeasureSpec::MarchenkoPastur;
    let phi = PhiQuantileFn::new(mp.clone()).unwrap();
    for d in [100, 400] {
        g.bench_with_input(BenchmarkId::new("discretize_mp", d), &d, |b, &d| {
            b.iter(|| discretize_measure(black_box(&mp), d).unwrap())
        });
        let emp = EmpiricalMeasure::from_roots(&discretize_measure(&mp, d).unwrap());
        g.bench_with_input(BenchmarkId::new("ks_phi_mp", d), &d, |b, _| {
            b.iter(|| ks_distance(black_box(&emp), &phi))
        });
    }
    g.finish();
}

criterion_group!(benches, profile, convolve, solve, empirical);
criterion_main!(benches);
