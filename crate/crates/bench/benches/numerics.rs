use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flint_core::series::{partial_sum, spikes, term, SeriesParams};
use flint_core::{pi_to, sin_of_integer};
use num_bigint::BigUint;
use num_rational::BigRational;

fn bench_pi(c: &mut Criterion) {
    let mut g = c.benchmark_group("pi_to");
    for digits in [100u32, 1000, 10_000] {
        // The cache only grows, so this measures rounding from an already computed π.
        g.bench_with_input(BenchmarkId::from_parameter(digits), &digits, |b, &d| {
            b.iter(|| pi_to(black_box(d)).unwrap())
        });
    }
    g.finish();
}

fn bench_sin(c: &mut Criterion) {
    let mut g = c.benchmark_group("sin_of_integer");
    for n in ["355", "14885392687", "123456789012345678901234567890"] {
        let nb: BigUint = n.parse().unwrap();
        for digits in [30u32, 60] {
            g.bench_with_input(BenchmarkId::new(n, digits), &digits, |b, &d| {
                b.iter(|| sin_of_integer(black_box(&nb), d).unwrap())
            });
        }
    }
    g.finish();
}

fn bench_term(c: &mut Criterion) {
    let fh = SeriesParams::flint_hills();
    let frac = SeriesParams::parse("2.5", "1.5").unwrap();
    let n = BigUint::from(103993u32);
    c.bench_function("term/integer_exponents", |b| b.iter(|| term(black_box(&n), &fh, 15).unwrap()));
    c.bench_function("term/rational_exponents", |b| b.iter(|| term(black_box(&n), &frac, 15).unwrap()));
}

fn bench_sums(c: &mut Criterion) {
    let fh = SeriesParams::flint_hills();
    let mut g = c.benchmark_group("scans");
    g.sample_size(10);
    g.bench_function("partial_sum/1e4/12_digits", |b| b.iter(|| partial_sum(10_000, &fh, 12).unwrap()));
    let one = BigRational::from_integer(1.into());
    g.bench_function("spikes/1e5", |b| b.iter(|| spikes(100_000, &fh, &one).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_pi, bench_sin, bench_term, bench_sums);
criterion_main!(benches);
