use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ellfermat::arith::two_square;
use ellfermat::cm::{cm_curve, cm_point, trace};
use ellfermat::order::order_by_ladder;
use ellfermat::{factorize, FactorBudget, Integer};

fn bench_factorize(c: &mut Criterion) {
    let mut group = c.benchmark_group("factorize");
    // F_4 of the CM sequence: six primes, the largest with 9 digits
    let f4: Integer = "31993857363758147445458302".parse().unwrap();
    let semiprime = Integer::from(1_000_003u64) * Integer::from(998_244_353u64);
    for (name, n) in [("cm_f4", f4), ("semiprime", semiprime)] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &n, |b, n| {
            b.iter(|| factorize(black_box(n), &FactorBudget::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_two_square(c: &mut Criterion) {
    let p: Integer = "364024274689".parse().unwrap();
    c.bench_function("two_square", |b| b.iter(|| two_square(black_box(&p)).unwrap()));
    c.bench_function("cm_trace", |b| b.iter(|| trace(black_box(&p)).unwrap()));
}

fn bench_order(c: &mut Criterion) {
    let curve = cm_curve();
    let p = cm_point();
    let q: Integer = "676209479362440577".parse().unwrap();
    c.bench_function("order_ladder", |b| {
        b.iter(|| order_by_ladder(&curve, &p, black_box(&q)).unwrap())
    });
}

criterion_group!(benches, bench_factorize, bench_two_square, bench_order);
criterion_main!(benches);
