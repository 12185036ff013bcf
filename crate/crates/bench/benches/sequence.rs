use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ellfermat::cm::{cm_curve, cm_point};
use ellfermat::fermat::tau_magnitudes;
use ellfermat::{generate_direct, generate_recurrence, tau_for_all_k, Curve, GenerateOptions, TauOptions};

fn bench_generate(c: &mut Criterion) {
    let curve = cm_curve();
    let p = cm_point();
    let mut group = c.benchmark_group("generate");
    for k in [6u32, 8, 10] {
        group.bench_with_input(BenchmarkId::new("direct", k), &k, |b, &k| {
            b.iter(|| generate_direct(&curve, &p, k, &GenerateOptions::default()).unwrap())
        });
        let tau = tau_magnitudes(&generate_direct(&curve, &p, k, &GenerateOptions::default()).unwrap());
        group.bench_with_input(BenchmarkId::new("recurrence", k), &k, |b, &k| {
            b.iter(|| generate_recurrence(&curve, &p, &tau, k).unwrap())
        });
    }
    group.finish();
}

fn bench_tau_schedule(c: &mut Criterion) {
    let curve = Curve::new(-199, -1, 0).unwrap();
    let p = curve.point(2809, 89623, 3).unwrap();
    c.bench_function("tau_schedule_k8", |b| {
        b.iter(|| tau_for_all_k(&curve, &p, 8, &TauOptions::default()).unwrap())
    });
}

criterion_group!(benches, bench_generate, bench_tau_schedule);
criterion_main!(benches);
