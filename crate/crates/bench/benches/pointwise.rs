use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use poisson_lab::connections::{contravariant_christoffels, div_pi, nabla_pi};
use poisson_lab::fields::Local;
use poisson_lab::foliation::{leaf_frame_jet, trace_leaf, Leg, EPS_RANK};
use poisson_lab::{classify, gallery, ClassifyOptions};
use poisson_lab_bench::fixtures;
use std::hint::black_box;

fn pointwise(c: &mut Criterion) {
    let mut group = c.benchmark_group("pointwise");
    for (s, p) in fixtures() {
        group.bench_with_input(BenchmarkId::new("local", &s.name), &p, |b, p| {
            b.iter(|| Local::new(&s, black_box(p)).unwrap())
        });
        let local = Local::new(&s, &p).unwrap();
        group.bench_with_input(BenchmarkId::new("nabla_pi", &s.name), &local, |b, l| {
            b.iter(|| nabla_pi(l, &contravariant_christoffels(black_box(l))))
        });
        group.bench_with_input(BenchmarkId::new("div_pi", &s.name), &local, |b, l| {
            b.iter(|| div_pi(l, &contravariant_christoffels(black_box(l))).unwrap())
        });
        let rank = local.rank(EPS_RANK);
        group.bench_with_input(BenchmarkId::new("leaf_frame", &s.name), &local, |b, l| {
            b.iter(|| leaf_frame_jet(black_box(l), rank, None).unwrap())
        });
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweeps");
    group.sample_size(10);
    let s = gallery::structure("so3_reg_conformal").unwrap();
    let opts = ClassifyOptions { samples: 100, ..Default::default() };
    group.bench_function("classify_100", |b| b.iter(|| classify(&s, &opts).unwrap()));
    let s = gallery::structure("so3_euclid").unwrap();
    let legs = [Leg { coord: 0, duration: 1.0 }];
    group.bench_function("trace_1000_steps", |b| {
        b.iter(|| trace_leaf(&s, &[0.0, 0.0, 1.0], &legs, 1e-3).unwrap())
    });
    group.finish();
}

criterion_group!(benches, pointwise, sweeps);
criterion_main!(benches);
