use std::hint::black_box;

use bola_ssim::bola::{choose, threshold_profile, DecisionMode, NegativePolicy, Version};
use bola_ssim::sim::simulate;
use bola_ssim_bench::fixture;
use criterion::{criterion_group, criterion_main, Criterion};

fn decisions(c: &mut Criterion) {
    let f = fixture(Version::V2, 200, 1);
    let ladder = &f.ladders[0];

    c.bench_function("choose/10 formats", |b| {
        b.iter(|| {
            choose(
                &f.params,
                ladder,
                black_box(7.5),
                DecisionMode::Client,
                NegativePolicy::ArgmaxUtility,
            )
        })
    });

    c.bench_function("threshold_profile/10 formats", |b| {
        b.iter(|| threshold_profile(&f.params, black_box(ladder)))
    });
}

fn sessions(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    for version in [Version::V1, Version::V2] {
        let f = fixture(version, 500, 2);
        group.bench_function(format!("{version:?}/500 chunks"), |b| {
            b.iter(|| simulate(&f.session, black_box(&f.ladders), &f.trace).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, decisions, sessions);
criterion_main!(benches);
