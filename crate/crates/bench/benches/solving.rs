//! Grounding and solving benchmarks, with and without breaking.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mxsym_cli::{color_cycle, generate_pigeonhole, run_pipeline_on, Options, Stage};
use mxsym_core::{ground_theory, sat_solve};

fn solving(c: &mut Criterion) {
    let pigeons = generate_pigeonhole(10);
    c.bench_function("ground pigeons-10", |b| {
        b.iter(|| ground_theory(black_box(&pigeons)).unwrap())
    });

    // Unbroken pigeonhole refutations grow exponentially; eight pigeons
    // is the largest size that keeps a sampled benchmark tolerable.
    let mut group = c.benchmark_group("unbroken");
    group.sample_size(10);
    group.bench_function("solve pigeons-8 unbroken", |b| {
        let (cnf, _) = ground_theory(&generate_pigeonhole(8)).unwrap();
        b.iter(|| black_box(sat_solve(&cnf)))
    });
    group.finish();

    c.bench_function("pipeline pigeons-10 broken", |b| {
        b.iter(|| {
            run_pipeline_on(
                generate_pigeonhole(10),
                "pigeons-10",
                Stage::Solve,
                &Options::default(),
            )
            .unwrap()
        })
    });

    c.bench_function("pipeline cycle-8x3", |b| {
        b.iter(|| {
            run_pipeline_on(color_cycle(8, 3), "cycle-8x3", Stage::Solve, &Options::default())
                .unwrap()
        })
    });
}

criterion_group!(benches, solving);
criterion_main!(benches);
