//! Detection-side benchmarks: decomposition, closed partitions,
//! interchangeability, and the graph automorphism search.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use mxsym_cli::{color_cycle, generate_pigeonhole};
use mxsym_core::argpos::closed_partition;
use mxsym_core::autom::find_generators;
use mxsym_core::decompose::decompose;
use mxsym_core::dpg::build_dpg;
use mxsym_core::interchange::interchangeable_partition;

fn detection(c: &mut Criterion) {
    let pigeons = generate_pigeonhole(20);
    c.bench_function("decompose pigeons-20", |b| {
        b.iter(|| decompose(black_box(&pigeons)))
    });

    let dec = decompose(&pigeons);
    c.bench_function("closed partition pigeons-20", |b| {
        b.iter(|| closed_partition(black_box(&dec.problem.vocab), black_box(&dec.problem.theory)))
    });

    let blocks = closed_partition(&dec.problem.vocab, &dec.problem.theory);
    c.bench_function("interchangeability pigeons-20", |b| {
        b.iter(|| {
            for block in &blocks {
                black_box(interchangeable_partition(&dec.problem.input, block));
            }
        })
    });

    let cycle = decompose(&color_cycle(12, 3));
    let graph_block = closed_partition(&cycle.problem.vocab, &cycle.problem.theory)
        .into_iter()
        .find(|b| mxsym_cli::block_needs_graph(b))
        .expect("the cycle family has a graph-shaped block");
    c.bench_function("graph automorphisms cycle-12x3", |b| {
        b.iter(|| {
            let (g, _) = build_dpg(&cycle.problem.input, &graph_block);
            black_box(find_generators(&g))
        })
    });
}

criterion_group!(benches, detection);
criterion_main!(benches);
