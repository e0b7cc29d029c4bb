//! Batch workloads on the rayon pool versus a plain sequential loop.
//!
//! The `selfcheck` group runs through `vqaut::par`, so compare
//! `cargo bench` with `cargo bench --no-default-features` for that one.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use vqaut::bs_embed::{britton_report, bs_generators};
use vqaut::embeddings::{phi, theta};
use vqaut::par;
use vqaut::selfcheck::{criterion_1, Config};
use vqaut::thompson_v::random_element;
use vqaut::VElement;

fn sample(n: usize, carets: usize) -> Vec<(VElement, VElement)> {
    (0..n as u64)
        .map(|s| {
            (
                random_element(s, carets),
                random_element(s + 1_000_000, carets),
            )
        })
        .collect()
}

fn bench_hom_law(c: &mut Criterion) {
    let items = sample(256, 10);
    let law = |(a, b): &(VElement, VElement)| {
        let f = |x: &VElement| phi(&theta(x));
        f(&a.compose(b)) == f(a).compose(&f(b))
    };
    let mut g = c.benchmark_group("phi_theta_hom_law");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(items.iter().map(law).collect::<Vec<_>>()))
    });
    g.bench_function(BenchmarkId::new("par_map", par::is_parallel()), |b| {
        b.iter(|| black_box(par::map(&items, law)))
    });
    g.finish();
}

fn bench_compose(c: &mut Criterion) {
    let items = sample(4096, 12);
    let op = |(a, b): &(VElement, VElement)| a.compose(b).inverse().len();
    let mut g = c.benchmark_group("compose_batch");
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(items.iter().map(op).sum::<usize>()))
    });
    g.bench_function(BenchmarkId::new("par_map", par::is_parallel()), |b| {
        b.iter(|| black_box(par::map(&items, op).into_iter().sum::<usize>()))
    });
    g.finish();
}

fn bench_library_paths(c: &mut Criterion) {
    let mode = if par::is_parallel() {
        "parallel"
    } else {
        "sequential"
    };
    let witness = bs_generators(3, -1).expect("valid parameters");
    let mut g = c.benchmark_group("library");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("britton_L6", mode), |b| {
        b.iter(|| black_box(britton_report(&witness, 6)))
    });
    let cfg = Config {
        seed: 1,
        samples: Some(64),
    };
    g.bench_function(BenchmarkId::new("selfcheck_c1_64", mode), |b| {
        b.iter(|| black_box(criterion_1(&cfg)))
    });
    g.finish();
}

criterion_group!(benches, bench_compose, bench_hom_law, bench_library_paths);
criterion_main!(benches);
