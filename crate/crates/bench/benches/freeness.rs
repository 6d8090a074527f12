use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thincirc_core::construction::BernoulliStream;
use thincirc_core::{find_block_naive, find_rectangle_integer, is_free_cyclic, CirculantMatrix};

fn integer_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_rectangle_integer");
    for n in [1u64 << 12, 1 << 16, 1 << 20] {
        // Around the density where repeated differences start to appear.
        let p = 0.5 / (n as f64).sqrt();
        let s = BernoulliStream::new(1, 0).sample(n, p);
        group.bench_with_input(BenchmarkId::new("k2l2", n), &s, |b, s| {
            b.iter(|| find_rectangle_integer(black_box(s), 2, 2).unwrap())
        });
        let p = (n as f64).powf(-0.6);
        let s = BernoulliStream::new(2, 0).sample(n, p);
        group.bench_with_input(BenchmarkId::new("k3l3", n), &s, |b, s| {
            b.iter(|| find_rectangle_integer(black_box(s), 3, 3).unwrap())
        });
    }
    group.finish();
}

fn cyclic_vs_naive(c: &mut Criterion) {
    let s = BernoulliStream::new(3, 0).sample(16, 0.3);
    let m = CirculantMatrix::embed_double(&s).unwrap();
    c.bench_function("is_free_cyclic/n32", |b| {
        b.iter(|| is_free_cyclic(black_box(&m), 3, 2).unwrap())
    });
    c.bench_function("find_block_naive/n32", |b| {
        b.iter(|| find_block_naive(black_box(&m), 3, 2).unwrap())
    });
}

criterion_group!(benches, integer_search, cyclic_vs_naive);
criterion_main!(benches);
