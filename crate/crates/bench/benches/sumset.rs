use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thincirc_core::rectangles::{verify_lemmas, LemmaSelection, DEFAULT_TUPLE_LIMIT};
use thincirc_core::rho::{rho_by_max, rho_closed};
use thincirc_core::sumset::{
    min_sumset_by_partition_search, min_sumset_grid_exhaustive, minkowski_sum, SimplexPair,
    SumsetBoundQuery,
};

fn partition_grid(c: &mut Criterion) {
    c.bench_function("partition_search/L<=12", |b| {
        b.iter(|| {
            for k in 2..=12 {
                for l in k..=12 {
                    for n in 1..=k + l - 2 {
                        let q = SumsetBoundQuery::new(n, k, l).unwrap();
                        black_box(min_sumset_by_partition_search(&q).unwrap());
                    }
                }
            }
        })
    });
}

fn pair_construction(c: &mut Criterion) {
    let pair = SimplexPair::new(8, 8, 2, 3, 3).unwrap();
    let (a, b) = pair.construct();
    c.bench_function("minkowski_sum/simplex_pair_8_8", |bch| {
        bch.iter(|| minkowski_sum(black_box(&a), black_box(&b)).unwrap().len())
    });
}

fn grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_exhaustive");
    group.sample_size(10);
    group.bench_function("K3_L3_n2_r2", |b| {
        b.iter(|| min_sumset_grid_exhaustive(3, 3, 2, 2).unwrap())
    });
    group.finish();
}

fn rho(c: &mut Criterion) {
    c.bench_function("rho_closed/40", |b| {
        b.iter(|| {
            (2..=40)
                .flat_map(|k| (k..=40).map(move |l| rho_closed(k, l).unwrap()))
                .count()
        })
    });
    c.bench_function("rho_by_max/40", |b| {
        b.iter(|| {
            (2..=40)
                .flat_map(|k| (k..=40).map(move |l| rho_by_max(k, l).unwrap()))
                .count()
        })
    });
}

fn lemmas(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_lemmas");
    group.sample_size(10);
    group.bench_function("k3_l3_N5", |b| {
        b.iter(|| verify_lemmas(5, 3, 3, LemmaSelection::ALL, DEFAULT_TUPLE_LIMIT).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    partition_grid,
    pair_construction,
    grid,
    rho,
    lemmas
);
criterion_main!(benches);
