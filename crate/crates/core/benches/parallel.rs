//! Sequential (one-thread pool) against rayon for the data-parallel kernels.
//!
//! Both variants run the same code; the sequential one is pinned to a
//! single-thread pool, which is also what a build without the `parallel`
//! feature does.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;

use pretentious::charsums::prop6_scan;
use pretentious::distance::{halasz_m, GridConfig};
use pretentious::halasz::mean_value;
use pretentious::{MultiplicativeFunction, PrimeTable, SieveMode};

fn pools() -> Vec<(&'static str, ThreadPool)> {
    let seq = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let par = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", seq), ("rayon", par)]
}

fn kernels(c: &mut Criterion) {
    let table = PrimeTable::new(1_000_000, SieveMode::SmallestFactor).unwrap();
    let liouville = MultiplicativeFunction::liouville();
    let moduli: Vec<u64> = (3..=100).collect();
    let grid = GridConfig {
        step: Some(1.0 / 16.0),
        refine_iterations: 20,
    };

    let mut g = c.benchmark_group("halasz_m");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "x=1e5,T=10"), |b| {
            b.iter(|| pool.install(|| halasz_m(black_box(&liouville), 100_000, 10.0, &table, grid).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("prop6_scan");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "q<=100,x=1e6"), |b| {
            b.iter(|| pool.install(|| prop6_scan(black_box(&moduli), &[10_000, 1_000_000], &table).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("mean_value");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_function(BenchmarkId::new(name, "x=1e6"), |b| {
            b.iter(|| pool.install(|| mean_value(black_box(&liouville), 1_000_000, &table).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
