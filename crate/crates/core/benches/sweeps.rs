//! Compares the data-parallel and the strictly sequential evaluation of
//! a slice of the instance sweep. Run with and without the `parallel`
//! feature to see the fallback cost:
//!
//! ```text
//! cargo bench -p injcog
//! cargo bench -p injcog --no-default-features
//! ```

use criterion::{criterion_group, criterion_main, Criterion};
use injcog::sweep::{build_instances, evaluate_all, evaluate_all_seq, SweepInstance};

fn slice() -> Vec<SweepInstance> {
    let mut instances = build_instances(2);
    instances.truncate(400);
    instances
}

fn bench_sweep(c: &mut Criterion) {
    let instances = slice();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| evaluate_all(&instances)));
    group.bench_function("sequential", |b| b.iter(|| evaluate_all_seq(&instances)));
    group.finish();
}

criterion_group!(benches, bench_sweep);
criterion_main!(benches);
