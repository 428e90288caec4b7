//! Compares the sharded sequential search against the data-parallel one
//! (when built with the `parallel` feature) on the reduced-form enumeration.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use aont::field::Field;
use aont::search::{run_sharded_sequential, SearchMode, SearchSpec};
#[cfg(feature = "parallel")]
use aont::search::run_sharded_parallel;

fn bench_reduced(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduced_search");
    group.sample_size(10);
    for q in [5u32, 7] {
        let field = Field::parse(&q.to_string()).unwrap();
        let spec = SearchSpec::new(field, SearchMode::Reduced);
        group.bench_with_input(BenchmarkId::new("sequential", q), &spec, |b, spec| {
            b.iter(|| run_sharded_sequential(spec, 8).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", q), &spec, |b, spec| {
            b.iter(|| run_sharded_parallel(spec, 8).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_reduced);
criterion_main!(benches);
