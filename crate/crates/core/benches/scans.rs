use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use isoperim_core::search::{self, ScanOptions};
use isoperim_core::Execution;

fn perturbation(c: &mut Criterion) {
    let mut group = c.benchmark_group("perturbation_scan");
    group.sample_size(10);
    for n in [32, 128] {
        for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            let opts = ScanOptions {
                exec,
                ..ScanOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| search::perturbation_scan(0.5, 4, 0.1, n, 7, opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, perturbation);
criterion_main!(benches);
