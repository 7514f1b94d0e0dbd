//! Enumeration and Monte Carlo throughput.
//!
//! With the `parallel` feature each workload runs on a one-thread pool and on
//! the full pool. Built with `--no-default-features` it runs the sequential
//! fallback instead.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use laststop::montecarlo::estimate;
use laststop::oracle::enumerate_policy_value;
use laststop::{ProblemSpec, StoppingRegion, ThresholdPolicy};

type Workload = Box<dyn Fn() -> f64 + Send + Sync>;

fn workloads() -> Vec<(&'static str, Workload)> {
    let spec = ProblemSpec::biased(12, 0.2, 0.1).unwrap();
    let region = StoppingRegion::threshold(12, ThresholdPolicy { s: 9, s_prime: 7 });
    let big = ProblemSpec::biased(40, 0.09, 0.05).unwrap();
    let big_region = StoppingRegion::threshold(40, ThresholdPolicy { s: 33, s_prime: 28 });
    vec![
        (
            "enumerate_n12",
            Box::new(move || enumerate_policy_value(&spec, &region).unwrap()),
        ),
        (
            "simulate_n40_200k",
            Box::new(move || estimate(&big, &big_region, 200_000, 7).unwrap().estimate),
        ),
    ]
}

#[cfg(feature = "parallel")]
fn compare(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let full = rayon::ThreadPoolBuilder::new().build().unwrap();
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new(name, "1 thread"), |b| {
            b.iter(|| single.install(|| black_box(work())))
        });
        let label = format!("full pool of {}", full.current_num_threads());
        group.bench_function(BenchmarkId::new(name, label), |b| {
            b.iter(|| full.install(|| black_box(work())))
        });
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn compare(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new(name, "sequential"), |b| {
            b.iter(|| black_box(work()))
        });
    }
    group.finish();
}

criterion_group!(benches, compare);
criterion_main!(benches);
