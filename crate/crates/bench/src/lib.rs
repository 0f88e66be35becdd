//! Criterion benchmarks for the pipeline stages, run by `benches/pipeline.rs`.

use std::hint::black_box;

use asecluster::clustering::{misclustering_count, mse_cluster};
use asecluster::graph_models::{presets, sample_adjacency, AdjacencySample, LatentPositionMatrix};
use asecluster::harness::{run_trial, TrialConfig};
use asecluster::spectral::{ase, EigenMethod, EigenOptions};
use criterion::{BenchmarkId, Criterion};

fn fixture(n: usize) -> (LatentPositionMatrix, AdjacencySample) {
    let spec = presets::dense_two_block()
        .build(n, 0)
        .expect("preset builds");
    let x = spec.latent_positions().expect("latent positions");
    let a = sample_adjacency(&x, 1).expect("sample");
    (x, a)
}

pub fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_adjacency");
    for n in [500, 2000] {
        let (x, _) = fixture(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &x, |b, x| {
            b.iter(|| sample_adjacency(black_box(x), 7).unwrap())
        });
    }
    g.finish();
}

pub fn embedding(c: &mut Criterion) {
    let mut g = c.benchmark_group("ase");
    g.sample_size(10);
    for n in [500, 2000] {
        let (_, a) = fixture(n);
        for (name, method) in [
            ("dense", EigenMethod::Dense),
            ("lanczos", EigenMethod::Lanczos),
        ] {
            let opts = EigenOptions::default().with_method(method);
            g.bench_with_input(BenchmarkId::new(name, n), &a, |b, a| {
                b.iter(|| ase(black_box(a), 2, &opts).unwrap())
            });
        }
    }
    g.finish();
}

pub fn clustering(c: &mut Criterion) {
    let (_, a) = fixture(2000);
    let emb = ase(&a, 2, &EigenOptions::default()).unwrap();
    let mut g = c.benchmark_group("mse_cluster");
    for restarts in [1, 32] {
        g.bench_with_input(
            BenchmarkId::new("n2000_k2", restarts),
            &restarts,
            |b, &r| b.iter(|| mse_cluster(black_box(&emb.xhat), 2, r, 3).unwrap()),
        );
    }
    g.finish();

    let tau: Vec<usize> = (0..10_000).map(|i| i % 5).collect();
    let hat: Vec<usize> = (0..10_000).map(|i| (i * 7 + i / 13) % 5).collect();
    c.bench_function("misclustering_count/n10000_k5", |b| {
        b.iter(|| misclustering_count(black_box(&tau), black_box(&hat), 5).unwrap())
    });
}

pub fn trial(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trial");
    g.sample_size(10);
    let cfg = TrialConfig::new(presets::dense_two_block());
    for (name, cfg) in [
        ("with_bounds", cfg.clone()),
        ("no_bounds", cfg.with_bounds(false)),
    ] {
        g.bench_function(BenchmarkId::new(name, 1000), |b| {
            b.iter(|| run_trial(&cfg, 1000, 42).unwrap())
        });
    }
    g.finish();
}
