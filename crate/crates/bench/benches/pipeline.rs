use criterion::{criterion_group, criterion_main};

criterion_group!(
    benches,
    asecluster_bench::sampling,
    asecluster_bench::embedding,
    asecluster_bench::clustering,
    asecluster_bench::trial
);
criterion_main!(benches);
