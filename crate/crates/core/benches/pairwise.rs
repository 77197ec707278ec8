//! Pairwise distance matrix on the 117 equal-size partitions of the 4x4
//! grid, with a single worker versus the default thread pool.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use partition_ot::ensemble::pairwise_matrix_with_workers;
use partition_ot::graph::grid_graph;
use partition_ot::{enumerate_grid_partitions, Metric, Partition, Representation};

fn bench_pairwise(c: &mut Criterion) {
    let g = grid_graph(4, 4).unwrap();
    let ensemble = enumerate_grid_partitions(4, 4, 4, 4, 4, true).unwrap();
    let raw: Vec<Partition> = ensemble
        .iter()
        .map(|p| {
            p.clone()
                .with_representation(Representation::Unbalanced, None)
                .unwrap()
        })
        .collect();
    let cases = [
        ("transport", &ensemble, Metric::Transport),
        ("unbalanced", &raw, Metric::Unbalanced { lambda: 2.into() }),
    ];
    for (name, ens, metric) in cases {
        let mut group = c.benchmark_group(format!("pairwise_4x4_{name}"));
        group
            .sample_size(10)
            .measurement_time(std::time::Duration::from_secs(10));
        group.bench_function("sequential", |b| {
            b.iter(|| pairwise_matrix_with_workers(&g, black_box(ens), metric, Some(1)).unwrap())
        });
        group.bench_function("parallel", |b| {
            b.iter(|| pairwise_matrix_with_workers(&g, black_box(ens), metric, None).unwrap())
        });
        group.finish();
    }
}

criterion_group!(benches, bench_pairwise);
criterion_main!(benches);
