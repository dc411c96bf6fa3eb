//! Sequential vs parallel execution of the three data-parallel hot paths.
//! Without the `parallel` feature both arms run the same loop.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fs_core::embed::{check_q_embeddable, QVector};
use fs_core::lab::{run_sweep_with, SweepConfig, SweepMode};
use fs_core::{Execution, FsInstance, Graph, NamedGraph};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn decompose(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    group.sample_size(10);
    for n in [8, 9] {
        let inst = FsInstance::new(Graph::gnp(n, 0.5, 1).unwrap(), Graph::gnp(n, 0.5, 2).unwrap()).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &inst, |b, inst| {
                b.iter(|| black_box(inst.decompose_with(10, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep_n6");
    group.sample_size(10);
    let grid = (1..=5).flat_map(|i| (1..=5).map(move |j| (i as f64 / 5.0, j as f64 / 5.0))).collect();
    let cfg = SweepConfig { n: 6, grid, trials: 20, seed: 3, mode: SweepMode::Exact { cap: 10 } };
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| black_box(run_sweep_with(&cfg, exec).unwrap())));
    }
    group.finish();
}

fn q_embed(c: &mut Criterion) {
    let mut group = c.benchmark_group("q_embeddable");
    let g = Graph::named(NamedGraph::Cycle, 6).unwrap();
    let h = Graph::named(NamedGraph::Path, 6).unwrap();
    let x = Graph::gnp(120, 0.6, 5).unwrap();
    let y = Graph::gnp(120, 0.6, 6).unwrap();
    let q = QVector::uniform(6, 4);
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(check_q_embeddable(&g, &h, &x, &y, &q, 200, 7, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, decompose, sweep, q_embed);
criterion_main!(benches);
