use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use philab_core::orlicz::{estimate_embedding_constant_with, Grid};
use philab_core::par::Execution;
use philab_core::young::{build_pathological, compute_indices_with, LogGrid, PathologicalParams, YoungFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn indices(c: &mut Criterion) {
    let psi = build_pathological(PathologicalParams::new(3.0, 2.0, 1.9).unwrap()).unwrap();
    let grid = LogGrid::new(1e-6, 1e12, 20_000).unwrap();
    let mut group = c.benchmark_group("indices");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| compute_indices_with(&psi, &grid, exec).unwrap())
        });
    }
    group.finish();
}

fn embedding(c: &mut Criterion) {
    let phi = YoungFunction::power(1.0 / 3.0, 3.0).with_default_indices().unwrap();
    let target = YoungFunction::power(0.25, 4.0).with_default_indices().unwrap();
    let grid = Grid::with_spacing(1.0, 1.0 / 256.0).unwrap();
    let mut group = c.benchmark_group("embedding_constant");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                estimate_embedding_constant_with(&phi, &target, &grid, 64, &mut rng, exec).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, indices, embedding);
criterion_main!(benches);
