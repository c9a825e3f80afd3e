use std::hint::black_box;

use cliffsynth::walker::{sample_walk, Scaling, WalkConfig};
use cliffsynth::{MoveSet, PhaseMode, Tableau, WeightScheme};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_tableau(n: usize, seed: u64) -> (MoveSet, Tableau) {
    let ms = MoveSet::all_to_all(n, WeightScheme::CnotCount).unwrap();
    let cfg = WalkConfig::new(n, Scaling::Linear, seed, PhaseMode::WithPhases);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let t = sample_walk(&cfg, &ms, &mut r).unwrap().tableau;
    (ms, t)
}

fn tableau_ops(c: &mut Criterion) {
    for n in [2, 4, 8, 12] {
        let (ms, a) = random_tableau(n, 1);
        let (_, b) = random_tableau(n, 2);
        let gate = ms.moves()[ms.len() - 1].gate;

        let mut g = c.benchmark_group(format!("tableau_n{n}"));
        g.bench_function(BenchmarkId::new("apply_gate", n), |bench| {
            bench.iter(|| black_box(&a).apply_gate(black_box(&gate)).unwrap())
        });
        g.bench_function(BenchmarkId::new("compose", n), |bench| {
            bench.iter(|| black_box(&a).compose(black_box(&b)).unwrap())
        });
        g.bench_function(BenchmarkId::new("inverse", n), |bench| bench.iter(|| black_box(&a).inverse().unwrap()));
        g.bench_function(BenchmarkId::new("to_circuit", n), |bench| bench.iter(|| black_box(&a).to_circuit().unwrap()));
        g.bench_function(BenchmarkId::new("neighbors", n), |bench| bench.iter(|| ms.neighbors(black_box(&a)).unwrap()));
        g.finish();
    }
}

criterion_group!(benches, tableau_ops);
criterion_main!(benches);
