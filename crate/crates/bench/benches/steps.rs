use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dynsched::dynamics::{burn_in, ChangeModel, ChangeSchedule, Dynamics, JobPicker};
use dynsched::harness::{run_trial, ExperimentConfig, ModelKind};
use dynsched::oracle::optimal_discrepancy;
use dynsched::{AlgorithmKind, Assignment, Instance, Mutator, RandomStream, SearchState};

fn random_state(n: usize, seed: u64) -> SearchState {
    let mut rng = RandomStream::new(seed);
    let sizes = (0..n).map(|_| rng.range_inclusive(1, n as u64)).collect();
    SearchState::new(Instance::new(sizes, 1, n as u64).unwrap(), Assignment::all_on_first(n)).unwrap()
}

fn bench_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for &n in &[64usize, 1024, 16384] {
        for algo in [AlgorithmKind::Rls, AlgorithmKind::Oea] {
            let mutator = Mutator::new(algo, n);
            let mut state = random_state(n, 1);
            let mut rng = RandomStream::new(2);
            group.bench_with_input(BenchmarkId::new(algo.name(), n), &n, |b, _| {
                b.iter(|| black_box(mutator.step(&mut state, &mut rng)))
            });
        }
    }
    group.finish();
}

fn bench_changes(c: &mut Criterion) {
    let n = 1024;
    let mut state = random_state(n, 3);
    let mut dynamics = Dynamics::new(
        ChangeModel::RandomWalk { picker: JobPicker::UniformRandom },
        ChangeSchedule::every(1).unwrap(),
        RandomStream::new(4),
        RandomStream::new(5),
    )
    .unwrap();
    let mut t = 0;
    c.bench_function("random_walk_change/1024", |b| {
        b.iter(|| {
            t += 1;
            black_box(dynamics.maybe_change(&mut state, t).unwrap())
        })
    });

    let inst = random_state(64, 6).instance().clone();
    let mut rng = RandomStream::new(7);
    c.bench_function("burn_in/64x16384", |b| {
        b.iter(|| black_box(burn_in(&inst, 4 * 64 * 64, &mut rng).unwrap()))
    });
}

fn bench_oracle(c: &mut Criterion) {
    let inst = random_state(64, 8).instance().clone();
    c.bench_function("optimal_discrepancy/64", |b| {
        b.iter(|| black_box(optimal_discrepancy(&inst).unwrap()))
    });
}

fn bench_trial(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::new(ModelKind::Adversary, AlgorithmKind::Oea, 256);
    cfg.tau = Some(1);
    cfg.stop_when_all_hit = true;
    let mut id = 0;
    c.bench_function("trial/adversary_oea_256", |b| {
        b.iter(|| {
            id += 1;
            black_box(run_trial(&cfg, id).unwrap())
        })
    });
}

criterion_group!(benches, bench_steps, bench_changes, bench_oracle, bench_trial);
criterion_main!(benches);
