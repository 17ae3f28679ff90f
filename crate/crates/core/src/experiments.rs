//! Measurement routines behind the scaling checks that do not fit the
//! generic hitting-time loop: stationarity of the size walk, recovery
//! after a single change, per-step drift of the fuller-machine job count,
//! initial discrepancy and the gap statistic.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{burn_in, sample_stationary, stationary_vector, walk_sizes};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Machine, SearchState};
use crate::oracle::{max_zero_run, tv_distance};
use crate::rng::{mix_seed, RandomStream};
use crate::search::{AlgorithmKind, Mutator};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryCheck {
    pub n: u64,
    pub samples: usize,
    pub burn: u64,
    /// Empirical pmf of sizes, index `j - 1` for size `j`.
    pub empirical: Vec<f64>,
    pub tv: f64,
}

/// Draws `samples` independent job sizes, each started uniformly in
/// `[1, n]` and moved `burn` walk steps, and compares their histogram with
/// the stationary distribution. Work is split into fixed chunks with their
/// own seeds, so the result does not depend on the thread count.
pub fn stationary_check(n: u64, samples: usize, burn: u64, seed: u64) -> Result<StationaryCheck> {
    if n < 2 {
        return Err(Error::InvalidInput("stationary check needs n >= 2".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("stationary check needs samples >= 1".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RandomStream::new(mix_seed(seed, c as u64));
            let len = CHUNK.min(samples - c * CHUNK);
            let mut sizes: Vec<u64> = (0..len).map(|_| rng.range_inclusive(1, n)).collect();
            walk_sizes(&mut sizes, n, burn, &mut rng)?;
            let mut counts = vec![0u64; n as usize];
            for &p in &sizes {
                counts[p as usize - 1] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(vec![0u64; n as usize], |mut acc, c| {
            acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
            acc
        });
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let tv = tv_distance(&empirical, &stationary_vector(n))?;
    Ok(StationaryCheck {
        n,
        samples,
        burn,
        empirical,
        tv,
    })
}

/// Runs `mutator` on static sizes until `d(x) <= U`, for at most `cap`
/// iterations. Returns the number of iterations used, `None` if capped.
pub fn run_until_within_upper(
    state: &mut SearchState,
    mutator: &Mutator,
    rng: &mut RandomStream,
    cap: u64,
) -> Option<u64> {
    let upper = state.instance().upper();
    let mut t = 0;
    while state.discrepancy() > upper {
        if t == cap {
            return None;
        }
        mutator.step(state, rng);
        t += 1;
    }
    Some(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecoveryOutcome {
    pub pre_run_iterations: u64,
    pub discrepancy_before_change: u64,
    pub discrepancy_after_change: u64,
    /// Iterations after the change until `d(x) <= U` again; `None` if capped.
    pub recovery_time: Option<u64>,
}

/// One recovery experiment on static sizes.
///
/// Sizes are uniform in `[lower, upper]` and the start is uniformly random.
/// The algorithm first runs until `d(x) <= U`; then one job on the fuller
/// machine (M1 on a tie), chosen uniformly, is grown to `U`, and the
/// iterations until `d(x) <= U` holds again are counted.
pub fn recovery_trial(
    n: usize,
    lower: u64,
    upper: u64,
    algorithm: AlgorithmKind,
    seed: u64,
    cap: u64,
) -> Result<RecoveryOutcome> {
    let root = RandomStream::new(seed);
    let mut rng = root.fork(1);
    let sizes = (0..n).map(|_| rng.range_inclusive(lower, upper)).collect();
    let instance = Instance::new(sizes, lower, upper)?;
    let assignment = Assignment::from_bits((0..n).map(|_| rng.coin()).collect());
    let mut state = SearchState::new(instance, assignment)?;
    let mutator = Mutator::new(algorithm, n);
    let mut algo_rng = root.fork(2);

    let pre = run_until_within_upper(&mut state, &mutator, &mut algo_rng, cap)
        .ok_or_else(|| Error::InvalidInput(format!("pre-run did not reach d <= U in {cap} iterations")))?;
    let before = state.discrepancy();

    let fuller = state.fuller_machine().machine();
    let mut pick = root.fork(3);
    let job = loop {
        let j = pick.index(n);
        if state.assignment().machine_of(j) == fuller {
            break j;
        }
    };
    state.set_size(job, upper)?;
    let after = state.discrepancy();
    let recovery = run_until_within_upper(&mut state, &mutator, &mut algo_rng, cap);
    Ok(RecoveryOutcome {
        pre_run_iterations: pre,
        discrepancy_before_change: before,
        discrepancy_after_change: after,
        recovery_time: recovery,
    })
}

/// Pairs `(X_t, X_{t+1})` of the number of jobs on the initially fuller
/// machine, on static sizes from the all-on-M1 start.
///
/// The process stops at the first time `T` the load of M1 is at most
/// `(P + U) / 2`; from then on `X` is `0`, so the last pair ends in `0`.
pub fn fuller_count_pairs(
    instance: Instance,
    algorithm: AlgorithmKind,
    rng: &mut RandomStream,
    cap: u64,
) -> Result<Vec<(u64, u64)>> {
    let n = instance.n();
    let threshold = instance.total() + instance.upper();
    let mut state = SearchState::new(instance, Assignment::all_on_first(n))?;
    let mutator = Mutator::new(algorithm, n);
    let mut pairs = Vec::new();
    let stopped = |s: &SearchState| 2 * s.loads().0 <= threshold;
    if stopped(&state) {
        return Ok(pairs);
    }
    for _ in 0..cap {
        let x = state.jobs_on(Machine::M1) as u64;
        mutator.step(&mut state, rng);
        if stopped(&state) {
            pairs.push((x, 0));
            break;
        }
        pairs.push((x, state.jobs_on(Machine::M1) as u64));
    }
    Ok(pairs)
}

/// Discrepancy of a uniformly random assignment on random-model sizes
/// (uniform in `[1, n]`, then `burn` walk steps per job).
pub fn random_initial_discrepancy(n: usize, burn: u64, rng: &mut RandomStream) -> Result<u64> {
    let sizes = (0..n).map(|_| rng.range_inclusive(1, n as u64)).collect();
    let instance = burn_in(&Instance::random_model(sizes)?, burn, rng)?;
    let assignment = Assignment::from_bits((0..n).map(|_| rng.coin()).collect());
    Ok(SearchState::new(instance, assignment)?.discrepancy())
}

/// Longest run of unused sizes for `n` sizes drawn from the stationary law.
pub fn stationary_zero_run(n: usize, rng: &mut RandomStream) -> Result<usize> {
    let sizes: Vec<u64> = (0..n).map(|_| sample_stationary(n as u64, rng)).collect();
    max_zero_run(&sizes, n as u64)
}
