//! RLS and the (1+1) EA with the non-strict acceptance rule `f(y) <= f(x)`.
//!
//! The (1+1) EA mutation samples the number of flipped bits from
//! `Bin(n, 1/n)` and then a uniform subset of that size, which has the same
//! law as flipping every bit independently with probability `1/n` but costs
//! `O(1)` expected work per step.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::Result;
use crate::model::SearchState;
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    #[serde(rename = "RLS", alias = "rls")]
    Rls,
    #[serde(rename = "OEA", alias = "oea", alias = "(1+1) EA")]
    Oea,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Rls => "RLS",
            AlgorithmKind::Oea => "OEA",
        }
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rls" => Ok(AlgorithmKind::Rls),
            "oea" | "ea" | "(1+1) ea" | "1+1ea" => Ok(AlgorithmKind::Oea),
            _ => Err(crate::Error::Config(format!("unknown algorithm {s:?}"))),
        }
    }
}

pub type FlipSet = SmallVec<[usize; 4]>;

/// Record of one iteration, kept whether or not the candidate was accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub flipped: FlipSet,
    pub accepted: bool,
    pub fitness_before: u64,
    pub fitness_after_candidate: u64,
}

/// Samples flip sets for one algorithm on a fixed `n`.
#[derive(Debug, Clone)]
pub struct Mutator {
    kind: AlgorithmKind,
    n: usize,
    // cumulative Bin(n, 1/n) probabilities, truncated once the tail is negligible
    flip_count_cdf: Vec<f64>,
}

impl Mutator {
    pub fn new(kind: AlgorithmKind, n: usize) -> Self {
        assert!(n >= 1, "mutation needs at least one bit");
        let flip_count_cdf = match kind {
            AlgorithmKind::Rls => Vec::new(),
            AlgorithmKind::Oea => binomial_cdf(n),
        };
        Self {
            kind,
            n,
            flip_count_cdf,
        }
    }

    pub fn kind(&self) -> AlgorithmKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Writes a fresh flip set into `out`.
    pub fn sample(&self, rng: &mut RandomStream, out: &mut FlipSet) {
        out.clear();
        match self.kind {
            AlgorithmKind::Rls => out.push(rng.index(self.n)),
            AlgorithmKind::Oea => {
                let k = self.sample_flip_count(rng);
                sample_distinct(self.n, k, rng, out);
            }
        }
    }

    fn sample_flip_count(&self, rng: &mut RandomStream) -> usize {
        let u = rng.unit();
        self.flip_count_cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.flip_count_cdf.len() - 1)
    }

    /// One iteration: sample, evaluate, accept iff `f(y) <= f(x)`.
    pub fn step(&self, state: &mut SearchState, rng: &mut RandomStream) -> StepOutcome {
        debug_assert_eq!(state.n(), self.n);
        let mut flips = FlipSet::new();
        self.sample(rng, &mut flips);
        step_with_flips(state, flips).expect("sampled flips are in range and loads fit in u64")
    }
}

fn binomial_cdf(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0, 1.0];
    }
    let nf = n as f64;
    let q = 1.0 - 1.0 / nf;
    let odds = (1.0 / nf) / q;
    let mut pmf = q.powf(nf);
    let mut cdf = Vec::new();
    let mut acc = 0.0;
    for k in 0..=n {
        acc += pmf;
        cdf.push(acc);
        if 1.0 - acc < 1e-17 {
            break;
        }
        pmf *= (nf - k as f64) / (k as f64 + 1.0) * odds;
    }
    *cdf.last_mut().unwrap() = 1.0;
    cdf
}

/// Uniform `k`-subset of `[0, n)`.
fn sample_distinct(n: usize, k: usize, rng: &mut RandomStream, out: &mut FlipSet) {
    if 4 * k <= n {
        while out.len() < k {
            let i = rng.index(n);
            if !out.contains(&i) {
                out.push(i);
            }
        }
    } else {
        let mut pool: Vec<usize> = (0..n).collect();
        for j in 0..k {
            let r = j + rng.index(n - j);
            pool.swap(j, r);
            out.push(pool[j]);
        }
    }
}

/// Reference mutation: every bit flips independently with probability `1/n`.
pub fn sample_mask_per_bit(n: usize, rng: &mut RandomStream) -> FlipSet {
    let p = 1.0 / n as f64;
    (0..n).filter(|_| rng.unit() < p).collect()
}

/// Evaluates the candidate obtained by toggling `flips` and moves to it iff
/// its makespan does not exceed the current one.
pub fn step_with_flips(state: &mut SearchState, flips: FlipSet) -> Result<StepOutcome> {
    let before = state.makespan();
    let (l1, l2) = state.loads_after_flips(&flips)?;
    let after = l1.max(l2);
    let accepted = after <= before;
    if accepted {
        state.apply_flips(&flips)?;
    }
    Ok(StepOutcome {
        flipped: flips,
        accepted,
        fitness_before: before,
        fitness_after_candidate: after,
    })
}

pub fn rls_step(state: &mut SearchState, rng: &mut RandomStream) -> StepOutcome {
    Mutator::new(AlgorithmKind::Rls, state.n()).step(state, rng)
}

pub fn oea_step(state: &mut SearchState, rng: &mut RandomStream) -> StepOutcome {
    Mutator::new(AlgorithmKind::Oea, state.n()).step(state, rng)
}

/// Runs exactly `iterations` steps on static sizes, calling
/// `observer(t, state, outcome)` after step `t` (1-based).
pub fn run_steps<F>(
    mut state: SearchState,
    algorithm: AlgorithmKind,
    iterations: u64,
    rng: &mut RandomStream,
    mut observer: F,
) -> SearchState
where
    F: FnMut(u64, &SearchState, &StepOutcome),
{
    let mutator = Mutator::new(algorithm, state.n());
    for t in 1..=iterations {
        let outcome = mutator.step(&mut state, rng);
        observer(t, &state, &outcome);
    }
    state
}
