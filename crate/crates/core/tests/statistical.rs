//! Distributional checks of the samplers against independent closed forms.

use std::collections::HashMap;

use dynsched::dynamics::{burn_in, stationary_pmf, stationary_vector};
use dynsched::harness::{init_assignment, InitMode};
use dynsched::oracle::{stationary_by_power_iteration, tv_distance};
use dynsched::search::{sample_mask_per_bit, FlipSet};
use dynsched::{AlgorithmKind, Instance, Mutator, RandomStream};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

const ALPHA: f64 = 0.001;

/// Pearson chi-square p-value; cells with expectation below 5 must be pooled by the caller.
fn chi_square_p(observed: &[f64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    assert!(expected.iter().all(|&e| e >= 5.0));
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

#[test]
fn oea_flip_count_is_binomial() {
    let draws = 1_000_000;
    for n in [2usize, 10, 50, 1000] {
        let m = Mutator::new(AlgorithmKind::Oea, n);
        let mut rng = RandomStream::new(n as u64);
        let mut out = FlipSet::new();
        let mut counts = vec![0f64; n + 1];
        for _ in 0..draws {
            m.sample(&mut rng, &mut out);
            counts[out.len()] += 1.0;
        }
        let law = Binomial::new(1.0 / n as f64, n as u64).unwrap();
        // pool the upper tail until every cell expects at least 5 draws
        let mut observed = Vec::new();
        let mut expected = Vec::new();
        let mut k = 0;
        while k <= n {
            let e = law.pmf(k as u64) * draws as f64;
            let tail: f64 = (k..=n).map(|j| law.pmf(j as u64)).sum::<f64>() * draws as f64;
            if e < 5.0 || tail - e < 5.0 {
                observed.push(counts[k..].iter().sum());
                expected.push(tail);
                break;
            }
            observed.push(counts[k]);
            expected.push(e);
            k += 1;
        }
        let p = chi_square_p(&observed, &expected);
        assert!(p > ALPHA, "n = {n}: p = {p}");
    }
}

#[test]
fn rls_index_is_uniform() {
    let n = 37;
    let draws = 1_000_000;
    let m = Mutator::new(AlgorithmKind::Rls, n);
    let mut rng = RandomStream::new(77);
    let mut out = FlipSet::new();
    let mut counts = vec![0f64; n];
    for _ in 0..draws {
        m.sample(&mut rng, &mut out);
        assert_eq!(out.len(), 1);
        counts[out[0]] += 1.0;
    }
    let p = chi_square_p(&counts, &vec![draws as f64 / n as f64; n]);
    assert!(p > ALPHA, "p = {p}");
}

fn mask_of(flips: &[usize]) -> u32 {
    flips.iter().fold(0, |m, &i| m | 1 << i)
}

#[test]
fn sparse_mutation_matches_per_bit_mutation() {
    let draws = 1_000_000;
    for n in 1..=8usize {
        let m = Mutator::new(AlgorithmKind::Oea, n);
        let mut a = RandomStream::new(100 + n as u64);
        let mut b = RandomStream::new(200 + n as u64);
        let mut out = FlipSet::new();
        let mut sparse = vec![0f64; 1 << n];
        let mut naive = vec![0f64; 1 << n];
        for _ in 0..draws {
            m.sample(&mut a, &mut out);
            sparse[mask_of(&out) as usize] += 1.0;
            naive[mask_of(&sample_mask_per_bit(n, &mut b)) as usize] += 1.0;
        }
        let norm = |v: Vec<f64>| v.into_iter().map(|c| c / draws as f64).collect::<Vec<_>>();
        let tv = tv_distance(&norm(sparse), &norm(naive)).unwrap();
        assert!(tv <= 0.01, "n = {n}: tv = {tv}");
    }
}

#[test]
fn sparse_masks_have_exact_law() {
    // Against the exact per-bit law p^|m| (1-p)^(n-|m|), not another sampler.
    let n = 6;
    let draws = 1_000_000;
    let m = Mutator::new(AlgorithmKind::Oea, n);
    let mut rng = RandomStream::new(9);
    let mut out = FlipSet::new();
    let mut counts: HashMap<u32, f64> = HashMap::new();
    for _ in 0..draws {
        m.sample(&mut rng, &mut out);
        *counts.entry(mask_of(&out)).or_default() += 1.0;
    }
    let p = 1.0 / n as f64;
    let exact: Vec<f64> = (0..1u32 << n)
        .map(|mask| {
            let k = mask.count_ones() as i32;
            p.powi(k) * (1.0 - p).powi(n as i32 - k)
        })
        .collect();
    let empirical: Vec<f64> = (0..1u32 << n)
        .map(|mask| counts.get(&mask).copied().unwrap_or(0.0) / draws as f64)
        .collect();
    assert!(tv_distance(&empirical, &exact).unwrap() <= 0.01);
}

#[test]
fn uniform_init_bits_are_fair() {
    let n = 10;
    let reps = 100_000;
    let mut rng = RandomStream::new(31);
    let mut ones = vec![0f64; n];
    for _ in 0..reps {
        let a = init_assignment(n, InitMode::UniformRandom, None, &mut rng).unwrap();
        for (i, &b) in a.bits().iter().enumerate() {
            ones[i] += f64::from(u8::from(b));
        }
    }
    let half = reps as f64 / 2.0;
    let mut observed = Vec::new();
    for &o in &ones {
        observed.push(o);
        observed.push(reps as f64 - o);
    }
    let p = chi_square_p(&observed, &vec![half; 2 * n]);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn burn_in_reaches_stationarity() {
    let n = 16u64;
    let burn = 4 * n * n;
    let mut rng = RandomStream::new(1);
    let mut counts = vec![0f64; n as usize];
    let instances = 100_000 / n as usize;
    for _ in 0..instances {
        let sizes = (0..n).map(|_| rng.range_inclusive(1, n)).collect();
        let inst = burn_in(&Instance::random_model(sizes).unwrap(), burn, &mut rng).unwrap();
        for &p in inst.sizes() {
            counts[p as usize - 1] += 1.0;
        }
    }
    let total: f64 = counts.iter().sum();
    assert_eq!(total, 100_000.0);
    let empirical: Vec<f64> = counts.iter().map(|c| c / total).collect();
    let tv = tv_distance(&empirical, &stationary_vector(n)).unwrap();
    assert!(tv <= 0.05, "tv = {tv}");
}

#[test]
fn exact_chain_fixed_point_matches_closed_form() {
    for n in 2..=64usize {
        let (pi, iters) = stationary_by_power_iteration(n, 1e-14, 10_000_000);
        assert!(iters < 10_000_000, "n = {n} did not converge");
        for (j, &p) in pi.iter().enumerate() {
            let err = (p - stationary_pmf(n as u64, j as u64 + 1)).abs();
            assert!(err <= 1e-9, "n = {n}, j = {}: err = {err}", j + 1);
        }
    }
}
