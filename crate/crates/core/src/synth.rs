//! Random instance generation for the verification suites, the bench
//! harness, and tests. All randomness is confined to instance generation;
//! the search algorithms themselves are deterministic.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distance::{DistanceMatrix, Kernel, PointSet};
use crate::matroid::Matroid;
use crate::submodular::SubmodularFn;

/// Independent per-trial stream derived from a master seed.
pub fn trial_rng(seed: u64, suite: u64, trial: u64) -> ChaCha8Rng {
    // splitmix64 over the combined words keeps streams uncorrelated.
    let mut z = seed
        .wrapping_add(suite.wrapping_mul(0x9e3779b97f4a7c15))
        .wrapping_add(trial.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// A generated point instance, serializable for failure replay.
#[derive(Debug, Clone, Serialize)]
pub struct SynthInstance {
    pub kernel: String,
    pub points: Vec<Vec<f64>>,
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Random points plus a random kernel; coordinates in `[0, 1)` suit every
/// kernel (nonnegative for Jaccard, almost surely nonzero for cosine).
pub fn random_kernel_instance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    max_dim: usize,
) -> (SynthInstance, DistanceMatrix) {
    let n = rng.random_range(2..=max_n.max(2));
    random_kernel_instance_of_size(rng, n, max_dim)
}

/// Same, with the element count fixed by the caller.
pub fn random_kernel_instance_of_size(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_dim: usize,
) -> (SynthInstance, DistanceMatrix) {
    let dim = rng.random_range(1..=max_dim.max(1));
    let kernel = Kernel::ALL[rng.random_range(0..Kernel::ALL.len())];
    loop {
        let points = random_points(rng, n, dim);
        let ps = PointSet::from_coords(points.clone()).expect("generated points are valid");
        match DistanceMatrix::from_points(&ps, kernel) {
            Ok(d) => {
                return (
                    SynthInstance {
                        kernel: kernel.name().to_string(),
                        points,
                    },
                    d,
                )
            }
            // A cosine zero vector has probability zero; regenerate.
            Err(_) => continue,
        }
    }
}

/// Nonempty subset of `0..n`.
pub fn random_nonempty_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Subset of `0..n` of exactly `k` elements.
pub fn random_subset_of_size(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut s: Vec<usize> = all.into_iter().take(k).collect();
    s.sort_unstable();
    s
}

/// Random partition matroid on `0..n` with rank exactly `k`.
pub fn random_partition_matroid(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Matroid {
    assert!(k >= 1 && k <= n);
    let blocks = rng.random_range(1..=k);
    let mut elems: Vec<usize> = (0..n).collect();
    elems.shuffle(rng);
    // Cut points give `blocks` nonempty blocks.
    let mut block_of = vec![0usize; n];
    let mut sizes = vec![0usize; blocks];
    for (i, &x) in elems.iter().enumerate() {
        let b = if i < blocks {
            i
        } else {
            rng.random_range(0..blocks)
        };
        block_of[x] = b;
        sizes[b] += 1;
    }
    // Every block starts at capacity 1 (rank = blocks); raise random
    // capacities until the rank reaches k. Achievable because the block
    // sizes sum to n >= k.
    let mut caps = vec![1usize; blocks];
    let mut rank: usize = caps
        .iter()
        .zip(&sizes)
        .map(|(c, s)| *c.min(s))
        .sum();
    while rank < k {
        let b = rng.random_range(0..blocks);
        if caps[b] < sizes[b] {
            caps[b] += 1;
            rank += 1;
        }
    }
    Matroid::partition(block_of, caps).expect("generated partition is valid")
}

/// Random uniform-or-partition matroid of rank `k`.
pub fn random_matroid(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Matroid {
    if rng.random::<bool>() {
        Matroid::uniform(n, k)
    } else {
        random_partition_matroid(rng, n, k)
    }
}

/// Random monotone normalized submodular function materialized as an
/// explicit table: a nonnegative mix of coverage types and a linear part.
pub fn random_explicit_submodular(rng: &mut ChaCha8Rng, n: usize) -> SubmodularFn {
    let num_types = rng.random_range(1..=n.max(1));
    let mut types: Vec<Vec<usize>> = Vec::with_capacity(num_types);
    for _ in 0..num_types {
        types.push(random_nonempty_subset(rng, n));
    }
    let type_weights: Vec<f64> = (0..num_types).map(|_| rng.random::<f64>()).collect();
    let linear: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 0.5).collect();

    let mut table = vec![0.0; 1 << n];
    for (mask, entry) in table.iter_mut().enumerate() {
        let set: Vec<usize> = (0..n).filter(|&x| mask & (1 << x) != 0).collect();
        let cov: f64 = types
            .iter()
            .zip(&type_weights)
            .filter(|(t, _)| t.iter().any(|x| set.contains(x)))
            .map(|(_, w)| *w)
            .sum();
        let lin: f64 = set.iter().map(|&x| linear[x]).sum();
        *entry = cov + lin;
    }
    SubmodularFn::explicit(n, table).expect("coverage plus linear is submodular")
}
