//! Scaling harness for the cost model: distance evaluations per iteration
//! should grow linearly in `n` at fixed rank.

use std::time::Instant;

use crate::distance::{DistanceMatrix, Kernel, PointSet};
use crate::error::Result;
use crate::local_search::{default_iterations, local_search};
use crate::matroid::Matroid;
use crate::synth::{random_points, trial_rng};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub ell: u64,
    pub distance_evals: u64,
    pub oracle_calls: u64,
    pub millis: u64,
    /// Applied swaps.
    pub iterations: u64,
    /// Candidate-scan passes; `distance_evals / scans` is the per-iteration
    /// cost the model bounds.
    pub scans: u64,
}

impl BenchRow {
    pub fn evals_per_scan(&self) -> f64 {
        self.distance_evals as f64 / self.scans.max(1) as f64
    }
}

/// One full local-search run per size: synthetic points, uniform matroid of
/// rank `k`, `ell = default_iterations(k)`. Counters cover only the search,
/// not matrix construction.
pub fn scaling_run(sizes: &[usize], k: usize, kernel: Kernel, seed: u64) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let mut rng = trial_rng(seed, 100, i as u64);
        let points = PointSet::from_coords(random_points(&mut rng, n, 3))?;
        let d = DistanceMatrix::from_points(&points, kernel)?;
        let m = Matroid::uniform(n, k);
        let ell = default_iterations(k);
        d.reset_evals();
        m.reset_calls();
        let start = Instant::now();
        let (_, trace) = local_search(&d, &m, ell);
        let millis = start.elapsed().as_millis() as u64;
        rows.push(BenchRow {
            n,
            k,
            ell,
            distance_evals: trace.distance_evals,
            oracle_calls: trace.oracle_calls,
            millis,
            iterations: trace.iterations.len() as u64,
            scans: trace.scans,
        });
    }
    Ok(rows)
}

/// Comma-separated table: `n,k,ell,distance_evals,oracle_calls,millis`.
pub fn csv_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,k,ell,distance_evals,oracle_calls,millis\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.k, r.ell, r.distance_evals, r.oracle_calls, r.millis
        ));
    }
    out
}
