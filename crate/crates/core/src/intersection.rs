//! p-exchange local search for matroid intersection and the epsilon
//! schedule that turns it into a PTAS.
//!
//! A move removes a set `S` of at most `p` elements and adds a set `T` of at
//! most `p - 1` outside elements; after every applied move the current set is
//! augmented back to a maximal common independent set. Move enumeration is
//! exponential in `p`, so `p` stays small (the CLI caps it at 4).

use serde::Serialize;

use crate::dispersion::dispersion;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::local_search::{strict_eps, Iteration, RunTrace};
use crate::matroid::IntersectionConstraint;

/// All exchange pairs `(S, T)` with `S` a subset of `members` of size at most
/// `p` and `T` a subset of the complement of size at most `p - 1`, in
/// deterministic order: sizes ascending, lexicographic within a size.
pub fn enumerate_exchange_sets(
    members: &[usize],
    ground_size: usize,
    p: usize,
) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
    let mut inside: Vec<usize> = members.to_vec();
    inside.sort_unstable();
    let outside: Vec<usize> = (0..ground_size)
        .filter(|x| !inside.contains(x))
        .collect();
    let removals = subsets_up_to(&inside, p);
    let additions = std::rc::Rc::new(subsets_up_to(&outside, p.saturating_sub(1)));
    removals.into_iter().flat_map(move |s| {
        let additions = std::rc::Rc::clone(&additions);
        (0..additions.len()).map(move |i| (s.clone(), additions[i].clone()))
    })
}

fn subsets_up_to(items: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for size in 1..=max_size.min(items.len()) {
        out.extend(items.iter().copied().combinations(size));
    }
    out
}

/// Convergence factor for the p-exchange search after `ell` iterations:
/// `(1 - 2/(p-1) - 24p/k)^2 - 2 (1 - 1/(60k))^(ell - k)`.
///
/// Returns `None` when the preconditions of the bound are unmet
/// (`8p <= k`, positive leading coefficient, `ell >= k`); callers surface
/// that as "guarantee inapplicable".
pub fn convergence_bound(p: usize, k_common: usize, ell: u64) -> Option<f64> {
    if p < 2 || k_common == 0 || 8 * p > k_common || ell < k_common as u64 {
        return None;
    }
    let k = k_common as f64;
    let beta = 1.0 - 2.0 / (p as f64 - 1.0) - 24.0 * p as f64 / k;
    if beta <= 0.0 {
        return None;
    }
    let steps = (ell - k_common as u64).min(i32::MAX as u64) as i32;
    let decay = (1.0 - 1.0 / (60.0 * k)).powi(steps);
    Some(beta * beta - 2.0 * decay)
}

/// Default iteration budget `k + ceil(60 k ln 6)`, enough to push the decay
/// term of the convergence factor below 1/3.
pub fn default_intersection_iterations(k_common: usize) -> u64 {
    let k = k_common as f64;
    k_common as u64 + (60.0 * k * 6f64.ln()).ceil() as u64
}

/// Runs at most `ell` p-exchange iterations starting from the greedy maximal
/// augmentation of the empty set. Returns the final common independent set.
pub fn intersection_local_search(
    d: &DistanceMatrix,
    c: &IntersectionConstraint,
    p: usize,
    ell: u64,
) -> Result<(Vec<usize>, RunTrace)> {
    if p < 2 {
        return Err(Error::invalid("exchange parameter p must be at least 2"));
    }
    if d.n() != c.ground_size() {
        return Err(Error::invalid(format!(
            "distance matrix has n = {} but constraint ground set is {}",
            d.n(),
            c.ground_size()
        )));
    }
    let evals0 = d.evals();
    let calls0 = c.oracle_calls();

    let mut current = c.augment_to_maximal(&[]);
    debug_assert!(current.len() * 2 >= c.k_common());
    let mut value = dispersion(d, &current);
    let mut trace = RunTrace {
        start_value: value,
        end_value: value,
        ..RunTrace::default()
    };
    if 8 * p > c.k_common() {
        trace.warnings.push(format!(
            "convergence guarantee inapplicable: 8p = {} exceeds k = {}",
            8 * p,
            c.k_common()
        ));
    }

    for _ in 0..ell {
        trace.scans += 1;
        let eps = strict_eps(value);
        let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
        for (s, t) in enumerate_exchange_sets(&current, c.ground_size(), p) {
            if s.is_empty() && t.is_empty() {
                continue;
            }
            let mut candidate: Vec<usize> = current
                .iter()
                .copied()
                .filter(|x| !s.contains(x))
                .chain(t.iter().copied())
                .collect();
            candidate.sort_unstable();
            if !c.is_common_independent(&candidate) {
                continue;
            }
            let cand_value = dispersion(d, &candidate);
            if cand_value <= value + eps {
                continue;
            }
            // First maximizer in enumeration order wins ties.
            if best.as_ref().is_none_or(|(bv, _, _)| cand_value > *bv) {
                best = Some((cand_value, s, t));
            }
        }
        match best {
            Some((_, s, t)) => {
                let exchanged: Vec<usize> = current
                    .iter()
                    .copied()
                    .filter(|x| !s.contains(x))
                    .chain(t.iter().copied())
                    .collect();
                current = c.augment_to_maximal(&exchanged);
                debug_assert!(c.is_common_independent(&current));
                debug_assert!(c.is_maximal(&current));
                value = dispersion(d, &current);
                trace.iterations.push(Iteration {
                    removed: s,
                    added: t,
                    value,
                });
                trace.end_value = value;
            }
            None => break, // no improving exchange; augmentation cannot fire either
        }
    }

    trace.distance_evals = d.evals() - evals0;
    trace.oracle_calls = c.oracle_calls() - calls0;
    Ok((current, trace))
}

/// How to attack an intersection instance for a target accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleMode {
    /// Few enough common independent sets: enumerate them all.
    Enumerate,
    /// Run the p-exchange search with the derived parameters.
    Search,
}

/// Parameters for a `(1 - epsilon)`-approximation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PtasSchedule {
    pub mode: ScheduleMode,
    /// `ceil(12 / epsilon) + 1`.
    pub p: usize,
    /// Smallest `ell >= k` with `2 (1 - 1/(60k))^(ell - k) <= epsilon / 3`.
    pub ell: u64,
}

/// Parameter schedule: enumerate when `k < (144/epsilon) (ceil(12/epsilon)+1)`,
/// otherwise search with the stated `p` and `ell`. Both parameters are
/// reported in either mode.
pub fn ptas_schedule(epsilon: f64, k_common: usize) -> Result<PtasSchedule> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let p = (12.0 / epsilon).ceil() as usize + 1;
    let threshold = (144.0 / epsilon) * p as f64;
    let mode = if (k_common as f64) < threshold {
        ScheduleMode::Enumerate
    } else {
        ScheduleMode::Search
    };
    let ell = if k_common == 0 {
        0
    } else {
        let k = k_common as f64;
        let ratio: f64 = 1.0 - 1.0 / (60.0 * k);
        let target = epsilon / 6.0; // 2 r^m <= eps/3  <=>  r^m <= eps/6
        let decay = |m: i64| ratio.powi(m.clamp(0, i32::MAX as i64) as i32);
        let mut m = (target.ln() / ratio.ln()).ceil().max(0.0) as i64;
        while m > 0 && decay(m - 1) <= target {
            m -= 1;
        }
        while decay(m) > target {
            m += 1;
        }
        k_common as u64 + m as u64
    };
    Ok(PtasSchedule { mode, p, ell })
}
