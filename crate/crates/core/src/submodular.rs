//! Monotone normalized submodular objectives, curvature, the linear-plus-
//! residual decomposition, and non-oblivious local search for `g = d + f`.

use std::fmt;
use std::str::FromStr;

use crate::dispersion::{dispersion, SearchState};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::local_search::{strict_eps, Iteration, RunTrace};
use crate::matroid::Matroid;

const EXPLICIT_MAX_N: usize = 20;
const VERIFY_MAX_N: usize = 12;

#[derive(Debug, Clone)]
enum Kind {
    Linear(Vec<f64>),
    Coverage {
        types: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
    /// Value table over all subsets, indexed by bitmask.
    Explicit(Vec<f64>),
    /// `base - linear`, used for decomposition residuals.
    Residual {
        base: Box<SubmodularFn>,
        linear: Vec<f64>,
    },
}

/// Value oracle for a monotone normalized submodular function.
#[derive(Debug, Clone)]
pub struct SubmodularFn {
    n: usize,
    kind: Kind,
}

impl SubmodularFn {
    /// The zero function.
    pub fn zero(n: usize) -> SubmodularFn {
        SubmodularFn {
            n,
            kind: Kind::Linear(vec![0.0; n]),
        }
    }

    /// Linear function with nonnegative per-element weights.
    pub fn linear(weights: Vec<f64>) -> Result<SubmodularFn> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(
                "linear weights must be finite and nonnegative",
            ));
        }
        Ok(SubmodularFn {
            n: weights.len(),
            kind: Kind::Linear(weights),
        })
    }

    /// Weighted coverage function over type sets `T_1, ..., T_p`.
    pub fn coverage(
        n: usize,
        types: Vec<Vec<usize>>,
        weights: Option<Vec<f64>>,
    ) -> Result<SubmodularFn> {
        for (i, t) in types.iter().enumerate() {
            if let Some(&x) = t.iter().find(|&&x| x >= n) {
                return Err(Error::invalid(format!(
                    "type {i} references element {x} outside ground set of size {n}"
                )));
            }
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; types.len()]);
        if weights.len() != types.len() {
            return Err(Error::invalid(format!(
                "{} type weights for {} types",
                weights.len(),
                types.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(
                "type weights must be finite and nonnegative",
            ));
        }
        Ok(SubmodularFn {
            n,
            kind: Kind::Coverage { types, weights },
        })
    }

    /// Explicit value table over all `2^n` subsets (small `n` only).
    /// Construction verifies normalization, monotonicity, and submodularity
    /// exhaustively.
    pub fn explicit(n: usize, table: Vec<f64>) -> Result<SubmodularFn> {
        if n > EXPLICIT_MAX_N {
            return Err(Error::invalid(format!(
                "explicit submodular functions support n <= {EXPLICIT_MAX_N}"
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::invalid(format!(
                "expected {} table entries for n = {n}, found {}",
                1usize << n,
                table.len()
            )));
        }
        if table.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("table values must be finite and nonnegative"));
        }
        if table[0] != 0.0 {
            return Err(Error::invalid("f(empty) must be 0 (normalized)"));
        }
        let scale = table.iter().cloned().fold(1.0, f64::max);
        let slack = 1e-12 * scale;
        for mask in 0..(1usize << n) {
            for x in 0..n {
                if mask & (1 << x) != 0 {
                    continue;
                }
                let with_x = mask | (1 << x);
                if table[with_x] < table[mask] - slack {
                    return Err(Error::invalid(format!(
                        "not monotone: f({with_x:b}) < f({mask:b})"
                    )));
                }
                // Pairwise local condition, equivalent to submodularity.
                for y in (x + 1)..n {
                    if mask & (1 << y) != 0 {
                        continue;
                    }
                    let with_y = mask | (1 << y);
                    let with_xy = with_x | (1 << y);
                    if table[with_x] + table[with_y] + slack < table[with_xy] + table[mask] {
                        return Err(Error::invalid(format!(
                            "not submodular at A = {mask:b}, x = {x}, y = {y}"
                        )));
                    }
                }
            }
        }
        Ok(SubmodularFn {
            n,
            kind: Kind::Explicit(table),
        })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, Kind::Linear(_))
    }

    /// f(A) for a set of element indices.
    pub fn value(&self, set: &[usize]) -> f64 {
        match &self.kind {
            Kind::Linear(w) => set.iter().map(|&x| w[x]).sum(),
            Kind::Coverage { types, weights } => types
                .iter()
                .zip(weights)
                .filter(|(t, _)| t.iter().any(|x| set.contains(x)))
                .map(|(_, w)| *w)
                .sum(),
            Kind::Explicit(table) => {
                let mask: usize = set.iter().fold(0, |m, &x| m | (1 << x));
                table[mask]
            }
            Kind::Residual { base, linear } => {
                base.value(set) - set.iter().map(|&x| linear[x]).sum::<f64>()
            }
        }
    }

    fn ground_set(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Linear(_) => "linear".to_string(),
            Kind::Coverage { types, .. } => format!("coverage(types={})", types.len()),
            Kind::Explicit(_) => "explicit".to_string(),
            Kind::Residual { .. } => "residual".to_string(),
        }
    }
}

/// Curvature `c = 1 - min_x (f(X) - f(X - x)) / f({x})` in `[0, 1]`.
///
/// Elements with `f({x}) = 0` are skipped; if every singleton has value 0
/// the curvature is defined as 0. Linear functions report exactly 0.
pub fn curvature(f: &SubmodularFn) -> f64 {
    if f.is_linear() {
        return 0.0;
    }
    let full = f.ground_set();
    let f_full = f.value(&full);
    let mut min_ratio = f64::INFINITY;
    for x in 0..f.ground_size() {
        let singleton = f.value(&[x]);
        if singleton == 0.0 {
            continue;
        }
        let without: Vec<usize> = full.iter().copied().filter(|&y| y != x).collect();
        let ratio = (f_full - f.value(&without)) / singleton;
        min_ratio = min_ratio.min(ratio);
    }
    if min_ratio.is_infinite() {
        return 0.0;
    }
    (1.0 - min_ratio).clamp(0.0, 1.0)
}

/// The decomposition `f = l + f'` with
/// `l(A) = sum over a in A of (f(X) - f(X - a))`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub l_weights: Vec<f64>,
    pub f_prime: SubmodularFn,
}

impl Decomposition {
    pub fn l_value(&self, set: &[usize]) -> f64 {
        set.iter().map(|&x| self.l_weights[x]).sum()
    }
}

/// Splits `f` into its linear part and the residual `f' = f - l`.
///
/// On small ground sets (`n <= 12`) the residual is verified to be
/// monotone, submodular, normalized, and bounded by `c * f`; a violation
/// rejects `f` as not actually submodular.
pub fn decompose(f: &SubmodularFn) -> Result<Decomposition> {
    if let Kind::Linear(w) = &f.kind {
        return Ok(Decomposition {
            l_weights: w.clone(),
            f_prime: SubmodularFn::zero(f.ground_size()),
        });
    }
    let n = f.ground_size();
    let full = f.ground_set();
    let f_full = f.value(&full);
    let l_weights: Vec<f64> = (0..n)
        .map(|x| {
            let without: Vec<usize> = full.iter().copied().filter(|&y| y != x).collect();
            f_full - f.value(&without)
        })
        .collect();
    let f_prime = SubmodularFn {
        n,
        kind: Kind::Residual {
            base: Box::new(f.clone()),
            linear: l_weights.clone(),
        },
    };
    if n <= VERIFY_MAX_N {
        verify_decomposition(f, &l_weights, &f_prime)?;
    }
    Ok(Decomposition { l_weights, f_prime })
}

fn verify_decomposition(f: &SubmodularFn, l: &[f64], f_prime: &SubmodularFn) -> Result<()> {
    let n = f.ground_size();
    let c = curvature(f);
    let scale = f.value(&f.ground_set()).max(1.0);
    let tol = 1e-9 * scale;
    let set_of = |mask: usize| -> Vec<usize> { (0..n).filter(|&x| mask & (1 << x) != 0).collect() };
    let values: Vec<f64> = (0..(1usize << n))
        .map(|mask| f_prime.value(&set_of(mask)))
        .collect();
    if values[0].abs() > tol {
        return Err(Error::invalid("decomposition residual not normalized"));
    }
    for mask in 0..(1usize << n) {
        let set = set_of(mask);
        if values[mask] > c * f.value(&set) + tol {
            return Err(Error::invalid(format!(
                "residual exceeds curvature bound at {mask:b}"
            )));
        }
        for x in 0..n {
            if mask & (1 << x) != 0 {
                continue;
            }
            let with_x = mask | (1 << x);
            if values[with_x] < values[mask] - tol {
                return Err(Error::invalid(format!(
                    "decomposition residual not monotone at {mask:b} + {x}; \
                     input is not submodular"
                )));
            }
            for y in (x + 1)..n {
                if mask & (1 << y) != 0 {
                    continue;
                }
                let with_y = mask | (1 << y);
                let with_xy = with_x | (1 << y);
                if values[with_x] + values[with_y] + tol < values[with_xy] + values[mask] {
                    return Err(Error::invalid(format!(
                        "decomposition residual not submodular at {mask:b}"
                    )));
                }
            }
        }
    }
    let _ = l;
    Ok(())
}

/// Potential guiding the combined search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialMode {
    /// `G = d + f`: the true objective.
    Oblivious,
    /// `G = (1 - 2/k) d + l`, exact for curvature-0 (linear) `f`.
    LinearExact,
}

impl fmt::Display for PotentialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PotentialMode::Oblivious => "oblivious",
            PotentialMode::LinearExact => "linear-exact",
        })
    }
}

impl FromStr for PotentialMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oblivious" => Ok(PotentialMode::Oblivious),
            "linear-exact" | "linear_exact" => Ok(PotentialMode::LinearExact),
            other => Err(Error::invalid(format!(
                "unknown potential '{other}' (expected oblivious|linear-exact)"
            ))),
        }
    }
}

/// Best-improvement swap search over bases of `m` maximizing the potential
/// `G(A) = dispersion_coef * d(A) + extra(A)`.
///
/// This is the pluggable-potential hook: `extra` may be any set function
/// (a linear part, a submodular value oracle, or an externally supplied
/// surrogate potential).
pub fn potential_local_search<F>(
    d: &DistanceMatrix,
    m: &Matroid,
    ell: u64,
    dispersion_coef: f64,
    extra: F,
) -> (Vec<usize>, RunTrace)
where
    F: Fn(&[usize]) -> f64,
{
    let evals0 = d.evals();
    let calls0 = m.calls();
    let start = crate::local_search::initial_basis(m);
    let mut state = SearchState::new(d, start);
    let mut potential = dispersion_coef * state.dispersion() + extra(state.members());
    let mut trace = RunTrace {
        start_value: potential,
        end_value: potential,
        ..RunTrace::default()
    };

    let n = d.n();
    let mut probe: Vec<usize> = Vec::with_capacity(state.len());
    for _ in 0..ell {
        trace.scans += 1;
        let eps = strict_eps(potential);
        let mut best: Option<(f64, usize, usize)> = None;
        for b in 0..n {
            if state.contains(b) {
                continue;
            }
            let col_b = state.column_sum(d, b);
            for &a in state.members() {
                probe.clear();
                probe.extend(state.members().iter().copied().filter(|&x| x != a));
                probe.push(b);
                if !m.is_independent(&probe) {
                    continue;
                }
                let cand =
                    dispersion_coef * state.swap_value_with_column(d, a, b, col_b) + extra(&probe);
                if cand <= potential + eps {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bv, ba, bb)) => cand > bv || (cand == bv && (a, b) < (ba, bb)),
                };
                if better {
                    best = Some((cand, a, b));
                }
            }
        }
        match best {
            Some((value, a, b)) => {
                state.apply_swap(d, a, b);
                debug_assert!(m.is_basis(state.members()));
                potential = value;
                trace.iterations.push(Iteration {
                    removed: vec![a],
                    added: vec![b],
                    value,
                });
                trace.end_value = value;
            }
            None => break,
        }
    }

    trace.distance_evals = d.evals() - evals0;
    trace.oracle_calls = m.calls() - calls0;
    (state.members().to_vec(), trace)
}

/// Non-oblivious local search for `g = d + f` subject to a matroid.
///
/// `LinearExact` requires curvature 0 and guides the search with
/// `G = (1 - 2/k) d + l`; at a local optimum
/// `g(A) >= (1 - lambda_d * 4/k) g(OPT)`. `Oblivious` maximizes `g`
/// directly and certifies nothing.
pub fn combined_local_search(
    d: &DistanceMatrix,
    m: &Matroid,
    f: &SubmodularFn,
    mode: PotentialMode,
    ell: u64,
) -> Result<(Vec<usize>, RunTrace)> {
    if f.ground_size() != d.n() || m.ground_size() != d.n() {
        return Err(Error::invalid(format!(
            "ground-set sizes differ: matrix {}, matroid {}, objective {}",
            d.n(),
            m.ground_size(),
            f.ground_size()
        )));
    }
    match mode {
        PotentialMode::Oblivious => {
            Ok(potential_local_search(d, m, ell, 1.0, |set| f.value(set)))
        }
        PotentialMode::LinearExact => {
            let c = curvature(f);
            if c != 0.0 {
                return Err(Error::invalid(format!(
                    "linear-exact potential requires curvature 0, got {c}; \
                     use the oblivious mode for general submodular objectives"
                )));
            }
            let weights = decompose(f)?.l_weights;
            let k = m.rank();
            let coef = if k == 0 { 1.0 } else { 1.0 - 2.0 / k as f64 };
            Ok(potential_local_search(d, m, ell, coef, move |set| {
                set.iter().map(|&x| weights[x]).sum()
            }))
        }
    }
}

/// Exact combined-guarantee factor `1 - lambda_d 4/k - lambda_f c/e`.
pub fn combined_bound_exact(lambda_d: f64, lambda_f: f64, c: f64, k: usize) -> f64 {
    1.0 - lambda_d * 4.0 / k as f64 - lambda_f * c / std::f64::consts::E
}

/// Instance-independent floor `1 - max(4/k, c/e)`.
pub fn combined_bound_floor(c: f64, k: usize) -> f64 {
    1.0 - (4.0 / k as f64).max(c / std::f64::consts::E)
}

/// d, f, and g = d + f for a chosen set.
pub fn combined_objective(
    d: &DistanceMatrix,
    f: &SubmodularFn,
    set: &[usize],
) -> (f64, f64, f64) {
    let dv = dispersion(d, set);
    let fv = f.value(set);
    (dv, fv, dv + fv)
}
