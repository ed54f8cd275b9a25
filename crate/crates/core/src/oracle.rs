//! Brute-force exact solvers for small instances. These are the ground
//! truth that every guarantee test compares against.

use itertools::Itertools;

use crate::dispersion::dispersion;
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::matroid::{IntersectionConstraint, Matroid};
use crate::submodular::SubmodularFn;

/// Candidate-set cap for every enumeration.
pub const ENUMERATION_GUARD: u64 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

fn check_guard(candidates: u128) -> Result<()> {
    if candidates > ENUMERATION_GUARD as u128 {
        return Err(Error::GuardExceeded {
            candidates,
            limit: ENUMERATION_GUARD,
        });
    }
    Ok(())
}

/// Exact maximizer of the dispersion over the bases of `m`. Ties go to the
/// lexicographically smallest basis.
pub fn brute_force_msd(d: &DistanceMatrix, m: &Matroid) -> Result<(Vec<usize>, f64)> {
    let n = d.n();
    if m.ground_size() != n {
        return Err(Error::invalid(format!(
            "distance matrix has n = {n} but matroid ground set is {}",
            m.ground_size()
        )));
    }
    let k = m.rank();
    check_guard(binomial(n, k))?;
    if k == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..n).combinations(k) {
        if !m.is_independent(&subset) {
            continue;
        }
        let value = dispersion(d, &subset);
        let better = match &best {
            None => true,
            Some((bv, _)) => value > *bv,
        };
        if better {
            best = Some((value, subset));
        }
    }
    let (value, set) =
        best.ok_or_else(|| Error::Internal("matroid has no basis of its own rank".into()))?;
    Ok((set, value))
}

/// Exact maximizer of the dispersion over all common independent sets.
/// Enumerates by depth-first extension, pruning via downward closure.
pub fn brute_force_intersection(
    d: &DistanceMatrix,
    c: &IntersectionConstraint,
) -> Result<(Vec<usize>, f64)> {
    let n = d.n();
    if c.ground_size() != n {
        return Err(Error::invalid(format!(
            "distance matrix has n = {n} but constraint ground set is {}",
            c.ground_size()
        )));
    }
    let mut best: (f64, Vec<usize>) = (0.0, Vec::new());
    let mut visited: u64 = 0;
    let mut stack: Vec<usize> = Vec::new();
    dfs(d, c, n, 0, &mut stack, &mut best, &mut visited)?;
    Ok((best.1, best.0))
}

fn dfs(
    d: &DistanceMatrix,
    c: &IntersectionConstraint,
    n: usize,
    next: usize,
    stack: &mut Vec<usize>,
    best: &mut (f64, Vec<usize>),
    visited: &mut u64,
) -> Result<()> {
    *visited += 1;
    if *visited > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded {
            candidates: u128::from(*visited),
            limit: ENUMERATION_GUARD,
        });
    }
    let value = dispersion(d, stack);
    if value > best.0 {
        *best = (value, stack.clone());
    }
    for x in next..n {
        stack.push(x);
        if c.is_common_independent(stack) {
            dfs(d, c, n, x + 1, stack, best, visited)?;
        }
        stack.pop();
    }
    Ok(())
}

/// Optimum of `g = d + f` over bases, together with the dispersion and
/// objective shares of the optimal value.
#[derive(Debug, Clone)]
pub struct CombinedOpt {
    pub set: Vec<usize>,
    pub g: f64,
    pub dispersion: f64,
    pub submodular: f64,
    /// `d(OPT) / g(OPT)`; 0 when the optimum value is 0.
    pub lambda_d: f64,
    /// `f(OPT) / g(OPT)`; complements `lambda_d` to 1.
    pub lambda_f: f64,
}

/// Exact maximizer of `g = d + f` over the bases of `m`.
pub fn brute_force_combined(
    d: &DistanceMatrix,
    m: &Matroid,
    f: &SubmodularFn,
) -> Result<CombinedOpt> {
    let n = d.n();
    if m.ground_size() != n || f.ground_size() != n {
        return Err(Error::invalid(format!(
            "ground-set sizes differ: matrix {n}, matroid {}, objective {}",
            m.ground_size(),
            f.ground_size()
        )));
    }
    let k = m.rank();
    check_guard(binomial(n, k))?;
    let mut best: Option<(f64, f64, f64, Vec<usize>)> = None;
    if k == 0 {
        best = Some((0.0, 0.0, 0.0, Vec::new()));
    }
    for subset in (0..n).combinations(k) {
        if k == 0 || !m.is_independent(&subset) {
            continue;
        }
        let dv = dispersion(d, &subset);
        let fv = f.value(&subset);
        let g = dv + fv;
        let better = match &best {
            None => true,
            Some((bg, ..)) => g > *bg,
        };
        if better {
            best = Some((g, dv, fv, subset));
        }
    }
    let (g, dv, fv, set) =
        best.ok_or_else(|| Error::Internal("matroid has no basis of its own rank".into()))?;
    let (lambda_d, lambda_f) = if g > 0.0 { (dv / g, fv / g) } else { (0.0, 1.0) };
    Ok(CombinedOpt {
        set,
        g,
        dispersion: dv,
        submodular: fv,
        lambda_d,
        lambda_f,
    })
}
