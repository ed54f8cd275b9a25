//! Pairwise distance matrices and the negative-type check.
//!
//! Distances are kept dense: the local search touches whole rows, and at
//! library scale an `n x n` block of `f64` fits comfortably in memory. Reads
//! through [`DistanceMatrix::get`] are counted so that runs can report the
//! number of distance evaluations under the unit-cost model.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A finite set of points in `R^q` with unique string identifiers.
#[derive(Debug, Clone)]
pub struct PointSet {
    ids: Vec<String>,
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointSet {
    pub fn new(ids: Vec<String>, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("point set must contain at least one point"));
        }
        if ids.len() != points.len() {
            return Err(Error::invalid(format!(
                "{} ids for {} points",
                ids.len(),
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::invalid("points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point '{}' has dimension {} but expected {}",
                    ids[i],
                    p.len(),
                    dim
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!(
                    "point '{}' has a non-finite coordinate",
                    ids[i]
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(format!("duplicate id '{id}'")));
            }
        }
        Ok(PointSet { ids, points, dim })
    }

    /// Points with synthetic ids `"0".."n-1"`.
    pub fn from_coords(points: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..points.len()).map(|i| i.to_string()).collect();
        Self::new(ids, points)
    }

    /// Parses the point CSV format: header `id,x1,...,xq`, one point per row.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty file, expected header `id,x1,...,xq`"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || !cols[0].eq_ignore_ascii_case("id") {
            return Err(Error::parse(1, "expected header `id,x1,...,xq`"));
        }
        let dim = cols.len() - 1;
        let mut ids = Vec::new();
        let mut points = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != dim + 1 {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} fields, found {}", dim + 1, fields.len()),
                ));
            }
            let mut coords = Vec::with_capacity(dim);
            for f in &fields[1..] {
                let v: f64 = f
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad coordinate '{f}'")))?;
                if !v.is_finite() {
                    return Err(Error::parse(lineno, format!("non-finite coordinate '{f}'")));
                }
                coords.push(v);
            }
            if !seen.insert(fields[0].to_string()) {
                return Err(Error::parse(lineno, format!("duplicate id '{}'", fields[0])));
            }
            ids.push(fields[0].to_string());
            points.push(coords);
        }
        if points.is_empty() {
            return Err(Error::parse(1, "no data rows after header"));
        }
        Self::new(ids, points).map_err(|e| match e {
            Error::InvalidInput(msg) => Error::parse(1, msg),
            other => other,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}

/// Distance kernels applied to point coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Euclidean,
    Manhattan,
    /// `1 - <x,y> / (|x| |y|)`; rejects zero vectors.
    Cosine,
    /// Weighted Jaccard on nonnegative coordinates:
    /// `1 - sum(min) / sum(max)`, with `0/0 := 0`.
    Jaccard,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [
        Kernel::Euclidean,
        Kernel::Manhattan,
        Kernel::Cosine,
        Kernel::Jaccard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Euclidean => "euclidean",
            Kernel::Manhattan => "manhattan",
            Kernel::Cosine => "cosine",
            Kernel::Jaccard => "jaccard",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Kernel::Euclidean),
            "manhattan" => Ok(Kernel::Manhattan),
            "cosine" => Ok(Kernel::Cosine),
            "jaccard" => Ok(Kernel::Jaccard),
            other => Err(Error::invalid(format!(
                "unknown kernel '{other}' (expected euclidean|manhattan|cosine|jaccard)"
            ))),
        }
    }
}

fn kernel_distance(kernel: Kernel, x: &[f64], y: &[f64]) -> f64 {
    match kernel {
        Kernel::Euclidean => x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt(),
        Kernel::Manhattan => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        Kernel::Cosine => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
            1.0 - dot / (nx * ny)
        }
        Kernel::Jaccard => {
            let min_sum: f64 = x.iter().zip(y).map(|(a, b)| a.min(*b)).sum();
            let max_sum: f64 = x.iter().zip(y).map(|(a, b)| a.max(*b)).sum();
            if max_sum == 0.0 {
                1.0
            } else {
                1.0 - min_sum / max_sum
            }
        }
    }
}

/// Symmetric nonnegative pairwise distances with zero diagonal.
///
/// Every read through [`get`](Self::get) bumps an internal counter; the
/// search algorithms report it as `distance_evals`.
#[derive(Debug)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    evals: AtomicU64,
}

impl Clone for DistanceMatrix {
    fn clone(&self) -> Self {
        DistanceMatrix {
            n: self.n,
            entries: self.entries.clone(),
            evals: AtomicU64::new(0),
        }
    }
}

impl DistanceMatrix {
    /// Validates and wraps a dense row-major matrix.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("distance matrix must have n >= 1"));
        }
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for n = {n}, found {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::invalid(format!(
                    "diagonal entry ({i},{i}) is {} but must be 0",
                    entries[i * n + i]
                )));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!(
                        "entry ({i},{j}) is {v}; distances must be finite and nonnegative"
                    )));
                }
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::invalid(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            n,
            entries,
            evals: AtomicU64::new(0),
        })
    }

    /// Builds the matrix of pairwise kernel distances over a point set.
    pub fn from_points(points: &PointSet, kernel: Kernel) -> Result<Self> {
        let n = points.len();
        for i in 0..n {
            let p = points.coords(i);
            match kernel {
                Kernel::Cosine if p.iter().all(|&x| x == 0.0) => {
                    return Err(Error::invalid(format!(
                        "cosine distance undefined for zero vector (id '{}')",
                        points.ids()[i]
                    )));
                }
                Kernel::Jaccard if p.iter().any(|&x| x < 0.0) => {
                    return Err(Error::invalid(format!(
                        "jaccard distance requires nonnegative coordinates (id '{}')",
                        points.ids()[i]
                    )));
                }
                _ => {}
            }
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = kernel_distance(kernel, points.coords(i), points.coords(j));
                // Clamp tiny negative rounding (cosine of near-identical vectors).
                let d = if (-1e-9..0.0).contains(&d) { 0.0 } else { d };
                entries[i * n + j] = d;
                entries[j * n + i] = d;
            }
        }
        Self::from_entries(n, entries)
    }

    /// Parses the precomputed-matrix text format: first line `n`, then `n`
    /// whitespace-separated rows of `n` reals.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty file, expected element count n"))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, format!("bad element count '{}'", first.trim())))?;
        if n == 0 {
            return Err(Error::parse(1, "element count must be >= 1"));
        }
        let mut entries = Vec::with_capacity(n * n);
        let mut rows = 0usize;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if rows == n {
                return Err(Error::parse(lineno, format!("more than {n} data rows")));
            }
            let mut row = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad entry '{tok}'")))?;
                row.push(v);
            }
            if row.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {n} entries in row, found {}", row.len()),
                ));
            }
            entries.extend_from_slice(&row);
            rows += 1;
        }
        if rows != n {
            return Err(Error::parse(
                rows + 2,
                format!("expected {n} data rows, found {rows}"),
            ));
        }
        Self::from_entries(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between elements `a` and `b`, counted as one evaluation.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.entries[a * self.n + b]
    }

    pub fn evals(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_evals(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }
}

/// Outcome of the negative-type test.
#[derive(Debug, Clone)]
pub struct NegativeTypeCheck {
    pub holds: bool,
    /// Largest eigenvalue of the quadratic form restricted to the zero-sum
    /// subspace.
    pub max_eigenvalue: f64,
    /// A zero-sum vector `x` with `x^T D x > 0` when the test fails.
    pub witness: Option<Vec<f64>>,
}

/// Evaluates `x^T D x` directly (no counting).
pub fn quadratic_form(d: &DistanceMatrix, x: &[f64]) -> f64 {
    assert_eq!(x.len(), d.n());
    let n = d.n();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += x[i] * x[j] * d.entries[i * n + j];
        }
    }
    acc
}

/// Tests whether `x^T D x <= 0` for every `x` with `sum(x) = 0`, up to
/// `tol * max(1, max entry)`.
///
/// The all-ones direction is projected out and deflated, so the reported
/// eigenvalue is the maximum of the form over the zero-sum subspace.
pub fn verify_negative_type(d: &DistanceMatrix, tol: f64) -> NegativeTypeCheck {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    let n = d.n();
    if n <= 1 {
        // Only x = 0 sums to zero.
        return NegativeTypeCheck {
            holds: true,
            max_eigenvalue: 0.0,
            witness: None,
        };
    }
    let threshold = tol * d.max_entry().max(1.0);
    let shift = (d.max_entry() + 1.0) * n as f64;

    // M = P D P - shift * J/n with P = I - J/n. On the zero-sum subspace M
    // agrees with D; the all-ones direction gets eigenvalue -shift.
    let nf = n as f64;
    let mat = DMatrix::from_fn(n, n, |i, j| d.entries[i * n + j]);
    let row_mean: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| d.entries[i * n + j]).sum::<f64>() / nf)
        .collect();
    let total_mean = row_mean.iter().sum::<f64>() / nf;
    let mut proj = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let centered = mat[(i, j)] - row_mean[i] - row_mean[j] + total_mean;
            proj[(i, j)] = centered - shift / nf;
        }
    }
    // Symmetrize against rounding before the eigensolve.
    let proj = (&proj + proj.transpose()) * 0.5;

    let eigen = proj.clone().symmetric_eigen();
    let mut max_eig = f64::NEG_INFINITY;
    let mut max_idx = 0;
    for (i, ev) in eigen.eigenvalues.iter().enumerate() {
        if *ev > max_eig {
            max_eig = *ev;
            max_idx = i;
        }
    }

    if max_eig <= threshold {
        return NegativeTypeCheck {
            holds: true,
            max_eigenvalue: max_eig,
            witness: None,
        };
    }

    // Re-center the leading eigenvector so the witness sums to zero exactly
    // (up to rounding) and certify it against the raw quadratic form.
    let v = eigen.eigenvectors.column(max_idx);
    let mean = v.iter().sum::<f64>() / nf;
    let witness: Vec<f64> = v.iter().map(|x| x - mean).collect();
    NegativeTypeCheck {
        holds: false,
        max_eigenvalue: max_eig,
        witness: Some(witness),
    }
}
