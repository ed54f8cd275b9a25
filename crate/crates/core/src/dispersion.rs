//! Dispersion values, cross sums, and constant-time swap evaluation.
//!
//! `SearchState` caches the dispersion of the current set together with the
//! row sums `d(a, A)`, which makes evaluating a single swap
//! `d(A - a + b) = d(A) + d(A, b) - d(a, b) - d(a, A)` an `O(k)` operation.

use crate::distance::DistanceMatrix;

/// Sum of distances over unordered pairs within `a`.
pub fn dispersion(d: &DistanceMatrix, a: &[usize]) -> f64 {
    let mut acc = 0.0;
    for (i, &x) in a.iter().enumerate() {
        for &y in &a[i + 1..] {
            acc += d.get(x, y);
        }
    }
    acc
}

/// Full ordered sum `d(A, B) = sum over a in A, b in B of d(a, b)`.
/// Satisfies `d(A, A) = 2 d(A)`.
pub fn cross_sum(d: &DistanceMatrix, a: &[usize], b: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &x in a {
        for &y in b {
            acc += d.get(x, y);
        }
    }
    acc
}

/// Current set with cached dispersion and row sums.
///
/// Row-sum caches are rebuilt from scratch every `10 k` swaps to keep
/// floating-point drift below test tolerances.
#[derive(Debug, Clone)]
pub struct SearchState {
    members: Vec<usize>,
    in_set: Vec<bool>,
    disp: f64,
    /// `row[i] = d(members[i], A)`, parallel to `members`.
    row: Vec<f64>,
    swaps_since_rebuild: usize,
}

impl SearchState {
    pub fn new(d: &DistanceMatrix, members: Vec<usize>) -> SearchState {
        let mut members = members;
        members.sort_unstable();
        let mut state = SearchState {
            members,
            in_set: vec![false; d.n()],
            disp: 0.0,
            row: Vec::new(),
            swaps_since_rebuild: 0,
        };
        state.rebuild(d);
        state
    }

    fn rebuild(&mut self, d: &DistanceMatrix) {
        self.in_set.iter_mut().for_each(|b| *b = false);
        for &x in &self.members {
            self.in_set[x] = true;
        }
        let k = self.members.len();
        self.row = vec![0.0; k];
        for i in 0..k {
            let mut acc = 0.0;
            for j in 0..k {
                if i != j {
                    acc += d.get(self.members[i], self.members[j]);
                }
            }
            self.row[i] = acc;
        }
        self.disp = self.row.iter().sum::<f64>() / 2.0;
        self.swaps_since_rebuild = 0;
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_set[x]
    }

    /// Cached `d(A)`.
    pub fn dispersion(&self) -> f64 {
        self.disp
    }

    /// Cached `d(a, A)` for a member `a`.
    pub fn row_sum(&self, a: usize) -> f64 {
        let i = self.member_index(a);
        self.row[i]
    }

    fn member_index(&self, a: usize) -> usize {
        self.members
            .binary_search(&a)
            .expect("element not in the current set")
    }

    /// `d(A, b)` computed fresh; `k` distance evaluations.
    pub fn column_sum(&self, d: &DistanceMatrix, b: usize) -> f64 {
        self.members.iter().map(|&x| d.get(x, b)).sum()
    }

    /// `d(A - a + b)` via the swap identity, using the cached row sums plus
    /// one fresh column sum. `a = b` is allowed and returns `d(A)`.
    pub fn swap_value(&self, d: &DistanceMatrix, a: usize, b: usize) -> f64 {
        debug_assert!(self.contains(a), "swap source must be in the set");
        debug_assert!(
            a == b || !self.contains(b),
            "swap target must lie outside A - a"
        );
        if a == b {
            return self.disp;
        }
        let col_b = self.column_sum(d, b);
        self.swap_value_with_column(d, a, b, col_b)
    }

    /// Same as [`swap_value`](Self::swap_value) with `d(A, b)` already known;
    /// one distance evaluation.
    pub fn swap_value_with_column(&self, d: &DistanceMatrix, a: usize, b: usize, col_b: f64) -> f64 {
        if a == b {
            return self.disp;
        }
        self.disp + col_b - d.get(a, b) - self.row_sum(a)
    }

    /// Replaces `a` by `b`, updating the caches in `O(k)` distance
    /// evaluations.
    pub fn apply_swap(&mut self, d: &DistanceMatrix, a: usize, b: usize) {
        debug_assert!(self.contains(a));
        if a == b {
            return;
        }
        debug_assert!(!self.contains(b));
        let i = self.member_index(a);
        let row_a = self.row[i];
        self.members.remove(i);
        self.row.remove(i);
        self.in_set[a] = false;

        // d(A - a, b); with row_a = d(a, A) this gives
        // d(A - a + b) = d(A) + d(A, b) - d(a, b) - d(a, A) = d(A) + col_b - row_a.
        let mut col_b = 0.0;
        for (j, &y) in self.members.iter().enumerate() {
            let dya = d.get(y, a);
            let dyb = d.get(y, b);
            self.row[j] += dyb - dya;
            col_b += dyb;
        }
        let pos = self.members.partition_point(|&y| y < b);
        self.members.insert(pos, b);
        self.row.insert(pos, col_b);
        self.in_set[b] = true;
        self.disp += col_b - row_a;

        self.swaps_since_rebuild += 1;
        let k = self.members.len().max(1);
        if self.swaps_since_rebuild >= 10 * k {
            self.rebuild(d);
        }
    }
}
