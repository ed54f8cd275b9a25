//! Independence oracles, Brualdi bijections, and common independent sets.
//!
//! Oracles are black boxes over ground-set indices `0..n`. Calls through
//! [`Matroid::is_independent`] are counted: the oracle is the unit of cost
//! accounting for the search algorithms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Kind {
    Uniform {
        k: usize,
    },
    Partition {
        /// `block_of[x]` is the block index of element `x`.
        block_of: Vec<usize>,
        capacities: Vec<usize>,
    },
    /// Full family of independent sets as bitmasks (small ground sets only).
    Explicit {
        sets: BTreeSet<u64>,
        rank: usize,
    },
}

/// Independence oracle over ground set `0..ground_size`.
#[derive(Debug)]
pub struct Matroid {
    n: usize,
    kind: Kind,
    calls: AtomicU64,
}

impl Clone for Matroid {
    fn clone(&self) -> Self {
        Matroid {
            n: self.n,
            kind: self.kind.clone(),
            calls: AtomicU64::new(0),
        }
    }
}

fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |m, &x| m | (1u64 << x))
}

impl Matroid {
    /// Uniform matroid: independent iff `|A| <= k`.
    pub fn uniform(n: usize, k: usize) -> Matroid {
        Matroid {
            n,
            kind: Kind::Uniform { k },
            calls: AtomicU64::new(0),
        }
    }

    /// Partition matroid given the block index of every element.
    pub fn partition(block_of: Vec<usize>, capacities: Vec<usize>) -> Result<Matroid> {
        let n = block_of.len();
        if n == 0 {
            return Err(Error::invalid("partition matroid needs n >= 1"));
        }
        for (x, &b) in block_of.iter().enumerate() {
            if b >= capacities.len() {
                return Err(Error::invalid(format!(
                    "element {x} assigned to block {b} but only {} capacities given",
                    capacities.len()
                )));
            }
        }
        Ok(Matroid {
            n,
            kind: Kind::Partition {
                block_of,
                capacities,
            },
            calls: AtomicU64::new(0),
        })
    }

    /// Partition matroid from explicit blocks. Blocks must be disjoint and
    /// cover `0..n`.
    pub fn partition_from_blocks(
        n: usize,
        blocks: &[Vec<usize>],
        capacities: &[usize],
    ) -> Result<Matroid> {
        if blocks.len() != capacities.len() {
            return Err(Error::invalid(format!(
                "{} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= n {
                    return Err(Error::invalid(format!(
                        "block {b} references element {x} outside ground set of size {n}"
                    )));
                }
                if block_of[x] != usize::MAX {
                    return Err(Error::invalid(format!(
                        "element {x} appears in more than one block"
                    )));
                }
                block_of[x] = b;
            }
        }
        if let Some(x) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::invalid(format!(
                "element {x} is not covered by any block"
            )));
        }
        Self::partition(block_of, capacities.to_vec())
    }

    /// Explicit matroid from the complete family of independent sets.
    ///
    /// Construction verifies non-emptiness, downward closure, and the
    /// exchange axiom exhaustively.
    pub fn explicit<I>(n: usize, sets: I) -> Result<Matroid>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        if n > 63 {
            return Err(Error::invalid("explicit matroids support n <= 63"));
        }
        let mut family = BTreeSet::new();
        for s in sets {
            for &x in &s {
                if x >= n {
                    return Err(Error::invalid(format!(
                        "independent set references element {x} outside ground set of size {n}"
                    )));
                }
            }
            family.insert(mask_of(&s));
        }
        if family.is_empty() {
            return Err(Error::invalid("independent-set family must be non-empty"));
        }
        if !family.contains(&0) {
            return Err(Error::invalid("the empty set must be independent"));
        }
        // Downward closure.
        for &s in &family {
            let mut rest = s;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                if !family.contains(&(s & !bit)) {
                    return Err(Error::invalid(format!(
                        "family not downward closed: {:b} independent but {:b} missing",
                        s,
                        s & !bit
                    )));
                }
                rest &= !bit;
            }
        }
        // Exchange axiom.
        for &a in &family {
            for &b in &family {
                if (a.count_ones() as usize) <= (b.count_ones() as usize) {
                    continue;
                }
                let mut extend = a & !b;
                let mut ok = false;
                while extend != 0 {
                    let bit = extend & extend.wrapping_neg();
                    if family.contains(&(b | bit)) {
                        ok = true;
                        break;
                    }
                    extend &= !bit;
                }
                if !ok {
                    return Err(Error::invalid(format!(
                        "exchange axiom violated for sets {a:b} and {b:b}"
                    )));
                }
            }
        }
        let rank = family
            .iter()
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0);
        Ok(Matroid {
            n,
            kind: Kind::Explicit { sets: family, rank },
            calls: AtomicU64::new(0),
        })
    }

    /// Explicit matroid from its bases; the family is the downward closure.
    pub fn explicit_from_bases<I>(n: usize, bases: I) -> Result<Matroid>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        if n > 63 {
            return Err(Error::invalid("explicit matroids support n <= 63"));
        }
        let mut family = BTreeSet::new();
        let mut stack: Vec<u64> = Vec::new();
        for b in bases {
            stack.push(mask_of(&b));
        }
        while let Some(s) = stack.pop() {
            if !family.insert(s) {
                continue;
            }
            let mut rest = s;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                stack.push(s & !bit);
                rest &= !bit;
            }
        }
        Self::explicit(
            n,
            family.into_iter().map(|m| {
                (0..n).filter(|&x| m & (1 << x) != 0).collect::<Vec<_>>()
            }),
        )
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Independence test; one oracle call.
    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        debug_assert!(set.iter().all(|&x| x < self.n));
        match &self.kind {
            Kind::Uniform { k } => set.len() <= *k,
            Kind::Partition {
                block_of,
                capacities,
            } => {
                let mut counts = vec![0usize; capacities.len()];
                for &x in set {
                    let b = block_of[x];
                    counts[b] += 1;
                    if counts[b] > capacities[b] {
                        return false;
                    }
                }
                true
            }
            Kind::Explicit { sets, .. } => sets.contains(&mask_of(set)),
        }
    }

    /// Rank of the matroid (size of every basis).
    pub fn rank(&self) -> usize {
        match &self.kind {
            Kind::Uniform { k } => (*k).min(self.n),
            Kind::Partition {
                block_of,
                capacities,
            } => {
                let mut sizes = vec![0usize; capacities.len()];
                for &b in block_of {
                    sizes[b] += 1;
                }
                sizes
                    .iter()
                    .zip(capacities)
                    .map(|(s, c)| s.min(c))
                    .sum()
            }
            Kind::Explicit { rank, .. } => *rank,
        }
    }

    /// True iff `set` is independent and no strict superset is.
    pub fn is_basis(&self, set: &[usize]) -> bool {
        if !self.is_independent(set) {
            return false;
        }
        let mut extended: Vec<usize> = set.to_vec();
        for x in 0..self.n {
            if set.contains(&x) {
                continue;
            }
            extended.push(x);
            let ok = self.is_independent(&extended);
            extended.pop();
            if ok {
                return false;
            }
        }
        true
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    /// One-line description for reports.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Uniform { k } => format!("uniform(k={k})"),
            Kind::Partition { capacities, .. } => {
                format!("partition(blocks={})", capacities.len())
            }
            Kind::Explicit { sets, .. } => format!("explicit(sets={})", sets.len()),
        }
    }
}

impl fmt::Display for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Brualdi bijection between equal-size independent sets `A` and `B`:
/// a pairing `(a, pi(a))` with `A - a + pi(a)` independent for every `a`,
/// and `pi(a) = a` on the intersection.
///
/// Computed as a perfect matching in the bipartite exchange graph. A missing
/// matching contradicts the exchange structure of a matroid and therefore
/// signals a broken oracle.
pub fn brualdi_bijection(m: &Matroid, a: &[usize], b: &[usize]) -> Result<Vec<(usize, usize)>> {
    if a.len() != b.len() {
        return Err(Error::invalid("brualdi bijection needs |A| = |B|"));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(a.len());
    let mut left: Vec<usize> = Vec::new();
    for &x in a {
        if b.contains(&x) {
            pairs.push((x, x));
        } else {
            left.push(x);
        }
    }
    let right: Vec<usize> = b.iter().copied().filter(|x| !a.contains(x)).collect();
    left.sort_unstable();
    let mut right = right;
    right.sort_unstable();

    // Exchange graph restricted to A \ B and B \ A.
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(left.len());
    let mut probe: Vec<usize> = a.to_vec();
    for &x in &left {
        let pos = probe.iter().position(|&y| y == x).unwrap();
        let mut edges = Vec::new();
        for (j, &y) in right.iter().enumerate() {
            probe[pos] = y;
            if m.is_independent(&probe) {
                edges.push(j);
            }
        }
        probe[pos] = x;
        adj.push(edges);
    }

    // Kuhn's augmenting-path matching, rows in ascending element order.
    let mut match_right: Vec<Option<usize>> = vec![None; right.len()];
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        match_right: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &j in &adj[i] {
            if visited[j] {
                continue;
            }
            visited[j] = true;
            if match_right[j].is_none()
                || augment(match_right[j].unwrap(), adj, match_right, visited)
            {
                match_right[j] = Some(i);
                return true;
            }
        }
        false
    }
    for i in 0..left.len() {
        let mut visited = vec![false; right.len()];
        if !augment(i, &adj, &mut match_right, &mut visited) {
            return Err(Error::Internal(format!(
                "no Brualdi bijection between {a:?} and {b:?}; independence oracle is inconsistent"
            )));
        }
    }
    for (j, owner) in match_right.iter().enumerate() {
        let i = owner.expect("perfect matching");
        pairs.push((left[i], right[j]));
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Maximum-cardinality common independent set of two matroids over the same
/// ground set, via shortest augmenting paths in the exchange digraph.
/// Ties are broken toward lower element indices.
pub fn max_common_independent(m1: &Matroid, m2: &Matroid) -> Result<Vec<usize>> {
    if m1.ground_size() != m2.ground_size() {
        return Err(Error::invalid(format!(
            "ground sets differ: {} vs {}",
            m1.ground_size(),
            m2.ground_size()
        )));
    }
    let n = m1.ground_size();
    let mut current: Vec<usize> = Vec::new();
    loop {
        match augmenting_path(m1, m2, &current, n) {
            Some(path) => {
                // Symmetric difference along the path.
                for &x in &path {
                    match current.iter().position(|&y| y == x) {
                        Some(pos) => {
                            current.remove(pos);
                        }
                        None => current.push(x),
                    }
                }
                current.sort_unstable();
            }
            None => return Ok(current),
        }
    }
}

/// BFS for a shortest source-to-sink path in the exchange digraph of the
/// current common independent set. Returns path vertices in order.
fn augmenting_path(m1: &Matroid, m2: &Matroid, current: &[usize], n: usize) -> Option<Vec<usize>> {
    let in_set = |x: usize| current.contains(&x);
    let mut with_x: Vec<usize> = current.to_vec();
    with_x.push(0);
    let sources: Vec<usize> = (0..n)
        .filter(|&x| {
            if in_set(x) {
                return false;
            }
            *with_x.last_mut().unwrap() = x;
            m1.is_independent(&with_x)
        })
        .collect();
    let sinks: Vec<bool> = (0..n)
        .map(|x| {
            if in_set(x) {
                return false;
            }
            *with_x.last_mut().unwrap() = x;
            m2.is_independent(&with_x)
        })
        .collect();
    if sources.is_empty() {
        return None;
    }

    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    for &s in &sources {
        seen[s] = true;
        queue.push_back(s);
        if sinks[s] {
            return Some(vec![s]);
        }
    }
    while let Some(u) = queue.pop_front() {
        // From x outside the set, arcs go to y inside with A - y + x in I2;
        // from y inside, arcs go to x outside with A - y + x in I1.
        if !in_set(u) {
            for &y in current {
                if seen[y] {
                    continue;
                }
                let mut probe: Vec<usize> = current
                    .iter()
                    .copied()
                    .filter(|&z| z != y)
                    .chain(std::iter::once(u))
                    .collect();
                probe.sort_unstable();
                if m2.is_independent(&probe) {
                    seen[y] = true;
                    parent[y] = Some(u);
                    queue.push_back(y);
                }
            }
        } else {
            for x in 0..n {
                if in_set(x) || seen[x] {
                    continue;
                }
                let mut probe: Vec<usize> = current
                    .iter()
                    .copied()
                    .filter(|&z| z != u)
                    .chain(std::iter::once(x))
                    .collect();
                probe.sort_unstable();
                if m1.is_independent(&probe) {
                    seen[x] = true;
                    parent[x] = Some(u);
                    if sinks[x] {
                        let mut path = vec![x];
                        let mut cur = x;
                        while let Some(p) = parent[cur] {
                            path.push(p);
                            cur = p;
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(x);
                }
            }
        }
    }
    None
}

/// A matroid-intersection constraint with its maximum common cardinality.
#[derive(Debug, Clone)]
pub struct IntersectionConstraint {
    m1: Matroid,
    m2: Matroid,
    k_common: usize,
}

impl IntersectionConstraint {
    pub fn new(m1: Matroid, m2: Matroid) -> Result<Self> {
        let max_set = max_common_independent(&m1, &m2)?;
        Ok(IntersectionConstraint {
            m1,
            m2,
            k_common: max_set.len(),
        })
    }

    pub fn ground_size(&self) -> usize {
        self.m1.ground_size()
    }

    pub fn k_common(&self) -> usize {
        self.k_common
    }

    pub fn m1(&self) -> &Matroid {
        &self.m1
    }

    pub fn m2(&self) -> &Matroid {
        &self.m2
    }

    pub fn is_common_independent(&self, set: &[usize]) -> bool {
        self.m1.is_independent(set) && self.m2.is_independent(set)
    }

    /// Extends `set` greedily (ascending element index) to a maximal common
    /// independent set. Any maximal set has cardinality at least
    /// `k_common / 2`.
    pub fn augment_to_maximal(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.to_vec();
        out.sort_unstable();
        for x in 0..self.ground_size() {
            if out.contains(&x) {
                continue;
            }
            let mut probe = out.clone();
            probe.push(x);
            probe.sort_unstable();
            if self.is_common_independent(&probe) {
                out = probe;
            }
        }
        out
    }

    /// True iff no single element can be added.
    pub fn is_maximal(&self, set: &[usize]) -> bool {
        if !self.is_common_independent(set) {
            return false;
        }
        let mut probe: Vec<usize> = set.to_vec();
        for x in 0..self.ground_size() {
            if set.contains(&x) {
                continue;
            }
            probe.push(x);
            probe.sort_unstable();
            let ok = self.is_common_independent(&probe);
            probe = set.to_vec();
            if ok {
                return false;
            }
        }
        true
    }

    pub fn oracle_calls(&self) -> u64 {
        self.m1.calls() + self.m2.calls()
    }

    pub fn reset_calls(&self) {
        self.m1.reset_calls();
        self.m2.reset_calls();
    }

    pub fn describe(&self) -> String {
        format!("intersection({}, {})", self.m1.describe(), self.m2.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_basis_checks() {
        let m = Matroid::uniform(4, 2);
        assert!(m.is_basis(&[1, 3]));
        assert!(!m.is_basis(&[1]));
        assert!(!m.is_basis(&[0, 1, 2]));
    }

    #[test]
    fn partition_basis_one_per_block() {
        let m = Matroid::partition_from_blocks(4, &[vec![0, 1], vec![2, 3]], &[1, 1]).unwrap();
        assert!(m.is_basis(&[0, 2]));
        assert!(!m.is_basis(&[0]));
        assert!(!m.is_independent(&[0, 1]));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn partition_requires_cover_and_disjoint_blocks() {
        assert!(Matroid::partition_from_blocks(3, &[vec![0, 1]], &[1]).is_err());
        assert!(
            Matroid::partition_from_blocks(3, &[vec![0, 1], vec![1, 2]], &[1, 1]).is_err()
        );
    }

    #[test]
    fn explicit_rejects_broken_families() {
        // Missing subset {1}: not downward closed.
        assert!(Matroid::explicit(2, vec![vec![], vec![0], vec![0, 1]]).is_err());
        // {0,1} vs {2}: neither {0,2} nor {1,2} independent, exchange fails.
        assert!(Matroid::explicit(
            3,
            vec![vec![], vec![0], vec![1], vec![2], vec![0, 1]]
        )
        .is_err());
        // Valid rank-2 family where {0,2} stays dependent.
        let m = Matroid::explicit(
            3,
            vec![vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert_eq!(m.rank(), 2);
        assert!(!m.is_independent(&[0, 2]));
    }

    #[test]
    fn explicit_from_bases_accepts_valid() {
        let m = Matroid::explicit_from_bases(4, vec![vec![2, 3]]).unwrap();
        assert_eq!(m.rank(), 2);
        assert!(m.is_independent(&[2]));
        assert!(m.is_basis(&[2, 3]));
        assert!(!m.is_independent(&[0]));
    }

    #[test]
    fn brualdi_identity_on_intersection() {
        let m = Matroid::uniform(4, 2);
        let pairs = brualdi_bijection(&m, &[0, 1], &[1, 2]).unwrap();
        assert_eq!(pairs, vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn brualdi_identity_map_when_equal() {
        let m = Matroid::uniform(5, 3);
        let pairs = brualdi_bijection(&m, &[0, 2, 4], &[0, 2, 4]).unwrap();
        assert_eq!(pairs, vec![(0, 0), (2, 2), (4, 4)]);
    }

    #[test]
    fn brualdi_partition_forced_matching() {
        let m = Matroid::partition_from_blocks(4, &[vec![0, 1], vec![2, 3]], &[1, 1]).unwrap();
        let pairs = brualdi_bijection(&m, &[0, 2], &[1, 3]).unwrap();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        // Every exchange is independent.
        for &(a, b) in &pairs {
            let mut probe: Vec<usize> = [0, 2].iter().copied().filter(|&x| x != a).collect();
            probe.push(b);
            assert!(m.is_independent(&probe));
        }
    }

    #[test]
    fn max_common_two_uniform() {
        let m1 = Matroid::uniform(5, 3);
        let m2 = Matroid::uniform(5, 3);
        let s = max_common_independent(&m1, &m2).unwrap();
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn max_common_bipartite_matching() {
        // Ground set: edges of a 2x2 bipartite graph, indexed (row, col):
        // 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1). Rows and columns each cap 1.
        let rows = Matroid::partition_from_blocks(4, &[vec![0, 1], vec![2, 3]], &[1, 1]).unwrap();
        let cols = Matroid::partition_from_blocks(4, &[vec![0, 2], vec![1, 3]], &[1, 1]).unwrap();
        let s = max_common_independent(&rows, &cols).unwrap();
        assert_eq!(s.len(), 2);
        assert!(rows.is_independent(&s) && cols.is_independent(&s));
    }

    #[test]
    fn max_common_degenerate_empty() {
        let m1 = Matroid::uniform(3, 2);
        let m2 = Matroid::explicit(3, vec![vec![]]).unwrap();
        let s = max_common_independent(&m1, &m2).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn augment_to_maximal_greedy_order() {
        let c = IntersectionConstraint::new(Matroid::uniform(4, 2), Matroid::uniform(4, 2))
            .unwrap();
        assert_eq!(c.augment_to_maximal(&[]), vec![0, 1]);
        let already = c.augment_to_maximal(&[0, 1]);
        assert_eq!(already, vec![0, 1]);
        assert!(c.is_maximal(&[0, 1]));
    }

    #[test]
    fn maximal_at_least_half_of_k_common() {
        // Brute-force sanity on a handful of fixed partition pairs.
        let m1 = Matroid::partition_from_blocks(
            6,
            &[vec![0, 1, 2], vec![3, 4, 5]],
            &[2, 1],
        )
        .unwrap();
        let m2 = Matroid::partition_from_blocks(
            6,
            &[vec![0, 3], vec![1, 4], vec![2, 5]],
            &[1, 1, 1],
        )
        .unwrap();
        let c = IntersectionConstraint::new(m1, m2).unwrap();
        let maximal = c.augment_to_maximal(&[]);
        assert!(maximal.len() * 2 >= c.k_common());
    }

    #[test]
    fn explicit_family_mirrors_partition_matroid() {
        // Materializing a partition matroid as an explicit family must pass
        // the axiom checks and answer identically.
        let p = Matroid::partition_from_blocks(5, &[vec![0, 1, 2], vec![3, 4]], &[2, 1]).unwrap();
        let family: Vec<Vec<usize>> = (0u32..(1 << 5))
            .map(|mask| (0..5).filter(|&x| mask & (1 << x) != 0).collect::<Vec<_>>())
            .filter(|set| p.is_independent(set))
            .collect();
        let e = Matroid::explicit(5, family).unwrap();
        assert_eq!(e.rank(), p.rank());
        for mask in 0u32..(1 << 5) {
            let set: Vec<usize> = (0..5).filter(|&x| mask & (1 << x) != 0).collect();
            assert_eq!(e.is_independent(&set), p.is_independent(&set), "{set:?}");
        }
    }

    #[test]
    fn max_common_matches_enumeration_small() {
        // Exhaustive check against subset enumeration for a fixed pair.
        let m1 = Matroid::partition_from_blocks(
            5,
            &[vec![0, 1], vec![2, 3, 4]],
            &[1, 2],
        )
        .unwrap();
        let m2 = Matroid::partition_from_blocks(
            5,
            &[vec![0, 2, 4], vec![1, 3]],
            &[2, 1],
        )
        .unwrap();
        let mut best = 0usize;
        for mask in 0u32..(1 << 5) {
            let set: Vec<usize> = (0..5).filter(|&x| mask & (1 << x) != 0).collect();
            if m1.is_independent(&set) && m2.is_independent(&set) {
                best = best.max(set.len());
            }
        }
        let s = max_common_independent(&m1, &m2).unwrap();
        assert_eq!(s.len(), best);
    }
}
