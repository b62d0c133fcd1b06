//! Strong external difference families: verification and exhaustive search.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::groups::{GroupElement, GroupError, GroupSpec};

/// A parameter tuple `(v, m, k, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Params {
    pub v: u64,
    pub m: u64,
    pub k: u64,
    pub lambda: u64,
}

impl Params {
    pub const fn new(v: u64, m: u64, k: u64, lambda: u64) -> Self {
        Params { v, m, k, lambda }
    }

    /// `(m - 1) k^2 = lambda (v - 1)`, evaluated without overflow.
    pub fn satisfies_counting(&self) -> bool {
        let lhs = (self.m as u128).saturating_sub(1) * (self.k as u128) * (self.k as u128);
        let rhs = (self.lambda as u128) * (self.v as u128).saturating_sub(1);
        lhs == rhs
    }

    /// `(v, v, 1, 1)` and other singleton-set shapes.
    pub fn is_trivial(&self) -> bool {
        self.k == 1
    }

    /// The `lambda` forced by the counting identity, if integral.
    pub fn derived_lambda(v: u64, m: u64, k: u64) -> Option<u64> {
        if v < 2 || m < 1 {
            return None;
        }
        let num = (m as u128 - 1) * k as u128 * k as u128;
        let den = v as u128 - 1;
        (num % den == 0)
            .then(|| u64::try_from(num / den).ok())
            .flatten()
            .filter(|&l| l > 0)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.v, self.m, self.k, self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    NoSets,
    SizeMismatch {
        set: usize,
        expected: usize,
        got: usize,
    },
    Element {
        set: usize,
        index: usize,
        error: GroupError,
    },
    Repeated {
        set: usize,
        index: usize,
    },
    /// The element at `sets[set][index]` also lies in `other`.
    Overlap {
        set: usize,
        index: usize,
        other: usize,
    },
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::NoSets => write!(f, "family has no sets"),
            FamilyError::SizeMismatch { set, expected, got } => {
                write!(f, "set {set} has {got} elements, expected {expected}")
            }
            FamilyError::Element { set, index, error } => {
                write!(f, "set {set}, element {index}: {error}")
            }
            FamilyError::Repeated { set, index } => {
                write!(f, "set {set}, element {index} repeats an earlier element")
            }
            FamilyError::Overlap { set, index, other } => {
                write!(f, "set {set}, element {index} also lies in set {other}")
            }
        }
    }
}

impl core::error::Error for FamilyError {}

/// `m` pairwise disjoint `k`-subsets of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    group: GroupSpec,
    sets: Vec<Vec<GroupElement>>,
}

impl SetFamily {
    /// Validates the residues and the disjointness and size invariants,
    /// reporting the first violation.
    pub fn new(group: GroupSpec, sets: Vec<Vec<Vec<u64>>>) -> Result<Self, FamilyError> {
        if sets.is_empty() {
            return Err(FamilyError::NoSets);
        }
        let v = group.order() as usize;
        let k = sets[0].len();
        let mut owner: Vec<Option<usize>> = vec![None; v];
        let mut out = Vec::with_capacity(sets.len());
        for (s, raw) in sets.iter().enumerate() {
            if raw.len() != k {
                return Err(FamilyError::SizeMismatch {
                    set: s,
                    expected: k,
                    got: raw.len(),
                });
            }
            let mut elems = Vec::with_capacity(k);
            for (i, residues) in raw.iter().enumerate() {
                let g = group
                    .element(residues)
                    .map_err(|error| FamilyError::Element {
                        set: s,
                        index: i,
                        error,
                    })?;
                let idx = group.index_of(&g);
                match owner[idx] {
                    Some(o) if o == s => return Err(FamilyError::Repeated { set: s, index: i }),
                    Some(other) => {
                        return Err(FamilyError::Overlap {
                            set: s,
                            index: i,
                            other,
                        })
                    }
                    None => owner[idx] = Some(s),
                }
                elems.push(g);
            }
            out.push(elems);
        }
        Ok(SetFamily { group, sets: out })
    }

    fn from_indices(group: GroupSpec, sets: &[Vec<usize>]) -> Self {
        let sets = sets
            .iter()
            .map(|s| s.iter().map(|&i| group.element_at(i)).collect())
            .collect();
        SetFamily { group, sets }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn sets(&self) -> &[Vec<GroupElement>] {
        &self.sets
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn k(&self) -> usize {
        self.sets[0].len()
    }

    /// The union `D` of all sets.
    pub fn union(&self) -> Vec<GroupElement> {
        self.sets.iter().flatten().cloned().collect()
    }

    /// Raw residues, the inverse of [`SetFamily::new`].
    pub fn to_residues(&self) -> Vec<Vec<Vec<u64>>> {
        self.sets
            .iter()
            .map(|s| s.iter().map(|g| g.residues().to_vec()).collect())
            .collect()
    }

    /// The family translated by `t`.
    pub fn translate(&self, t: &GroupElement) -> SetFamily {
        let sets = self
            .sets
            .iter()
            .map(|s| s.iter().map(|g| self.group.add(g, t)).collect())
            .collect();
        SetFamily {
            group: self.group.clone(),
            sets,
        }
    }
}

/// The multiset `{x - y : x in a, y in b}` as counts indexed by
/// [`GroupSpec::index_of`].
pub fn external_difference(group: &GroupSpec, a: &[GroupElement], b: &[GroupElement]) -> Vec<u64> {
    let mut counts = vec![0u64; group.order() as usize];
    for x in a {
        for y in b {
            counts[group.index_of(&group.sub(x, y))] += 1;
        }
    }
    counts
}

/// An element covered the wrong number of times by the differences into
/// the set `set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub set: usize,
    pub element: GroupElement,
    pub count: u64,
    pub expected: u64,
}

fn into_set_counts(family: &SetFamily, j: usize) -> Vec<u64> {
    let g = &family.group;
    let mut counts = vec![0u64; g.order() as usize];
    for (l, other) in family.sets.iter().enumerate() {
        if l == j {
            continue;
        }
        for (i, c) in external_difference(g, other, &family.sets[j])
            .into_iter()
            .enumerate()
        {
            counts[i] += c;
        }
    }
    counts
}

/// For each set index with a defect, the first offending element.
pub fn sedf_violations(family: &SetFamily, lambda: u64) -> Vec<Violation> {
    let mut out = Vec::new();
    for j in 0..family.m() {
        let counts = into_set_counts(family, j);
        let bad = counts
            .iter()
            .enumerate()
            .skip(1)
            .find(|&(_, &c)| c != lambda);
        if let Some((i, &count)) = bad {
            out.push(Violation {
                set: j,
                element: family.group.element_at(i),
                count,
                expected: lambda,
            });
        }
    }
    out
}

/// Every non-identity element is covered exactly `lambda` times by
/// `union_{l != j} (D_l - D_j)`, for each `j`.
pub fn is_sedf(family: &SetFamily, lambda: u64) -> bool {
    sedf_violations(family, lambda).is_empty()
}

/// The weaker condition summed over all ordered pairs of distinct sets.
pub fn is_edf(family: &SetFamily, lambda: u64) -> bool {
    let v = family.group.order() as usize;
    let mut total = vec![0u64; v];
    for j in 0..family.m() {
        for (i, c) in into_set_counts(family, j).into_iter().enumerate() {
            total[i] += c;
        }
    }
    total.iter().skip(1).all(|&c| c == lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Maximum number of placement attempts.
    pub budget: u64,
    /// Fix the identity in the first set and order the remaining sets by
    /// their least element.
    pub symmetry_pruning: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 50_000_000,
            symmetry_pruning: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(SetFamily),
    /// The whole space was explored; no family exists in this group.
    Exhausted,
    /// The node budget ran out first. Says nothing about existence.
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

/// Backtracking search for an `(|G|, m, k, lambda)`-SEDF in `group`.
pub fn search_sedf(
    group: &GroupSpec,
    m: u64,
    k: u64,
    lambda: u64,
    options: SearchOptions,
) -> SearchReport {
    let v = group.order();
    let params = Params::new(v, m, k, lambda);
    if m == 0 || k == 0 || m.saturating_mul(k) > v || !params.satisfies_counting() {
        return SearchReport {
            outcome: SearchOutcome::Exhausted,
            nodes: 0,
        };
    }
    let mut s = Searcher::new(group, m as usize, k as usize, lambda as u32, options);
    let found = s.run();
    let outcome = match found {
        Some(true) => {
            let family = SetFamily::from_indices(group.clone(), &s.sets);
            debug_assert!(is_sedf(&family, lambda));
            SearchOutcome::Found(family)
        }
        Some(false) => SearchOutcome::Exhausted,
        None => SearchOutcome::BudgetExceeded,
    };
    SearchReport {
        outcome,
        nodes: s.nodes,
    }
}

struct Searcher<'a> {
    group: &'a GroupSpec,
    v: usize,
    m: usize,
    k: usize,
    lambda: u32,
    options: SearchOptions,
    diff: Option<Vec<u32>>,
    // counts[j * v + g]: times g is covered by differences into set j.
    counts: Vec<u32>,
    used: Vec<bool>,
    sets: Vec<Vec<usize>>,
    nodes: u64,
}

const TABLE_LIMIT: usize = 4096;

impl<'a> Searcher<'a> {
    fn new(group: &'a GroupSpec, m: usize, k: usize, lambda: u32, options: SearchOptions) -> Self {
        let v = group.order() as usize;
        let diff = (v <= TABLE_LIMIT).then(|| {
            let mut t = vec![0u32; v * v];
            for x in 0..v {
                for y in 0..v {
                    t[x * v + y] = group.sub_index(x, y) as u32;
                }
            }
            t
        });
        Searcher {
            group,
            v,
            m,
            k,
            lambda,
            options,
            diff,
            counts: vec![0; m * v],
            used: vec![false; v],
            sets: vec![Vec::with_capacity(k); m],
            nodes: 0,
        }
    }

    fn sub(&self, x: usize, y: usize) -> usize {
        match &self.diff {
            Some(t) => t[x * self.v + y] as usize,
            None => self.group.sub_index(x, y),
        }
    }

    // Adds (or removes) the differences created by x joining set s. Returns
    // false if some count passes lambda.
    fn apply(&mut self, x: usize, s: usize, add: bool) -> bool {
        let mut ok = true;
        for t in 0..self.m {
            if t == s {
                continue;
            }
            for yi in 0..self.sets[t].len() {
                let y = self.sets[t][yi];
                // x - y lands in the differences into t, y - x into s.
                let a = t * self.v + self.sub(x, y);
                let b = s * self.v + self.sub(y, x);
                if add {
                    self.counts[a] += 1;
                    self.counts[b] += 1;
                    ok &= self.counts[a] <= self.lambda && self.counts[b] <= self.lambda;
                } else {
                    self.counts[a] -= 1;
                    self.counts[b] -= 1;
                }
            }
        }
        ok
    }

    fn place(&mut self, x: usize, s: usize) -> bool {
        self.used[x] = true;
        let ok = self.apply(x, s, true);
        self.sets[s].push(x);
        ok
    }

    fn unplace(&mut self, s: usize) {
        let x = self.sets[s].pop().expect("nonempty");
        self.apply(x, s, false);
        self.used[x] = false;
    }

    fn run(&mut self) -> Option<bool> {
        if self.options.symmetry_pruning {
            // Translation lets the identity sit in the first set.
            self.nodes += 1;
            let ok = self.place(0, 0);
            debug_assert!(ok);
            // In Z_p any two points of the first set map to 0 and 1 under
            // x -> (x - a)/(b - a), which preserves the SEDF property.
            let scaled = self.k >= 2 && crate::numtheory::is_prime(self.v as u64);
            if scaled {
                self.nodes += 1;
                if !self.place(1, 0) {
                    self.unplace(0);
                    self.unplace(0);
                    return Some(false);
                }
            }
            let r = self.dfs(0);
            if r != Some(true) {
                if scaled {
                    self.unplace(0);
                }
                self.unplace(0);
            }
            r
        } else {
            self.dfs(0)
        }
    }

    fn dfs(&mut self, s: usize) -> Option<bool> {
        if s == self.m {
            return Some(true);
        }
        if self.sets[s].len() == self.k {
            return self.dfs(s + 1);
        }
        let need = self.k - self.sets[s].len();
        let start = match self.sets[s].last() {
            Some(&last) => last + 1,
            None if self.options.symmetry_pruning && s >= 2 => self.sets[s - 1][0] + 1,
            None => 0,
        };
        // Later sets of the ordered tail each need a least element above
        // this one; leave room for them.
        let tail = if self.options.symmetry_pruning && self.sets[s].is_empty() && s >= 1 {
            self.m - 1 - s
        } else {
            0
        };
        let Some(limit) = self.v.checked_sub(need + tail) else {
            return Some(false);
        };
        for x in start..=limit {
            if self.used[x] {
                continue;
            }
            if self.nodes >= self.options.budget {
                return None;
            }
            self.nodes += 1;
            if self.place(x, s) {
                match self.dfs(s) {
                    Some(true) => return Some(true),
                    None => {
                        self.unplace(s);
                        return None;
                    }
                    Some(false) => {}
                }
            }
            self.unplace(s);
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::enumerate_abelian_groups;

    fn fam(group: &str, sets: &[&[u64]]) -> SetFamily {
        let g: GroupSpec = group.parse().unwrap();
        SetFamily::new(g, sets.iter().map(|s| s.iter().map(|&x| vec![x]).collect()).collect())
            .unwrap()
    }

    fn found(r: SearchReport) -> SetFamily {
        match r.outcome {
            SearchOutcome::Found(f) => f,
            other => panic!("expected a family, got {other:?}"),
        }
    }

    #[test]
    fn counting_identity() {
        assert!(Params::new(5, 2, 2, 1).satisfies_counting());
        assert!(!Params::new(7, 3, 2, 2).satisfies_counting());
        assert_eq!(Params::derived_lambda(1540, 77, 18), Some(16));
        assert_eq!(Params::derived_lambda(7, 3, 2), None);
    }

    #[test]
    fn external_differences() {
        let g = GroupSpec::cyclic(5);
        let e = [g.identity()];
        let d = external_difference(&g, &e, &e);
        assert_eq!(d[0], 1);
        assert_eq!(d.iter().sum::<u64>(), 1);
        let a = [g.element(&[1]).unwrap()];
        let b = [g.element(&[2]).unwrap(), g.element(&[3]).unwrap()];
        assert_eq!(external_difference(&g, &a, &b), vec![0, 0, 0, 1, 1]);
    }

    #[test]
    fn family_validation() {
        let g = GroupSpec::cyclic(5);
        let bad = SetFamily::new(g.clone(), vec![vec![vec![0], vec![1]], vec![vec![1], vec![2]]]);
        assert_eq!(bad, Err(FamilyError::Overlap { set: 1, index: 0, other: 0 }));
        let bad = SetFamily::new(g.clone(), vec![vec![vec![0]], vec![vec![1], vec![2]]]);
        assert!(matches!(bad, Err(FamilyError::SizeMismatch { set: 1, .. })));
        let bad = SetFamily::new(g.clone(), vec![vec![vec![7]]]);
        assert!(matches!(bad, Err(FamilyError::Element { set: 0, index: 0, .. })));
        let bad = SetFamily::new(g, vec![vec![vec![3], vec![3]]]);
        assert_eq!(bad, Err(FamilyError::Repeated { set: 0, index: 1 }));
    }

    #[test]
    fn trivial_families() {
        for v in 1..=12u64 {
            for g in enumerate_abelian_groups(v) {
                let sets = g.elements().map(|x| vec![x.residues().to_vec()]).collect();
                let f = SetFamily::new(g, sets).unwrap();
                assert!(is_sedf(&f, 1));
                assert!(is_edf(&f, v));
            }
        }
    }

    #[test]
    fn single_set_is_not_edf() {
        let f = fam("5", &[&[0, 1]]);
        assert!(!is_edf(&f, 1));
        assert!(!is_sedf(&f, 1));
    }

    #[test]
    fn known_small_family() {
        let f = fam("5", &[&[0, 1], &[2, 4]]);
        assert!(is_sedf(&f, 1));
        assert!(is_edf(&f, 2));
        let moved = fam("5", &[&[0, 2], &[1, 4]]);
        let viol = sedf_violations(&moved, 1);
        assert!(!viol.is_empty());
    }

    #[test]
    fn search_examples() {
        let f = found(search_sedf(&GroupSpec::cyclic(5), 2, 2, 1, SearchOptions::default()));
        assert!(is_sedf(&f, 1));
        let f = found(search_sedf(&GroupSpec::cyclic(17), 2, 4, 1, SearchOptions::default()));
        assert!(is_sedf(&f, 1));
        let f = found(search_sedf(&GroupSpec::cyclic(10), 2, 3, 1, SearchOptions::default()));
        assert!(is_sedf(&f, 1));
        for lambda in 1..=4 {
            let r = search_sedf(&GroupSpec::cyclic(7), 3, 2, lambda, SearchOptions::default());
            assert_eq!(r.outcome, SearchOutcome::Exhausted);
        }
    }

    #[test]
    fn budget_is_reported() {
        let opts = SearchOptions {
            budget: 3,
            symmetry_pruning: true,
        };
        let r = search_sedf(&GroupSpec::cyclic(17), 2, 4, 1, opts);
        assert_eq!(r.outcome, SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn found_families_survive_translation_and_automorphisms() {
        for (v, k) in [(5u64, 2u64), (10, 3), (17, 4)] {
            let g = GroupSpec::cyclic(v);
            let f = found(search_sedf(&g, 2, k, 1, SearchOptions::default()));
            assert!(Params::new(v, 2, k, 1).satisfies_counting());
            assert!(is_edf(&f, 2));
            for t in g.elements() {
                assert!(is_sedf(&f.translate(&t), 1));
            }
            for u in (1..v).filter(|u| num_integer::Integer::gcd(u, &v) == 1) {
                let sets = f
                    .to_residues()
                    .into_iter()
                    .map(|s| s.into_iter().map(|r| vec![r[0] * u % v]).collect())
                    .collect();
                assert!(is_sedf(&SetFamily::new(g.clone(), sets).unwrap(), 1));
            }
        }
    }

    #[test]
    fn pruning_preserves_verdicts() {
        let no_prune = SearchOptions {
            budget: u64::MAX,
            symmetry_pruning: false,
        };
        for v in 2..=12u64 {
            for g in enumerate_abelian_groups(v) {
                for m in 2..=v {
                    for k in 1..=v / m {
                        let Some(lambda) = Params::derived_lambda(v, m, k) else {
                            continue;
                        };
                        let a = search_sedf(&g, m, k, lambda, SearchOptions::default());
                        let b = search_sedf(&g, m, k, lambda, no_prune);
                        assert_eq!(
                            matches!(a.outcome, SearchOutcome::Found(_)),
                            matches!(b.outcome, SearchOutcome::Found(_)),
                            "{g} m={m} k={k}"
                        );
                        assert_ne!(a.outcome, SearchOutcome::BudgetExceeded);
                    }
                }
            }
        }
    }
}
