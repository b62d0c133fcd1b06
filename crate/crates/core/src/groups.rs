//! Finite abelian groups in invariant-factor form, and their characters.
//!
//! A group `Z_{d_1} x ... x Z_{d_r}` with `d_1 | ... | d_r` is identified
//! with its dual: the character labelled by `h` sends `g` to
//! `zeta_e^{sum (e/d_i) h_i g_i}`, `e` the exponent. Elements also have a
//! mixed-radix index in `0..order`, used by the searcher.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;

use crate::cyclotomic::CycInt;
use crate::numtheory::{factorize, valuation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// An invariant factor below 2.
    BadFactor { index: usize, value: u64 },
    /// `d_index` does not divide `d_{index+1}`.
    NotDivisible { index: usize, value: u64, next: u64 },
    Parse(String),
    DimensionMismatch { expected: usize, got: usize },
    ResidueOutOfRange { index: usize, value: u64, modulus: u64 },
    NotDivisorOfExponent { d: u64, exponent: u64 },
    TooLarge,
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::BadFactor { index, value } => {
                write!(f, "invariant factor #{index} is {value}; factors must be at least 2")
            }
            GroupError::NotDivisible { index, value, next } => write!(
                f,
                "invariant factor #{index} ({value}) does not divide the next one ({next})"
            ),
            GroupError::Parse(s) => write!(f, "cannot parse group literal: {s}"),
            GroupError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} residues, got {got}")
            }
            GroupError::ResidueOutOfRange {
                index,
                value,
                modulus,
            } => write!(f, "residue #{index} is {value}, outside [0, {modulus})"),
            GroupError::NotDivisorOfExponent { d, exponent } => {
                write!(f, "{d} does not divide the group exponent {exponent}")
            }
            GroupError::TooLarge => write!(f, "group order exceeds the supported range"),
        }
    }
}

impl core::error::Error for GroupError {}

/// `Z_{d_1} x ... x Z_{d_r}` with `d_1 | d_2 | ... | d_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<u64>", into = "Vec<u64>"))]
pub struct GroupSpec {
    factors: Vec<u64>,
}

impl GroupSpec {
    pub fn new(factors: Vec<u64>) -> Result<Self, GroupError> {
        for (index, &value) in factors.iter().enumerate() {
            if value < 2 {
                return Err(GroupError::BadFactor { index, value });
            }
            if let Some(&next) = factors.get(index + 1) {
                if next % value != 0 {
                    return Err(GroupError::NotDivisible { index, value, next });
                }
            }
        }
        factors
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .filter(|&v| v <= usize::MAX as u64)
            .ok_or(GroupError::TooLarge)?;
        Ok(GroupSpec { factors })
    }

    /// `Z_n`; the trivial group for `n = 1`.
    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            GroupSpec { factors: vec![] }
        } else {
            GroupSpec { factors: vec![n] }
        }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.rank()],
        }
    }

    pub fn element(&self, residues: &[u64]) -> Result<GroupElement, GroupError> {
        if residues.len() != self.rank() {
            return Err(GroupError::DimensionMismatch {
                expected: self.rank(),
                got: residues.len(),
            });
        }
        for (index, (&value, &modulus)) in residues.iter().zip(&self.factors).enumerate() {
            if value >= modulus {
                return Err(GroupError::ResidueOutOfRange {
                    index,
                    value,
                    modulus,
                });
            }
        }
        Ok(GroupElement {
            residues: residues.to_vec(),
        })
    }

    fn check(&self, g: &GroupElement) -> Result<(), GroupError> {
        self.element(&g.residues).map(|_| ())
    }

    /// Mixed-radix index with the last factor varying fastest.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&r, &d)| acc * d as usize + r as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0u64; self.rank()];
        for (slot, &d) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement { residues }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let residues = g
            .residues
            .iter()
            .zip(&h.residues)
            .zip(&self.factors)
            .map(|((&a, &b), &d)| (a + b) % d)
            .collect();
        GroupElement { residues }
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        let residues = g
            .residues
            .iter()
            .zip(&self.factors)
            .map(|(&a, &d)| (d - a) % d)
            .collect();
        GroupElement { residues }
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.add(g, &self.neg(h))
    }

    /// `g - h` on mixed-radix indices.
    pub fn sub_index(&self, g: usize, h: usize) -> usize {
        let (mut g, mut h) = (g, h);
        let mut out = 0usize;
        let mut place = 1usize;
        for &d in self.factors.iter().rev() {
            let d = d as usize;
            let r = (g % d + d - h % d) % d;
            out += r * place;
            place *= d;
            g /= d;
            h /= d;
        }
        out
    }

    /// Order of an element: lcm of `d_i / gcd(g_i, d_i)`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        g.residues
            .iter()
            .zip(&self.factors)
            .fold(1u64, |acc, (&r, &d)| acc.lcm(&(d / r.gcd(&d))))
    }

    /// The character labelled by `h`.
    pub fn character(&self, h: &GroupElement) -> Result<Character, GroupError> {
        self.check(h)?;
        Ok(Character { label: h.clone() })
    }

    pub fn principal(&self) -> Character {
        Character {
            label: self.identity(),
        }
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements().map(|label| Character { label })
    }

    /// Exponent `t` with `chi(g) = zeta_e^t`.
    pub fn char_exponent(&self, chi: &Character, g: &GroupElement) -> u64 {
        let e = self.exponent();
        chi.label
            .residues
            .iter()
            .zip(&g.residues)
            .zip(&self.factors)
            .fold(0u64, |acc, ((&h, &x), &d)| {
                let term = ((e / d) as u128 * h as u128 * x as u128 % e as u128) as u64;
                (acc + term) % e
            })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    /// Comma-separated invariant factors, e.g. `2,4,8`. `1` is the trivial
    /// group.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(GroupError::Parse("empty group literal".into()));
        }
        let mut factors = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let d = part
                .parse::<u64>()
                .map_err(|_| GroupError::Parse(alloc::format!("`{part}` is not an integer")))?;
            factors.push(d);
        }
        if factors == [1] {
            return Ok(GroupSpec::cyclic(1));
        }
        GroupSpec::new(factors)
    }
}

impl TryFrom<Vec<u64>> for GroupSpec {
    type Error = GroupError;

    fn try_from(factors: Vec<u64>) -> Result<Self, Self::Error> {
        GroupSpec::new(factors)
    }
}

impl From<GroupSpec> for Vec<u64> {
    fn from(g: GroupSpec) -> Self {
        g.factors
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

/// A character, named by its label under the self-duality `G -> G^`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Character {
    label: GroupElement,
}

impl Character {
    pub fn label(&self) -> &GroupElement {
        &self.label
    }

    pub fn is_principal(&self) -> bool {
        self.label.residues.iter().all(|&r| r == 0)
    }
}

/// `chi(g)` as an element of `Z[zeta_e]`.
pub fn char_value(
    group: &GroupSpec,
    chi: &Character,
    g: &GroupElement,
) -> Result<CycInt, GroupError> {
    group.check(&chi.label)?;
    group.check(g)?;
    let e = group.exponent() as usize;
    Ok(CycInt::root(e, group.char_exponent(chi, g)).expect("exponent is positive"))
}

/// `chi(S)` for a multiset `S`.
pub fn char_sum<'a, I>(group: &GroupSpec, chi: &Character, set: I) -> Result<CycInt, GroupError>
where
    I: IntoIterator<Item = &'a GroupElement>,
{
    group.check(&chi.label)?;
    let mut exps = Vec::new();
    for g in set {
        group.check(g)?;
        exps.push(group.char_exponent(chi, g));
    }
    CycInt::from_exponents(group.exponent() as usize, exps).map_err(|_| GroupError::TooLarge)
}

pub fn char_order(group: &GroupSpec, chi: &Character) -> u64 {
    group.element_order(&chi.label)
}

/// All characters of order exactly `d`.
pub fn characters_of_order(group: &GroupSpec, d: u64) -> Result<Vec<Character>, GroupError> {
    let e = group.exponent();
    if d == 0 || e % d != 0 {
        return Err(GroupError::NotDivisorOfExponent { d, exponent: e });
    }
    Ok(group
        .characters()
        .filter(|chi| char_order(group, chi) == d)
        .collect())
}

/// Exponent of the Sylow `p`-subgroup.
pub fn sylow_exponent(group: &GroupSpec, p: u64) -> u64 {
    let a = group
        .factors
        .iter()
        .map(|&d| valuation(d, p).unwrap_or(0))
        .max()
        .unwrap_or(0);
    p.pow(a)
}

/// One group per isomorphism class of abelian groups of order `v`, cyclic
/// first.
pub fn enumerate_abelian_groups(v: u64) -> Vec<GroupSpec> {
    let Ok(fac) = factorize(v) else {
        return Vec::new();
    };
    // Per prime, the partitions of its exponent, largest parts first.
    let per_prime: Vec<(u64, Vec<Vec<u32>>)> = fac
        .pairs()
        .iter()
        .map(|&(p, a)| (p, partitions(a)))
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_prime.len()];
    loop {
        let rank = per_prime
            .iter()
            .zip(&choice)
            .map(|((_, parts), &c)| parts[c].len())
            .max()
            .unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for ((p, parts), &c) in per_prime.iter().zip(&choice) {
            // Largest part goes to the last invariant factor.
            for (j, &part) in parts[c].iter().enumerate() {
                factors[rank - 1 - j] *= p.pow(part);
            }
        }
        out.push(GroupSpec { factors });
        // Odometer over the per-prime choices, last prime fastest.
        let mut i = per_prime.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < per_prime[i].1.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

// Partitions of n in reverse lexicographic order, parts non-increasing.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}
