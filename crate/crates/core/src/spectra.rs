//! Character spectra of difference families.
//!
//! For a nonprincipal character with `chi(D) != 0` and `m >= 3` the ratio
//! `sqrt(1 + 4 lambda / |chi(D)|^2)` is a reduced fraction `b/a`, and each
//! `chi(D_j)` equals `(a + b)/(2a)` or `(a - b)/(2a)` times `chi(D)`. The
//! pair `(a, b)` obeys a divisibility system that can be enumerated from
//! `m` and `lambda` alone.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_integer::Integer;

use crate::cyclotomic::{CycError, CycInt};
use crate::groups::{char_order, char_sum, Character, GroupElement, GroupError, GroupSpec};
use crate::numtheory::{is_prime, is_square, isqrt};
use crate::sedf::SetFamily;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectraError {
    MTooSmall(u64),
    /// `1 + 4 lambda / |chi(D)|^2` is not a rational square.
    NonRationalRadical,
    NonPositive,
    NotPrimeOrder(u64),
    /// A character fits no row of the spectrum table. Only possible if the
    /// input is not an SEDF with the given `lambda`.
    InconsistentSpectrum { character: GroupElement, set: usize },
    Group(GroupError),
    Cyclotomic(CycError),
}

impl fmt::Display for SpectraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectraError::MTooSmall(m) => write!(f, "m must be at least 3, got {m}"),
            SpectraError::NonRationalRadical => write!(f, "radical is irrational"),
            SpectraError::NonPositive => write!(f, "|chi(D)|^2 must be positive"),
            SpectraError::NotPrimeOrder(d) => write!(f, "character order {d} is not prime"),
            SpectraError::InconsistentSpectrum { character, set } => write!(
                f,
                "character {:?} on set {set} matches no spectrum class",
                character.residues()
            ),
            SpectraError::Group(e) => write!(f, "{e}"),
            SpectraError::Cyclotomic(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SpectraError {}

impl From<GroupError> for SpectraError {
    fn from(e: GroupError) -> Self {
        SpectraError::Group(e)
    }
}

impl From<CycError> for SpectraError {
    fn from(e: CycError) -> Self {
        SpectraError::Cyclotomic(e)
    }
}

/// An exact rational in lowest terms with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    /// Panics on a zero denominator.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        Rational {
            num: s * num / g.max(1),
            den: s * den / g.max(1),
        }
    }

    pub fn int(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_integer(&self) -> Option<i128> {
        self.is_integer().then_some(self.num)
    }

    pub fn add(self, o: Self) -> Self {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }

    pub fn sub(self, o: Self) -> Self {
        Rational::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    pub fn mul(self, o: Self) -> Self {
        Rational::new(self.num * o.num, self.den * o.den)
    }

    /// Panics when dividing by zero.
    pub fn div(self, o: Self) -> Self {
        Rational::new(self.num * o.den, self.den * o.num)
    }

    /// The exact square root, if rational.
    pub fn sqrt(self) -> Option<Self> {
        if self.num < 0 {
            return None;
        }
        let (n, d) = (self.num as u128, self.den as u128);
        let (rn, rd) = (n.isqrt(), d.isqrt());
        (rn * rn == n && rd * rd == d).then(|| Rational::new(rn as i128, rd as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// `(a, b)` with `0 < a < b`, `gcd(a, b) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdmissiblePair {
    pub a: u64,
    pub b: u64,
}

/// Whether `(a, b)` meets the divisibility system for `m` and `lambda`.
pub fn is_admissible(a: u64, b: u64, m: u64, lambda: u64) -> bool {
    if !(0 < a && a < b) || a.gcd(&b) != 1 || m < 3 {
        return false;
    }
    let (a, b, m, l) = (a as u128, b as u128, m as u128, lambda as u128);
    let diff2 = b * b - a * a;
    (m - 2) % b == 0
        && (b * m - a * (m - 2)) % (2 * b) == 0
        && ((b + a) * l) % (b - a) == 0
        && ((b - a) * l) % (b + a) == 0
        && (4 * l) % diff2 == 0
        && ((b + a) % 2 == 0 || l % diff2 == 0)
}

/// All admissible pairs, ordered by `b` then `a`. `b` ranges over the
/// divisors of `m - 2`.
pub fn admissible_pairs(m: u64, lambda: u64) -> Result<Vec<AdmissiblePair>, SpectraError> {
    if m < 3 {
        return Err(SpectraError::MTooSmall(m));
    }
    let mut out = Vec::new();
    for b in crate::numtheory::divisors(m - 2) {
        for a in 1..b {
            if is_admissible(a, b, m, lambda) {
                out.push(AdmissiblePair { a, b });
            }
        }
    }
    Ok(out)
}

/// Table values attached to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table1Norms {
    /// `|chi(D)|^2 = 4 a^2 lambda / (b^2 - a^2)`.
    pub abs_d2: Rational,
    /// `|chi(D_j)|^2` on the plus branch: `(b + a) lambda / (b - a)`.
    pub n_plus: Rational,
    /// `|chi(D_j)|^2` on the minus branch: `(b - a) lambda / (b + a)`.
    pub n_minus: Rational,
}

pub fn table1_norms(pair: AdmissiblePair, lambda: u64) -> Table1Norms {
    let (a, b, l) = (pair.a as i128, pair.b as i128, lambda as i128);
    Table1Norms {
        abs_d2: Rational::new(4 * a * a * l, b * b - a * a),
        n_plus: Rational::new((b + a) * l, b - a),
        n_minus: Rational::new((b - a) * l, b + a),
    }
}

/// Roots of `t^2 - t - lambda/|chi(D)|^2` and the multiplicities `x`, `y`
/// with which they occur among the `m` sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralSplit {
    /// `sqrt(1 + 4 lambda / |chi(D)|^2)`, equal to `b/a`.
    pub radical: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub x: Rational,
    pub y: Rational,
}

pub fn alpha_beta_xy(m: u64, lambda: u64, abs_d2: Rational) -> Result<SpectralSplit, SpectraError> {
    if abs_d2.num() <= 0 {
        return Err(SpectraError::NonPositive);
    }
    let one = Rational::int(1);
    let two = Rational::int(2);
    let inner = one.add(Rational::int(4 * lambda as i128).div(abs_d2));
    let radical = inner.sqrt().ok_or(SpectraError::NonRationalRadical)?;
    let m = Rational::int(m as i128);
    let half_m = m.div(two);
    let x = half_m.sub(m.sub(two).div(two.mul(radical)));
    Ok(SpectralSplit {
        radical,
        alpha: one.add(radical).div(two),
        beta: one.sub(radical).div(two),
        x,
        y: m.sub(x),
    })
}

/// Row of the spectrum table a (character, set) pair falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SpectrumClass {
    Principal,
    /// `chi(D) = 0`.
    Zero,
    /// `chi(D_j) = (a + b)/(2a) chi(D)`.
    Plus(AdmissiblePair),
    /// `chi(D_j) = (a - b)/(2a) chi(D)`.
    Minus(AdmissiblePair),
    /// `chi(D) != 0` with `m = 2`, where no pair is defined.
    Nonzero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSpectrum {
    pub character: Character,
    /// `|chi(D)|^2`, when rational.
    pub abs_d2: Option<i64>,
    /// One class per set, in family order.
    pub classes: Vec<SpectrumClass>,
}

/// Classifies every character against every set of an SEDF.
pub fn classify_characters(
    family: &SetFamily,
    lambda: u64,
) -> Result<Vec<CharacterSpectrum>, SpectraError> {
    let g = family.group();
    let m = family.m() as u64;
    let k = family.k() as i64;
    let d = family.union();
    let mut out = Vec::with_capacity(g.order() as usize);
    for chi in g.characters() {
        let chi_d = char_sum(g, &chi, &d)?;
        let set_values = family
            .sets()
            .iter()
            .map(|s| char_sum(g, &chi, s))
            .collect::<Result<Vec<_>, _>>()?;
        let set_norms = set_values
            .iter()
            .map(|x| Ok(x.norm_squared()?.as_rational_integer()))
            .collect::<Result<Vec<_>, CycError>>()?;
        let abs_d2 = chi_d.norm_squared()?.as_rational_integer();
        let bad = |set: usize| SpectraError::InconsistentSpectrum {
            character: chi.label().clone(),
            set,
        };
        let classes = if chi.is_principal() {
            if abs_d2 != Some(k * k * m as i64 * m as i64) {
                return Err(bad(0));
            }
            if let Some(j) = set_norms.iter().position(|&n| n != Some(k * k)) {
                return Err(bad(j));
            }
            alloc::vec![SpectrumClass::Principal; family.m()]
        } else if chi_d.is_zero() {
            if let Some(j) = set_norms.iter().position(|&n| n != Some(lambda as i64)) {
                return Err(bad(j));
            }
            alloc::vec![SpectrumClass::Zero; family.m()]
        } else if m < 3 {
            alloc::vec![SpectrumClass::Nonzero; family.m()]
        } else {
            let n = abs_d2.ok_or_else(|| bad(0))?;
            let split = alpha_beta_xy(m, lambda, Rational::int(n as i128)).map_err(|_| bad(0))?;
            let pair = AdmissiblePair {
                a: split.radical.den() as u64,
                b: split.radical.num() as u64,
            };
            if !is_admissible(pair.a, pair.b, m, lambda) {
                return Err(bad(0));
            }
            let t = table1_norms(pair, lambda);
            set_norms
                .iter()
                .enumerate()
                .map(|(j, &nj)| {
                    let nj = nj.map(|x| Rational::int(x as i128));
                    if nj == Some(t.n_plus) {
                        Ok(SpectrumClass::Plus(pair))
                    } else if nj == Some(t.n_minus) {
                        Ok(SpectrumClass::Minus(pair))
                    } else {
                        Err(bad(j))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        out.push(CharacterSpectrum {
            character: chi,
            abs_d2,
            classes,
        });
    }
    Ok(out)
}

/// Fibre sizes `a_j = #{s in S : chi(s) = zeta_p^j}` for a character of
/// prime order `p`.
pub fn char_grading(
    group: &GroupSpec,
    chi: &Character,
    set: &[GroupElement],
) -> Result<Vec<u64>, SpectraError> {
    let p = char_order(group, chi);
    if !is_prime(p) {
        return Err(SpectraError::NotPrimeOrder(p));
    }
    let step = group.exponent() / p;
    let mut counts = alloc::vec![0u64; p as usize];
    for s in set {
        group.element(s.residues())?;
        counts[(group.char_exponent(chi, s) / step) as usize] += 1;
    }
    Ok(counts)
}

/// `chi(D_j) conj(chi(D) - chi(D_j)) = -lambda` for every nonprincipal
/// character and every set.
pub fn verify_character_identity(family: &SetFamily, lambda: u64) -> bool {
    let g = family.group();
    let d = family.union();
    let e = g.exponent() as usize;
    let Ok(target) = CycInt::integer(e, -(lambda as i64)) else {
        return false;
    };
    g.characters().filter(|c| !c.is_principal()).all(|chi| {
        let Ok(chi_d) = char_sum(g, &chi, &d) else {
            return false;
        };
        family.sets().iter().all(|s| {
            char_sum(g, &chi, s)
                .and_then(|x| {
                    let rest = chi_d.sub(&x).map_err(|_| GroupError::TooLarge)?;
                    x.mul(&rest.conjugate()).map_err(|_| GroupError::TooLarge)
                })
                .is_ok_and(|lhs| lhs == target)
        })
    })
}

/// `sqrt(n)` if `n` is a perfect square.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    is_square(n).then(|| isqrt(n))
}
