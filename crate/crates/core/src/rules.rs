//! The nonexistence battery.
//!
//! Each rule maps a parameter tuple (and, for some rules, a group) to a
//! [`Verdict`]. A `RuledOut` verdict always carries a [`Witness`] from which
//! the contradiction can be recomputed with [`replay_witness`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;

use crate::groups::{enumerate_abelian_groups, sylow_exponent, GroupSpec};
use crate::numtheory::{
    ceil_sqrt, compute_f, divisors, euler_phi, factorize, is_prime, is_primitive_root,
    is_self_conjugate, is_square, is_square_free, isqrt, mult_ord, solve_diagonal_form,
};
use crate::sedf::Params;
use crate::spectra::{admissible_pairs, table1_norms, AdmissiblePair};

/// Stable rule identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RuleId {
    Basic,
    LiteratureLambda,
    AdmissiblePairs,
    ExponentIdeal,
    PrimitiveRoot,
    FieldDescent,
    PrimeSpectrum,
    Schmidt,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        RuleId::Basic,
        RuleId::LiteratureLambda,
        RuleId::AdmissiblePairs,
        RuleId::ExponentIdeal,
        RuleId::PrimitiveRoot,
        RuleId::FieldDescent,
        RuleId::PrimeSpectrum,
        RuleId::Schmidt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Basic => "basic",
            RuleId::LiteratureLambda => "literature_lambda",
            RuleId::AdmissiblePairs => "admissible_pairs",
            RuleId::ExponentIdeal => "exponent_ideal",
            RuleId::PrimitiveRoot => "primitive_root",
            RuleId::FieldDescent => "field_descent",
            RuleId::PrimeSpectrum => "prime_spectrum",
            RuleId::Schmidt => "schmidt",
        }
    }

    /// Whether the verdict depends on the group beyond its order.
    pub fn needs_group(self) -> bool {
        matches!(
            self,
            RuleId::ExponentIdeal | RuleId::PrimitiveRoot | RuleId::Schmidt
        )
    }

    /// Rules that restate cited results rather than derive them.
    pub fn externally_sourced(self) -> bool {
        matches!(self, RuleId::LiteratureLambda)
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s.trim())
            .ok_or_else(|| UnknownRule(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl fmt::Display for UnknownRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown rule `{}`", self.0)
    }
}

impl core::error::Error for UnknownRule {}

/// A set of enabled rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet(u16);

impl RuleSet {
    pub fn all() -> Self {
        RuleSet(RuleId::ALL.iter().fold(0, |acc, r| acc | r.bit()))
    }

    pub fn none() -> Self {
        RuleSet(0)
    }

    pub fn only(rules: &[RuleId]) -> Self {
        RuleSet(rules.iter().fold(0, |acc, r| acc | r.bit()))
    }

    pub fn contains(self, r: RuleId) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = RuleId> {
        RuleId::ALL.into_iter().filter(move |&r| self.contains(r))
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::all()
    }
}

impl FromStr for RuleSet {
    type Err = UnknownRule;

    /// Comma-separated rule ids, or `all`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(RuleSet::all());
        }
        let mut set = RuleSet::none();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            set.0 |= part.parse::<RuleId>()?.bit();
        }
        Ok(set)
    }
}

/// How algebraic integers of the quadratic subfield of `Q(zeta_p)` are
/// enumerated when `p = 3 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GaussLattice {
    /// The full ring `Z[(1 + sqrt(-p))/2]`: norms `(A^2 + p B^2)/4` with
    /// `A = B (mod 2)`.
    #[default]
    RingOfIntegers,
    /// Only `Z[sqrt(-p)]`: norms `a^2 + p b^2`. This misses half-integral
    /// elements and can eliminate realizable gradings; kept to reproduce
    /// published tables.
    Published,
}

impl FromStr for GaussLattice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ring" | "ring_of_integers" => Ok(GaussLattice::RingOfIntegers),
            "published" => Ok(GaussLattice::Published),
            other => Err(alloc::format!(
                "unknown lattice `{other}` (expected `ring` or `published`)"
            )),
        }
    }
}

/// Enumeration limits. Hitting one yields `Inconclusive`, never `RuledOut`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Bound on `|div(exp G)| * |div(lambda)|` for the exponent-ideal rule
    /// and on `|div(exp G)|` for the Schmidt rule.
    pub max_divisor_pairs: usize,
    /// Bound on the number of isomorphism classes examined in all-groups
    /// scope.
    pub max_groups: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_divisor_pairs: 1_000_000,
            max_groups: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RuleConfig {
    pub enabled: RuleSet,
    pub caps: Caps,
    pub lattice: GaussLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    RuledOut,
    Inconclusive,
    NotApplicable,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::RuledOut => "ruled_out",
            Outcome::Inconclusive => "inconclusive",
            Outcome::NotApplicable => "not_applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "reason", rename_all = "snake_case"))]
pub enum BasicReason {
    /// `(m - 1) k^2 != lambda (v - 1)`.
    CountingIdentity { lhs: u64, rhs: u64 },
    TooManyElements { mk: u64, v: u64 },
    MThreeOrFour { m: u64 },
    /// `lambda = 1` forces `m = 2` and `v = k^2 + 1`.
    LambdaOne,
    PrimeOrder { v: u64 },
    /// `lambda (k - 1)(m - 2) > (lambda - 1) k (m - 1)`.
    Inequality { lhs: u64, rhs: u64 },
    SquareFreeVMinusOne { n: u64 },
    KDividesV,
    /// A prime `p | v` with `p` coprime to `mk` and `m != 2 (mod p)`.
    ResidueOfM { p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "shape", rename_all = "snake_case"))]
pub enum LambdaShape {
    PrimeSquare { p: u64 },
    TwicePrime { p: u64 },
    /// `lambda = p q`, `q < p`, with `q < 200` and `p < q^3 / 2`.
    SmallCubeBound { p: u64, q: u64 },
    /// `lambda = p q`, `q < p`, `q` in `{3, 5, 7, 13, 19, 31}`.
    ListedSmallPrime { p: u64, q: u64 },
}

/// One way to realize `|chi(S)|^2 = n` tested against the set size `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "form", rename_all = "snake_case"))]
pub enum GaussCandidate {
    /// `chi(S) zeta^c = t`, `n = t^2`.
    Rational { t: i64 },
    /// `chi(S) zeta^c = a + b sqrt(-p)`, `n = a^2 + p b^2`.
    Diagonal { a: i64, b: i64 },
    /// `chi(S) zeta^c = (a + b sqrt(-p))/2`, `4n = a^2 + p b^2`, `a = b mod 2`.
    HalfIntegral { a: i64, b: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussAttempt {
    pub candidate: GaussCandidate,
    /// Residue `k` must have modulo `p`.
    pub residue: i64,
    pub congruent: bool,
    /// Least set size the candidate admits.
    pub min_k: i64,
}

/// Every candidate representation of `n` failed.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussFailure {
    pub p: u64,
    pub n: u64,
    pub k: u64,
    pub f: u64,
    pub attempts: Vec<GaussAttempt>,
}

/// Result of testing whether some nonnegative grading over `Z_p` with total
/// `k` has character norm `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaussTest {
    /// The test does not apply (`p | n` or `(p-1)/2` does not divide
    /// `f`), so it gives no information.
    NotApplicable,
    Realizable(GaussAttempt),
    Unrealizable(GaussFailure),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ZeroElimination {
    /// `q` is self-conjugate modulo `p` and `q^b || lambda` with `b` odd.
    OddSelfConjugate { q: u64, b: u32 },
    /// `q^b || lambda`, `n = lambda / q^b` square-free and
    /// `p > n^2 + n + 1`.
    PrimeBound { q: u64, b: u32, n: u64, bound: u64 },
    GaussSum(GaussFailure),
    /// `p` divides neither `(m-2) k` nor is `p^a | mk`, so no order-`p^s`
    /// character can annihilate the union.
    FullAnnihilation { pa: u64, mk: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum PairElimination {
    Unrealizable(GaussFailure),
    PrimeBound { n: u64, bound: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairAnalysis {
    pub pair: AdmissiblePair,
    pub n_plus: u64,
    pub n_minus: u64,
    /// Empty when the pair survives.
    pub eliminated_by: Vec<PairElimination>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NonzeroAnalysis {
    /// `(m - 2) k`, which must be divisible by `p`.
    pub m2k: u64,
    pub divisible: bool,
    pub pairs: Vec<PairAnalysis>,
}

impl NonzeroAnalysis {
    pub fn eliminated(&self) -> bool {
        !self.divisible || self.pairs.iter().all(|p| !p.eliminated_by.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Witness {
    Basic(BasicReason),
    LiteratureLambda(LambdaShape),
    NoAdmissiblePair {
        m: u64,
        lambda: u64,
    },
    /// No divisor of `lambda'` lies in `[lower, upper]`.
    ExponentIdeal {
        d: u64,
        lambda_prime: u64,
        t: u32,
        lower: u64,
        upper: u64,
    },
    /// `exp(G_p) > v / q^ceil(f/2)`.
    PrimitiveRoot {
        p: u64,
        e: u32,
        q: u64,
        f: u32,
        sylow_exponent: u64,
        q_power: u64,
    },
    FieldDescent {
        p: u64,
        a: u32,
        /// `k (m - 2)`, not divisible by `p`.
        km2: u64,
        /// `p^a` does not divide `mk`.
        pa_divides_mk: bool,
        /// A self-conjugate prime with odd valuation in `lambda`.
        odd_self_conjugate: Option<(u64, u32)>,
    },
    PrimeSpectrum {
        p: u64,
        a: u32,
        zero: Vec<ZeroElimination>,
        nonzero: NonzeroAnalysis,
    },
    /// `lambda > (2^{t-1} v)^2 F^2 / (4 d^2 phi(F))` with `F = F(d, lambda)`.
    Schmidt {
        d: u64,
        f_value: u64,
        phi_f: u64,
        t: u32,
        /// `floor` of the right-hand side.
        bound_floor: u64,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Basic(r) => match r {
                BasicReason::CountingIdentity { lhs, rhs } => {
                    write!(f, "(m-1)k^2 = {lhs} != {rhs} = lambda(v-1)")
                }
                BasicReason::TooManyElements { mk, v } => write!(f, "mk = {mk} > v = {v}"),
                BasicReason::MThreeOrFour { m } => write!(f, "m = {m} with k > 1"),
                BasicReason::LambdaOne => write!(f, "lambda = 1 needs m = 2 and v = k^2 + 1"),
                BasicReason::PrimeOrder { v } => write!(f, "v = {v} is prime"),
                BasicReason::Inequality { lhs, rhs } => {
                    write!(f, "lambda(k-1)(m-2) = {lhs} > {rhs} = (lambda-1)k(m-1)")
                }
                BasicReason::SquareFreeVMinusOne { n } => write!(f, "v-1 = {n} is square-free"),
                BasicReason::KDividesV => write!(f, "m > 4 and k | v"),
                BasicReason::ResidueOfM { p } => {
                    write!(f, "m > 4, p = {p} divides v, p coprime to mk, m != 2 mod p")
                }
            },
            Witness::LiteratureLambda(s) => match s {
                LambdaShape::PrimeSquare { p } => write!(f, "lambda = {p}^2"),
                LambdaShape::TwicePrime { p } => write!(f, "lambda = 2*{p}"),
                LambdaShape::SmallCubeBound { p, q } => {
                    write!(f, "lambda = {p}*{q}, q < 200, p < q^3/2")
                }
                LambdaShape::ListedSmallPrime { p, q } => write!(f, "lambda = {p}*{q}, q = {q}"),
            },
            Witness::NoAdmissiblePair { m, lambda } => {
                write!(f, "no admissible pair for m = {m}, lambda = {lambda}")
            }
            Witness::ExponentIdeal {
                d,
                lambda_prime,
                lower,
                upper,
                ..
            } => write!(
                f,
                "d = {d}, lambda' = {lambda_prime}: no divisor in [{lower}, {upper}]"
            ),
            Witness::PrimitiveRoot {
                p,
                q,
                sylow_exponent,
                q_power,
                ..
            } => write!(
                f,
                "q = {q} primitive mod p = {p}: exp(G_p) = {sylow_exponent} > v/{q_power}"
            ),
            Witness::FieldDescent {
                p,
                a,
                km2,
                pa_divides_mk,
                odd_self_conjugate,
            } => {
                write!(f, "p = {p}: {p} does not divide k(m-2) = {km2}")?;
                if !pa_divides_mk {
                    write!(f, " and {p}^{a} does not divide mk")?;
                } else if let Some((q, u)) = odd_self_conjugate {
                    write!(f, " and {q}^{u} || lambda with {q} self-conjugate")?;
                }
                Ok(())
            }
            Witness::PrimeSpectrum { p, zero, nonzero, .. } => {
                write!(f, "p = {p}: chi(D) = 0 excluded by ")?;
                match zero.first() {
                    Some(ZeroElimination::OddSelfConjugate { q, b }) => {
                        write!(f, "{q}^{b} || lambda")?
                    }
                    Some(ZeroElimination::PrimeBound { n, bound, .. }) => {
                        write!(f, "p > {bound} = N^2+N+1, N = {n}")?
                    }
                    Some(ZeroElimination::GaussSum(g)) => write!(f, "Gauss sums, N = {}", g.n)?,
                    Some(ZeroElimination::FullAnnihilation { pa, mk }) => {
                        write!(f, "{pa} does not divide mk = {mk}")?
                    }
                    None => write!(f, "nothing")?,
                }
                if !nonzero.divisible {
                    write!(f, "; chi(D) != 0 needs {p} | (m-2)k = {}", nonzero.m2k)
                } else {
                    write!(f, "; all {} admissible pairs eliminated", nonzero.pairs.len())
                }
            }
            Witness::Schmidt {
                d,
                f_value,
                bound_floor,
                ..
            } => write!(f, "d = {d}, F = {f_value}: lambda > {bound_floor}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Verdict {
    pub rule: RuleId,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// The rule restates cited literature.
    pub external: bool,
    /// An enumeration cap cut the rule short.
    pub capped: bool,
}

impl Verdict {
    fn new(rule: RuleId, outcome: Outcome) -> Self {
        Verdict {
            rule,
            outcome,
            witness: None,
            external: rule.externally_sourced(),
            capped: false,
        }
    }

    fn ruled_out(rule: RuleId, witness: Witness) -> Self {
        Verdict {
            witness: Some(witness),
            ..Verdict::new(rule, Outcome::RuledOut)
        }
    }

    fn inconclusive(rule: RuleId) -> Self {
        Verdict::new(rule, Outcome::Inconclusive)
    }

    fn not_applicable(rule: RuleId) -> Self {
        Verdict::new(rule, Outcome::NotApplicable)
    }

    fn capped(rule: RuleId) -> Self {
        Verdict {
            capped: true,
            ..Verdict::inconclusive(rule)
        }
    }
}

// Parameters the deeper rules assume: m >= 3, k > 1, lambda > 1 and the
// counting identity.
fn deep(p: &Params) -> bool {
    p.m >= 3 && p.k > 1 && p.lambda > 1 && p.satisfies_counting() && p.m * p.k <= p.v
}

fn mul(a: u64, b: u64) -> u64 {
    a.saturating_mul(b)
}

/// Group-independent elementary conditions.
pub fn rule_basic(params: &Params) -> Verdict {
    match basic_reason(params) {
        Some(r) => Verdict::ruled_out(RuleId::Basic, Witness::Basic(r)),
        None => Verdict::inconclusive(RuleId::Basic),
    }
}

fn basic_reason(pr: &Params) -> Option<BasicReason> {
    let Params { v, m, k, lambda } = *pr;
    if !pr.satisfies_counting() {
        return Some(BasicReason::CountingIdentity {
            lhs: mul(mul(m.saturating_sub(1), k), k),
            rhs: mul(lambda, v.saturating_sub(1)),
        });
    }
    if mul(m, k) > v {
        return Some(BasicReason::TooManyElements { mk: mul(m, k), v });
    }
    if k > 1 && (m == 3 || m == 4) {
        return Some(BasicReason::MThreeOrFour { m });
    }
    if k > 1 && lambda == 1 && !(m == 2 && v == k * k + 1) {
        return Some(BasicReason::LambdaOne);
    }
    if is_prime(v) && m > 2 && k > 1 {
        return Some(BasicReason::PrimeOrder { v });
    }
    if m >= 3 && k > lambda && lambda >= 2 {
        let lhs = lambda * (k - 1) * (m - 2);
        let rhs = (lambda - 1) * k * (m - 1);
        if lhs > rhs {
            return Some(BasicReason::Inequality { lhs, rhs });
        }
    }
    if k > 1 && v >= 2 && is_square_free(v - 1) {
        return Some(BasicReason::SquareFreeVMinusOne { n: v - 1 });
    }
    if m > 4 && k > 1 {
        if v % k == 0 {
            return Some(BasicReason::KDividesV);
        }
        let fac = factorize(v).ok()?;
        for p in fac.primes() {
            if mul(m, k) % p != 0 && m % p != 2 % p {
                return Some(BasicReason::ResidueOfM { p });
            }
        }
    }
    None
}

/// Cited shapes of `lambda` that admit no SEDF with `m > 2`.
pub fn rule_literature_lambda(params: &Params) -> Verdict {
    const LISTED: [u64; 6] = [3, 5, 7, 13, 19, 31];
    let id = RuleId::LiteratureLambda;
    if params.m <= 2 {
        return Verdict::not_applicable(id);
    }
    let l = params.lambda;
    let Ok(fac) = factorize(l) else {
        return Verdict::not_applicable(id);
    };
    let shape = match fac.pairs() {
        &[(p, 2)] => Some(LambdaShape::PrimeSquare { p }),
        &[(2, 1), (p, 1)] => Some(LambdaShape::TwicePrime { p }),
        &[(q, 1), (p, 1)] => {
            if q < 200 && (p as u128) * 2 < (q as u128).pow(3) {
                Some(LambdaShape::SmallCubeBound { p, q })
            } else if LISTED.contains(&q) {
                Some(LambdaShape::ListedSmallPrime { p, q })
            } else {
                None
            }
        }
        _ => None,
    };
    match shape {
        Some(s) => Verdict::ruled_out(id, Witness::LiteratureLambda(s)),
        None => Verdict::inconclusive(id),
    }
}

/// Some nonprincipal character is nonzero on the union, and it induces an
/// admissible pair.
pub fn rule_admissible_pairs(params: &Params) -> Verdict {
    let id = RuleId::AdmissiblePairs;
    if params.m < 3 || params.k <= 1 {
        return Verdict::not_applicable(id);
    }
    match admissible_pairs(params.m, params.lambda) {
        Ok(p) if p.is_empty() => Verdict::ruled_out(
            id,
            Witness::NoAdmissiblePair {
                m: params.m,
                lambda: params.lambda,
            },
        ),
        _ => Verdict::inconclusive(id),
    }
}

// Divisors of exp(G) above 2, largest first.
fn big_divisors_desc(group: &GroupSpec) -> Vec<u64> {
    let mut d: Vec<u64> = divisors(group.exponent())
        .into_iter()
        .filter(|&d| d > 2)
        .collect();
    d.reverse();
    d
}

fn num_primes(n: u64) -> u32 {
    factorize(n).map_or(0, |f| f.num_primes() as u32)
}

/// For `d | exp(G)` and a self-conjugate `lambda' | lambda` coprime to `d`,
/// some divisor of `lambda'` lies in `[sqrt(lambda'), 2^{t-1} v / d]`.
pub fn rule_exponent_ideal(params: &Params, group: &GroupSpec, caps: &Caps) -> Verdict {
    let id = RuleId::ExponentIdeal;
    if !deep(params) {
        return Verdict::not_applicable(id);
    }
    let ds = big_divisors_desc(group);
    let mut lambdas = divisors(params.lambda);
    lambdas.reverse();
    if ds.len().saturating_mul(lambdas.len()) > caps.max_divisor_pairs {
        return Verdict::capped(id);
    }
    for &d in &ds {
        for &lp in &lambdas {
            if lp.gcd(&d) != 1 || !is_self_conjugate(lp, d) {
                continue;
            }
            if let Some((lower, upper)) = empty_divisor_window(params.v, d, lp) {
                return Verdict::ruled_out(
                    id,
                    Witness::ExponentIdeal {
                        d,
                        lambda_prime: lp,
                        t: num_primes(d),
                        lower,
                        upper,
                    },
                );
            }
        }
    }
    Verdict::inconclusive(id)
}

/// The window `[ceil(sqrt(lambda')), floor(2^{t-1} v / d)]`, `t` the number
/// of primes of `d`, when it contains no divisor of `lambda'`.
pub fn empty_divisor_window(v: u64, d: u64, lambda_prime: u64) -> Option<(u64, u64)> {
    let t = num_primes(d);
    let scaled = 1u128.checked_shl(t.checked_sub(1)?)? * v as u128;
    let upper = u64::try_from(scaled / d as u128).ok()?;
    let hit = divisors(lambda_prime)
        .into_iter()
        .any(|c| (c as u128) * (c as u128) >= lambda_prime as u128 && c <= upper);
    (!hit).then(|| (ceil_sqrt(lambda_prime), upper))
}

/// `exp(G_p) <= v / q^ceil(f/2)` whenever `q^f || lambda` and `q` is a
/// primitive root modulo `p^e || v`.
pub fn rule_primitive_root(params: &Params, group: &GroupSpec) -> Verdict {
    let id = RuleId::PrimitiveRoot;
    if !deep(params) {
        return Verdict::not_applicable(id);
    }
    let (Ok(vf), Ok(lf)) = (factorize(params.v), factorize(params.lambda)) else {
        return Verdict::not_applicable(id);
    };
    let mut applicable = false;
    for &(p, e) in vf.pairs() {
        let pe = p.pow(e);
        for &(q, f) in lf.pairs() {
            if q == p || !is_primitive_root(q, pe).unwrap_or(false) {
                continue;
            }
            applicable = true;
            let q_power = q.saturating_pow(f.div_ceil(2));
            let sylow = sylow_exponent(group, p);
            if (sylow as u128) * (q_power as u128) > params.v as u128 {
                return Verdict::ruled_out(
                    id,
                    Witness::PrimitiveRoot {
                        p,
                        e,
                        q,
                        f,
                        sylow_exponent: sylow,
                        q_power,
                    },
                );
            }
        }
    }
    if applicable {
        Verdict::inconclusive(id)
    } else {
        Verdict::not_applicable(id)
    }
}

/// For odd `p^a || v`: `p | k(m-2)`, or else `p^a | mk` and every prime
/// self-conjugate modulo `p` has even valuation in `lambda`.
pub fn rule_field_descent(params: &Params) -> Verdict {
    let id = RuleId::FieldDescent;
    if !deep(params) {
        return Verdict::not_applicable(id);
    }
    let (Ok(vf), Ok(lf)) = (factorize(params.v), factorize(params.lambda)) else {
        return Verdict::not_applicable(id);
    };
    let km2 = params.k * (params.m - 2);
    let mk = params.m * params.k;
    for &(p, a) in vf.pairs() {
        if p == 2 || km2 % p == 0 {
            continue;
        }
        let pa_divides_mk = mk % p.pow(a) == 0;
        let odd = lf
            .pairs()
            .iter()
            .find(|&&(q, u)| q != p && u % 2 == 1 && is_self_conjugate(q, p))
            .copied();
        if !pa_divides_mk || odd.is_some() {
            return Verdict::ruled_out(
                id,
                Witness::FieldDescent {
                    p,
                    a,
                    km2,
                    pa_divides_mk,
                    odd_self_conjugate: if pa_divides_mk { odd } else { None },
                },
            );
        }
    }
    Verdict::inconclusive(id)
}

fn gauss_f(p: u64, n: u64) -> u64 {
    let Ok(fac) = factorize(n) else {
        return p - 1;
    };
    fac.primes()
        .fold(p - 1, |acc, q| acc.gcd(&mult_ord(q, p).unwrap_or(p - 1)))
}

/// Tests whether some `S = sum a_i g^i` in `Z[Z_p]`, `a_i >= 0`, `sum a_i =
/// k`, can have `|chi(S)|^2 = n` for a faithful character `chi`, using the
/// structure of `chi(S)` forced when `(p-1)/2` divides `f`.
pub fn gauss_sum_test(p: u64, n: u64, k: u64, lattice: GaussLattice) -> GaussTest {
    if p < 3 || n == 0 || n % p == 0 {
        return GaussTest::NotApplicable;
    }
    let f = gauss_f(p, n);
    if f % ((p - 1) / 2) != 0 {
        return GaussTest::NotApplicable;
    }
    let (pi, ki) = (p as i64, k as i64);
    let mut attempts = Vec::new();
    let mut try_one = |candidate: GaussCandidate, residue: i64, min_k: i64| {
        let congruent = (ki - residue).rem_euclid(pi) == 0;
        let a = GaussAttempt {
            candidate,
            residue: residue.rem_euclid(pi),
            congruent,
            min_k,
        };
        let ok = congruent && ki >= min_k;
        attempts.push(a.clone());
        ok.then_some(a)
    };
    // Rational values t with n = t^2.
    if is_square(n) {
        let r = isqrt(n) as i64;
        for t in [r, -r] {
            if let Some(a) = try_one(GaussCandidate::Rational { t }, t, t * (1 - pi)) {
                return GaussTest::Realizable(a);
            }
        }
    }
    if p % 4 == 3 {
        match lattice {
            GaussLattice::Published => {
                for (a, b) in solve_diagonal_form(p, n) {
                    let b = b as i64;
                    for b in signed(b) {
                        let min_k = (a + pi * b).max(a - pi * b).max(a * (1 - pi));
                        if let Some(x) = try_one(GaussCandidate::Diagonal { a, b }, a, min_k) {
                            return GaussTest::Realizable(x);
                        }
                    }
                }
            }
            GaussLattice::RingOfIntegers => {
                for (a, b) in solve_diagonal_form(p, 4 * n) {
                    let b = b as i64;
                    if (a - b) % 2 != 0 {
                        continue;
                    }
                    for b in signed(b) {
                        // k = p y + (a + p b)/2 with every fibre nonnegative.
                        let twice = (a + pi * b).max(a - pi * b).max(a * (1 - pi));
                        let min_k = Integer::div_ceil(&twice, &2);
                        let residue = (a + pi * b) / 2;
                        let cand = GaussCandidate::HalfIntegral { a, b };
                        if let Some(x) = try_one(cand, residue, min_k) {
                            return GaussTest::Realizable(x);
                        }
                    }
                }
            }
        }
    } else if is_square(n) {
        let r = isqrt(n) as i64;
        for a in [r, -r] {
            let min_k = a.max(a * (1 - pi));
            if let Some(x) = try_one(GaussCandidate::Diagonal { a, b: 0 }, a, min_k) {
                return GaussTest::Realizable(x);
            }
        }
    }
    GaussTest::Unrealizable(GaussFailure {
        p,
        n,
        k,
        f,
        attempts,
    })
}

fn signed(b: i64) -> impl Iterator<Item = i64> {
    let neg = (b != 0).then_some(-b);
    core::iter::once(b).chain(neg)
}

// N^2 + N + 1 bound for a square-free N > 1 coprime to p; Some(bound) when
// it excludes p.
fn prime_bound_excludes(p: u64, n: u64) -> Option<u64> {
    if n <= 1 || n % p == 0 || !is_square_free(n) {
        return None;
    }
    let bound = (n as u128) * (n as u128) + n as u128 + 1;
    ((p as u128) > bound).then_some(bound as u64)
}

/// Two-scenario analysis over characters of each odd prime order `p | v`
/// with `p` coprime to `lambda`.
pub fn rule_prime_spectrum(params: &Params, lattice: GaussLattice) -> Verdict {
    let id = RuleId::PrimeSpectrum;
    if !deep(params) {
        return Verdict::not_applicable(id);
    }
    let (Ok(vf), Ok(lf)) = (factorize(params.v), factorize(params.lambda)) else {
        return Verdict::not_applicable(id);
    };
    let Ok(pairs) = admissible_pairs(params.m, params.lambda) else {
        return Verdict::not_applicable(id);
    };
    let Params { m, k, lambda, .. } = *params;
    for &(p, a) in vf.pairs() {
        if p == 2 || lambda % p == 0 {
            continue;
        }
        // Some order-p character vanishes on D.
        let mut zero = Vec::new();
        if let GaussTest::Unrealizable(g) = gauss_sum_test(p, lambda, k, lattice) {
            zero.push(ZeroElimination::GaussSum(g));
        }
        for &(q, b) in lf.pairs() {
            if !is_self_conjugate(q, p) {
                continue;
            }
            if b % 2 == 1 {
                zero.push(ZeroElimination::OddSelfConjugate { q, b });
            } else {
                let n = lambda / q.pow(b);
                if let Some(bound) = prime_bound_excludes(p, n) {
                    zero.push(ZeroElimination::PrimeBound { q, b, n, bound });
                }
            }
        }
        let m2k = (m - 2) * k;
        let pa = p.pow(a);
        if m2k % p != 0 && (m * k) % pa != 0 {
            zero.push(ZeroElimination::FullAnnihilation { pa, mk: m * k });
        }
        // Every order-p character is nonzero on D.
        let pair_analysis = pairs
            .iter()
            .map(|&pair| analyse_pair(p, k, lambda, pair, lattice))
            .collect();
        let nonzero = NonzeroAnalysis {
            m2k,
            divisible: m2k % p == 0,
            pairs: pair_analysis,
        };
        if !zero.is_empty() && nonzero.eliminated() {
            return Verdict::ruled_out(
                id,
                Witness::PrimeSpectrum {
                    p,
                    a,
                    zero,
                    nonzero,
                },
            );
        }
    }
    Verdict::inconclusive(id)
}

fn analyse_pair(p: u64, k: u64, lambda: u64, pair: AdmissiblePair, lattice: GaussLattice) -> PairAnalysis {
    let t = table1_norms(pair, lambda);
    let n_plus = t.n_plus.to_integer().unwrap_or(0) as u64;
    let n_minus = t.n_minus.to_integer().unwrap_or(0) as u64;
    let mut eliminated_by = Vec::new();
    for n in [n_plus, n_minus] {
        if let GaussTest::Unrealizable(g) = gauss_sum_test(p, n, k, lattice) {
            eliminated_by.push(PairElimination::Unrealizable(g));
        }
    }
    let AdmissiblePair { a, b } = pair;
    let diff2 = b * b - a * a;
    let nx = if (a + b).gcd(&(2 * a)) == 1 {
        lambda / diff2
    } else {
        4 * lambda / diff2
    };
    if let Some(bound) = prime_bound_excludes(p, nx) {
        eliminated_by.push(PairElimination::PrimeBound { n: nx, bound });
    }
    PairAnalysis {
        pair,
        n_plus,
        n_minus,
        eliminated_by,
    }
}

/// `lambda <= (2^{t-1} v)^2 F^2 / (4 d^2 phi(F))` for each `d | exp(G)`,
/// `d > 2`, with `F = F(d, lambda)`.
pub fn rule_schmidt(params: &Params, group: &GroupSpec, caps: &Caps) -> Verdict {
    let id = RuleId::Schmidt;
    if !deep(params) {
        return Verdict::not_applicable(id);
    }
    let ds = big_divisors_desc(group);
    if ds.len() > caps.max_divisor_pairs {
        return Verdict::capped(id);
    }
    for d in ds {
        let Ok(f_value) = compute_f(d, params.lambda) else {
            continue;
        };
        let Ok(phi_f) = euler_phi(f_value) else {
            continue;
        };
        let t = num_primes(d);
        let Some(cmp) = schmidt_compare(params.v, params.lambda, d, f_value, phi_f, t) else {
            continue;
        };
        if let Some(bound_floor) = cmp {
            return Verdict::ruled_out(
                id,
                Witness::Schmidt {
                    d,
                    f_value,
                    phi_f,
                    t,
                    bound_floor,
                },
            );
        }
    }
    Verdict::inconclusive(id)
}

// Some(Some(floor)) when lambda exceeds the bound, Some(None) when it does
// not, None on overflow.
fn schmidt_compare(v: u64, lambda: u64, d: u64, f: u64, phi_f: u64, t: u32) -> Option<Option<u64>> {
    let top = 1u128.checked_shl(t.checked_sub(1)?)?.checked_mul(v as u128)?;
    let num = top.checked_mul(top)?.checked_mul(f as u128)?.checked_mul(f as u128)?;
    let den = 4u128
        .checked_mul(d as u128)?
        .checked_mul(d as u128)?
        .checked_mul(phi_f as u128)?;
    let lhs = (lambda as u128).checked_mul(den)?;
    Some((lhs > num).then(|| (num / den) as u64))
}

/// Runs one rule. Group-dependent rules need `group`.
pub fn evaluate(rule: RuleId, params: &Params, group: Option<&GroupSpec>, config: &RuleConfig) -> Verdict {
    match (rule, group) {
        (RuleId::Basic, _) => rule_basic(params),
        (RuleId::LiteratureLambda, _) => rule_literature_lambda(params),
        (RuleId::AdmissiblePairs, _) => rule_admissible_pairs(params),
        (RuleId::FieldDescent, _) => rule_field_descent(params),
        (RuleId::PrimeSpectrum, _) => rule_prime_spectrum(params, config.lattice),
        (RuleId::ExponentIdeal, Some(g)) => rule_exponent_ideal(params, g, &config.caps),
        (RuleId::PrimitiveRoot, Some(g)) => rule_primitive_root(params, g),
        (RuleId::Schmidt, Some(g)) => rule_schmidt(params, g, &config.caps),
        (_, None) => Verdict::not_applicable(rule),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scope {
    Group(GroupSpec),
    AllAbelian,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Group(g) => write!(f, "group:{g}"),
            Scope::AllAbelian => f.write_str("all_abelian"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupReport {
    pub group: GroupSpec,
    pub verdicts: Vec<Verdict>,
}

impl GroupReport {
    pub fn ruled_out(&self) -> bool {
        self.verdicts.iter().any(|v| v.outcome == Outcome::RuledOut)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BatteryReport {
    pub params: Params,
    pub scope: Scope,
    /// Verdicts of rules that see only the parameters.
    pub verdicts: Vec<Verdict>,
    /// Group-dependent verdicts, one entry per isomorphism class examined.
    pub groups: Vec<GroupReport>,
    /// The class count exceeded the cap and groups were not examined.
    pub groups_capped: bool,
    pub overall: Outcome,
}

impl BatteryReport {
    /// Rules with at least one `RuledOut` verdict, in rule order.
    pub fn firing_rules(&self) -> Vec<RuleId> {
        let mut out: Vec<RuleId> = Vec::new();
        let all = self
            .verdicts
            .iter()
            .chain(self.groups.iter().flat_map(|g| g.verdicts.iter()));
        for v in all {
            if v.outcome == Outcome::RuledOut && !out.contains(&v.rule) {
                out.push(v.rule);
            }
        }
        out.sort();
        out
    }

    /// The first `RuledOut` verdict of the given rule.
    pub fn witness_of(&self, rule: RuleId) -> Option<&Witness> {
        self.verdicts
            .iter()
            .chain(self.groups.iter().flat_map(|g| g.verdicts.iter()))
            .find(|v| v.rule == rule && v.outcome == Outcome::RuledOut)
            .and_then(|v| v.witness.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BatteryError {
    OrderMismatch { group_order: u64, v: u64 },
    ZeroParameter,
}

impl fmt::Display for BatteryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatteryError::OrderMismatch { group_order, v } => {
                write!(f, "group has order {group_order} but v = {v}")
            }
            BatteryError::ZeroParameter => write!(f, "v, m, k and lambda must be positive"),
        }
    }
}

impl core::error::Error for BatteryError {}

/// Evaluates every enabled rule. In all-groups scope the tuple counts as
/// ruled out iff a parameter-only rule fires or every isomorphism class
/// is excluded by some group rule.
pub fn run_battery(params: &Params, scope: &Scope, config: &RuleConfig) -> Result<BatteryReport, BatteryError> {
    if params.v == 0 || params.m == 0 || params.k == 0 || params.lambda == 0 {
        return Err(BatteryError::ZeroParameter);
    }
    if let Scope::Group(g) = scope {
        if g.order() != params.v {
            return Err(BatteryError::OrderMismatch {
                group_order: g.order(),
                v: params.v,
            });
        }
    }
    let verdicts: Vec<Verdict> = config
        .enabled
        .iter()
        .filter(|r| !r.needs_group())
        .map(|r| evaluate(r, params, None, config))
        .collect();
    let group_rules: Vec<RuleId> = config.enabled.iter().filter(|r| r.needs_group()).collect();
    let mut groups_capped = false;
    let classes: Vec<GroupSpec> = match scope {
        Scope::Group(g) => alloc::vec![g.clone()],
        Scope::AllAbelian => {
            if group_class_count(params.v) > config.caps.max_groups as u64 {
                groups_capped = true;
                Vec::new()
            } else {
                enumerate_abelian_groups(params.v)
            }
        }
    };
    let groups: Vec<GroupReport> = if group_rules.is_empty() {
        Vec::new()
    } else {
        classes
            .into_iter()
            .map(|g| GroupReport {
                verdicts: group_rules
                    .iter()
                    .map(|&r| evaluate(r, params, Some(&g), config))
                    .collect(),
                group: g,
            })
            .collect()
    };
    let independent = verdicts.iter().any(|v| v.outcome == Outcome::RuledOut);
    let all_groups = !groups_capped && !groups.is_empty() && groups.iter().all(|g| g.ruled_out());
    let overall = if independent || all_groups {
        Outcome::RuledOut
    } else {
        Outcome::Inconclusive
    };
    Ok(BatteryReport {
        params: *params,
        scope: scope.clone(),
        verdicts,
        groups,
        groups_capped,
        overall,
    })
}

/// Number of abelian groups of order `v`: the product of partition counts
/// of the prime exponents.
pub fn group_class_count(v: u64) -> u64 {
    fn partitions(n: u32) -> u64 {
        let n = n as usize;
        let mut p = alloc::vec![0u64; n + 1];
        p[0] = 1;
        for part in 1..=n {
            for i in part..=n {
                p[i] = p[i].saturating_add(p[i - part]);
            }
        }
        p[n]
    }
    factorize(v).map_or(0, |f| {
        f.pairs()
            .iter()
            .fold(1u64, |acc, &(_, e)| acc.saturating_mul(partitions(e)))
    })
}

/// Recomputes the contradiction recorded in a witness from the raw
/// parameters. Returns false if the witness does not establish it.
pub fn replay_witness(params: &Params, group: Option<&GroupSpec>, witness: &Witness) -> bool {
    let Params { v, m, k, lambda } = *params;
    match witness {
        Witness::Basic(r) => replay_basic(params, r),
        Witness::LiteratureLambda(s) => {
            m > 2
                && match *s {
                    LambdaShape::PrimeSquare { p } => is_prime(p) && p * p == lambda,
                    LambdaShape::TwicePrime { p } => is_prime(p) && 2 * p == lambda,
                    LambdaShape::SmallCubeBound { p, q } => {
                        is_prime(p) && is_prime(q) && q < p && p * q == lambda && q < 200 && 2 * p < q.pow(3)
                    }
                    LambdaShape::ListedSmallPrime { p, q } => {
                        is_prime(p) && is_prime(q) && q < p && p * q == lambda && [3, 5, 7, 13, 19, 31].contains(&q)
                    }
                }
        }
        Witness::NoAdmissiblePair { .. } => {
            // Naive double loop over 0 < a < b <= m - 2.
            m >= 3
                && k > 1
                && (2..=m - 2).all(|b| {
                    (1..b).all(|a| !crate::spectra::is_admissible(a, b, m, lambda))
                })
        }
        &Witness::ExponentIdeal {
            d,
            lambda_prime,
            t,
            ..
        } => {
            let Some(g) = group else { return false };
            deep(params)
                && d > 2
                && g.exponent() % d == 0
                && lambda % lambda_prime == 0
                && lambda_prime.gcd(&d) == 1
                && is_self_conjugate(lambda_prime, d)
                && t == num_primes(d)
                && (1..=lambda_prime).filter(|c| lambda_prime % c == 0).all(|c| {
                    c * c < lambda_prime || (c as u128) * (d as u128) > ((1u128 << (t - 1)) * v as u128)
                })
        }
        &Witness::PrimitiveRoot {
            p,
            e,
            q,
            f,
            sylow_exponent: se,
            ..
        } => {
            let Some(g) = group else { return false };
            let vp = crate::numtheory::valuation(v, p).unwrap_or(0);
            let lq = crate::numtheory::valuation(lambda, q).unwrap_or(0);
            deep(params)
                && vp == e
                && lq == f
                && f > 0
                && is_primitive_root(q, p.pow(e)).unwrap_or(false)
                && sylow_exponent(g, p) == se
                && (se as u128) * (q as u128).pow(f.div_ceil(2)) > v as u128
        }
        &Witness::FieldDescent {
            p,
            a,
            pa_divides_mk,
            odd_self_conjugate,
            ..
        } => {
            let vp = crate::numtheory::valuation(v, p).unwrap_or(0);
            deep(params)
                && p > 2
                && vp == a
                && (k * (m - 2)) % p != 0
                && ((m * k) % p.pow(a) == 0) == pa_divides_mk
                && (!pa_divides_mk
                    || odd_self_conjugate.is_some_and(|(q, u)| {
                        q != p
                            && crate::numtheory::valuation(lambda, q) == Ok(u)
                            && u % 2 == 1
                            && is_self_conjugate(q, p)
                    }))
        }
        Witness::PrimeSpectrum {
            p, zero, nonzero, ..
        } => replay_prime_spectrum(params, *p, zero, nonzero),
        &Witness::Schmidt { d, t, .. } => {
            let Some(g) = group else { return false };
            let Ok(f) = compute_f(d, lambda) else { return false };
            let Ok(phi) = euler_phi(f) else { return false };
            deep(params)
                && d > 2
                && g.exponent() % d == 0
                && t == num_primes(d)
                && matches!(schmidt_compare(v, lambda, d, f, phi, t), Some(Some(_)))
        }
    }
}

fn replay_basic(pr: &Params, r: &BasicReason) -> bool {
    let Params { v, m, k, lambda } = *pr;
    match *r {
        BasicReason::CountingIdentity { .. } => !pr.satisfies_counting(),
        BasicReason::TooManyElements { .. } => m * k > v,
        BasicReason::MThreeOrFour { .. } => k > 1 && (m == 3 || m == 4),
        BasicReason::LambdaOne => k > 1 && lambda == 1 && !(m == 2 && v == k * k + 1),
        BasicReason::PrimeOrder { .. } => is_prime(v) && m > 2 && k > 1,
        BasicReason::Inequality { .. } => {
            m >= 3 && k > lambda && lambda >= 2 && lambda * (k - 1) * (m - 2) > (lambda - 1) * k * (m - 1)
        }
        BasicReason::SquareFreeVMinusOne { n } => {
            k > 1 && n == v - 1 && (2..=isqrt(n)).all(|d| n % (d * d) != 0)
        }
        BasicReason::KDividesV => m > 4 && k > 1 && v % k == 0,
        BasicReason::ResidueOfM { p } => {
            m > 4 && k > 1 && is_prime(p) && v % p == 0 && (m * k) % p != 0 && m % p != 2 % p
        }
    }
}

fn replay_gauss(g: &GaussFailure, lattice_ok: impl Fn(&GaussFailure) -> bool) -> bool {
    // Each listed attempt must genuinely fail, and the list must be the
    // full set of candidates for at least one lattice.
    g.attempts.iter().all(|a| {
        let congruent = (g.k as i64 - a.residue).rem_euclid(g.p as i64) == 0;
        congruent == a.congruent && !(a.congruent && g.k as i64 >= a.min_k)
    }) && lattice_ok(g)
}

fn replay_prime_spectrum(pr: &Params, p: u64, zero: &[ZeroElimination], nonzero: &NonzeroAnalysis) -> bool {
    let Params { v, m, k, lambda } = *pr;
    if !deep(pr) || p < 3 || v % p != 0 || lambda % p == 0 || zero.is_empty() {
        return false;
    }
    let complete = |g: &GaussFailure| {
        [GaussLattice::RingOfIntegers, GaussLattice::Published]
            .into_iter()
            .any(|l| gauss_sum_test(g.p, g.n, g.k, l) == GaussTest::Unrealizable(g.clone()))
    };
    let pa = p.pow(crate::numtheory::valuation(v, p).unwrap_or(0));
    let zero_ok = zero.iter().all(|z| match z {
        ZeroElimination::GaussSum(g) => g.p == p && g.n == lambda && g.k == k && replay_gauss(g, complete),
        &ZeroElimination::OddSelfConjugate { q, b } => {
            crate::numtheory::valuation(lambda, q) == Ok(b) && b % 2 == 1 && is_self_conjugate(q, p)
        }
        &ZeroElimination::PrimeBound { q, b, n, .. } => {
            crate::numtheory::valuation(lambda, q) == Ok(b)
                && is_self_conjugate(q, p)
                && n * q.pow(b) == lambda
                && prime_bound_excludes(p, n).is_some()
        }
        &ZeroElimination::FullAnnihilation { .. } => ((m - 2) * k) % p != 0 && (m * k) % pa != 0,
    });
    let nonzero_ok = if ((m - 2) * k) % p != 0 {
        true
    } else {
        let Ok(pairs) = admissible_pairs(m, lambda) else { return false };
        pairs.len() == nonzero.pairs.len()
            && pairs.iter().zip(&nonzero.pairs).all(|(pair, an)| {
                *pair == an.pair
                    && !an.eliminated_by.is_empty()
                    && an.eliminated_by.iter().all(|e| match e {
                        PairElimination::Unrealizable(g) => {
                            g.p == p && g.k == k && (g.n == an.n_plus || g.n == an.n_minus) && replay_gauss(g, complete)
                        }
                        PairElimination::PrimeBound { n, .. } => prime_bound_excludes(p, *n).is_some(),
                    })
            })
    };
    zero_ok && nonzero_ok
}
