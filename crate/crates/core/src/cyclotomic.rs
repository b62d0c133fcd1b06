//! Exact arithmetic in `Z[zeta_n]`.
//!
//! Elements are length-`n` coefficient vectors over the powers of `zeta_n`.
//! The representation is redundant, so equality goes through a zero test:
//! a coefficient-class check for prime powers, otherwise reduction modulo
//! the `n`-th cyclotomic polynomial.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use spin::RwLock;

use crate::numtheory::{self, factorize, legendre};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycError {
    OrderMismatch { left: usize, right: usize },
    ZeroOrder,
    NotOddPrime(u64),
    Overflow,
}

impl fmt::Display for CycError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CycError::OrderMismatch { left, right } => {
                write!(f, "cyclotomic orders differ: {left} vs {right}")
            }
            CycError::ZeroOrder => write!(f, "cyclotomic order must be positive"),
            CycError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            CycError::Overflow => write!(f, "cyclotomic coefficient overflow"),
        }
    }
}

impl core::error::Error for CycError {}

/// An element `sum c_i zeta_n^i` of `Z[zeta_n]`.
#[derive(Debug, Clone)]
pub struct CycInt {
    coeffs: Vec<i64>,
}

impl CycInt {
    pub fn zero(n: usize) -> Result<Self, CycError> {
        if n == 0 {
            return Err(CycError::ZeroOrder);
        }
        Ok(CycInt { coeffs: vec![0; n] })
    }

    /// The rational integer `c` viewed in `Z[zeta_n]`.
    pub fn integer(n: usize, c: i64) -> Result<Self, CycError> {
        let mut x = Self::zero(n)?;
        x.coeffs[0] = c;
        Ok(x)
    }

    /// `zeta_n^k`.
    pub fn root(n: usize, k: u64) -> Result<Self, CycError> {
        let mut x = Self::zero(n)?;
        x.coeffs[(k % n as u64) as usize] = 1;
        Ok(x)
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Result<Self, CycError> {
        if coeffs.is_empty() {
            return Err(CycError::ZeroOrder);
        }
        Ok(CycInt { coeffs })
    }

    /// `sum_k zeta_n^{e_k}` over the given exponents, with multiplicity.
    pub fn from_exponents<I>(n: usize, exponents: I) -> Result<Self, CycError>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut x = Self::zero(n)?;
        for e in exponents {
            let slot = &mut x.coeffs[(e % n as u64) as usize];
            *slot = slot.checked_add(1).ok_or(CycError::Overflow)?;
        }
        Ok(x)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.coeffs[i % self.order()]
    }

    fn same_order(&self, other: &Self) -> Result<(), CycError> {
        if self.order() != other.order() {
            return Err(CycError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycError> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.checked_add(*b).ok_or(CycError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(CycInt { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CycError> {
        self.add(&other.neg()?)
    }

    pub fn neg(&self) -> Result<Self, CycError> {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> Result<Self, CycError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.checked_mul(c).ok_or(CycError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(CycInt { coeffs })
    }

    /// Cyclic convolution. Zero coefficients are skipped, which keeps sparse
    /// character sums cheap.
    pub fn mul(&self, other: &Self) -> Result<Self, CycError> {
        self.same_order(other)?;
        let n = self.order();
        let mut out = vec![0i64; n];
        let rhs: Vec<(usize, i64)> = other
            .coeffs
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0)
            .collect();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(j, b) in &rhs {
                let k = (i + j) % n;
                let term = a.checked_mul(b).ok_or(CycError::Overflow)?;
                out[k] = out[k].checked_add(term).ok_or(CycError::Overflow)?;
            }
        }
        Ok(CycInt { coeffs: out })
    }

    /// Complex conjugation: `zeta^i` goes to `zeta^{-i}`.
    pub fn conjugate(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![0; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(n - i) % n] = c;
        }
        CycInt { coeffs }
    }

    /// `x * conj(x)`, the squared absolute value.
    pub fn norm_squared(&self) -> Result<Self, CycError> {
        self.mul(&self.conjugate())
    }

    pub fn is_zero(&self) -> bool {
        let n = self.order() as u64;
        let fac = factorize(n).unwrap_or_default();
        if fac.num_primes() <= 1 {
            return prime_power_is_zero(&self.coeffs, &fac);
        }
        match reduce_mod_cyclotomic(&self.coeffs) {
            Some(rem) => rem.iter().all(|&c| c == 0),
            None => tensor_canonical(&self.coeffs, &fac).iter().all(|&c| c == 0),
        }
    }

    /// The integer `c` with `x = c`, if any.
    pub fn as_rational_integer(&self) -> Option<i64> {
        let n = self.order() as u64;
        let fac = factorize(n).unwrap_or_default();
        let canon: Vec<i128> = if fac.num_primes() <= 1 {
            tensor_canonical(&self.coeffs, &fac)
        } else {
            reduce_mod_cyclotomic(&self.coeffs)
                .unwrap_or_else(|| tensor_canonical(&self.coeffs, &fac))
        };
        if canon.iter().skip(1).any(|&c| c != 0) {
            return None;
        }
        i64::try_from(canon[0]).ok()
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl Eq for CycInt {}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.order();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                f.write_str("-")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (_, 1) => write!(f, "z{n}^{i}")?,
                _ => write!(f, "{a}*z{n}^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

// For n = p^b, the element vanishes iff coefficients are constant along each
// class i mod p^{b-1}.
fn prime_power_is_zero(coeffs: &[i64], fac: &numtheory::Factorization) -> bool {
    let Some(&(p, b)) = fac.pairs().first() else {
        return coeffs[0] == 0;
    };
    let step = p.pow(b - 1) as usize;
    (0..step).all(|r| {
        let c = coeffs[r];
        (0..p as usize).all(|j| coeffs[r + j * step] == c)
    })
}

// Coordinates in the integral basis given by tensoring, for each p^b || n,
// the powers zeta_{p^b}^a whose top base-p digit is below p - 1.
fn tensor_canonical(coeffs: &[i64], fac: &numtheory::Factorization) -> Vec<i128> {
    let n = coeffs.len();
    let mut work: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
    for &(p, b) in fac.pairs() {
        let pb = p.pow(b) as usize;
        let step = pb / p as usize;
        let other = n / pb;
        // Index i corresponds to (i mod pb, i mod other) through CRT, so
        // shifting the p-part by `step` means adding `step * other * inv`.
        let inv = crt_unit(other as u64, pb as u64) as usize;
        let shift = (step * other * inv) % n;
        let top = (p as usize - 1) * shift % n;
        for i in 0..n {
            // Slot i is a top-digit slot when its p-part lies in the last
            // class of width `step`.
            let a = i % pb;
            if a / step == p as usize - 1 {
                let c = work[i];
                if c != 0 {
                    work[i] = 0;
                    // zeta^top = -(1 + zeta^shift + ... + zeta^{(p-2) shift})
                    let base = (i + n - top) % n;
                    for j in 0..p as usize - 1 {
                        work[(base + j * shift) % n] -= c;
                    }
                }
            }
        }
    }
    work
}

// The unit u with u = 1 mod m and u = 0 mod (coprime) k is k * inv_m(k); here
// we only need inv_m(k).
fn crt_unit(k: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let ord_phi = numtheory::euler_phi(m).unwrap_or(1);
    numtheory::pow_mod(k % m, ord_phi - 1, m)
}

static PHI_CACHE: RwLock<BTreeMap<u64, Arc<[i64]>>> = RwLock::new(BTreeMap::new());

/// Coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
///
/// Built from `prod_{d|n} (x^d - 1)^{mu(n/d)}`; cached per order.
pub fn cyclotomic_polynomial(n: u64) -> Arc<[i64]> {
    if let Some(poly) = PHI_CACHE.read().get(&n) {
        return poly.clone();
    }
    let poly: Arc<[i64]> = build_cyclotomic(n).into();
    // A concurrent fill computes the same polynomial, so either copy wins.
    PHI_CACHE.write().entry(n).or_insert(poly).clone()
}

fn build_cyclotomic(n: u64) -> Vec<i64> {
    let divs = numtheory::divisors(n);
    let mut num = vec![1i64];
    let mut dens = Vec::new();
    for &d in &divs {
        match mobius(n / d) {
            1 => num = mul_binomial(&num, d as usize),
            -1 => dens.push(d as usize),
            _ => {}
        }
    }
    for d in dens {
        num = div_binomial(&num, d);
    }
    num
}

fn mobius(n: u64) -> i8 {
    let fac = factorize(n).unwrap_or_default();
    if !fac.is_square_free() {
        0
    } else if fac.num_primes() % 2 == 0 {
        1
    } else {
        -1
    }
}

// poly * (x^d - 1)
fn mul_binomial(poly: &[i64], d: usize) -> Vec<i64> {
    let mut out = vec![0i64; poly.len() + d];
    for (i, &c) in poly.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

// poly / (x^d - 1), exact.
fn div_binomial(poly: &[i64], d: usize) -> Vec<i64> {
    let deg = poly.len() - 1;
    let mut q = vec![0i64; deg + 1 - d];
    let mut rem: Vec<i64> = poly.to_vec();
    for i in (0..q.len()).rev() {
        let c = rem[i + d];
        q[i] = c;
        rem[i + d] = 0;
        rem[i] += c;
    }
    q
}

// Remainder of `coeffs` modulo Phi_n, or None when i128 arithmetic overflows.
fn reduce_mod_cyclotomic(coeffs: &[i64]) -> Option<Vec<i128>> {
    let phi = cyclotomic_polynomial(coeffs.len() as u64);
    let deg = phi.len() - 1;
    let mut rem: Vec<i128> = coeffs.iter().map(|&c| c as i128).collect();
    for top in (deg..rem.len()).rev() {
        let c = rem[top];
        if c == 0 {
            continue;
        }
        let shift = top - deg;
        for (j, &pc) in phi.iter().enumerate() {
            let term = c.checked_mul(pc as i128)?;
            rem[shift + j] = rem[shift + j].checked_sub(term)?;
        }
    }
    rem.truncate(deg.max(1));
    Some(rem)
}

/// `sum_{i=1}^{p-1} (i/p) zeta_p^i`.
pub fn quadratic_gauss_sum(p: u64) -> Result<CycInt, CycError> {
    if p == 2 || !numtheory::is_prime(p) {
        return Err(CycError::NotOddPrime(p));
    }
    let coeffs = (0..p)
        .map(|i| legendre(i as i64, p) as i64)
        .collect::<Vec<_>>();
    CycInt::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    extern crate std;

    fn eval(x: &CycInt) -> (f64, f64) {
        let n = x.order() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &c) in x.coeffs().iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n;
            re += c as f64 * t.cos();
            im += c as f64 * t.sin();
        }
        (re, im)
    }

    fn z(n: usize, k: u64) -> CycInt {
        CycInt::root(n, k).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(z(5, 1).mul(&z(5, 4)).unwrap(), CycInt::integer(5, 1).unwrap());
        let x = CycInt::from_coeffs(vec![3, -1, 4, 1, -5]).unwrap();
        assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
        let ones = CycInt::from_coeffs(vec![1, 1, 1]).unwrap();
        assert_eq!(ones.mul(&z(3, 1)).unwrap().coeffs(), ones.coeffs());
        assert!(matches!(
            z(3, 1).add(&z(4, 1)),
            Err(CycError::OrderMismatch { left: 3, right: 4 })
        ));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(z(7, 1).conjugate().coeffs(), z(7, 6).coeffs());
        let c = CycInt::integer(9, 5).unwrap();
        assert_eq!(c.conjugate().coeffs(), c.coeffs());
    }

    #[test]
    fn zero_examples() {
        assert!(CycInt::from_coeffs(vec![1, 1, 1]).unwrap().is_zero());
        assert!(z(12, 2).sub(&z(12, 2)).unwrap().is_zero());
        assert!(z(12, 0).add(&z(12, 6)).unwrap().is_zero());
        assert!(!z(12, 0).is_zero());
        let (re, im) = eval(&z(12, 0).add(&z(12, 6)).unwrap());
        assert!(re.abs() < 1e-9 && im.abs() < 1e-9);
    }

    #[test]
    fn rational_examples() {
        let x = CycInt::from_exponents(5, [1, 2, 3, 4]).unwrap();
        assert_eq!(x.as_rational_integer(), Some(-1));
        assert_eq!(z(5, 1).as_rational_integer(), None);
        // Roots of unity have norm 1.
        let d1 = CycInt::from_exponents(5, [2]).unwrap();
        assert_eq!(d1.norm_squared().unwrap().as_rational_integer(), Some(1));
        // Composite order.
        let y = z(15, 5).add(&z(15, 10)).unwrap();
        assert_eq!(y.as_rational_integer(), Some(-1));
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(&*cyclotomic_polynomial(1), &[-1, 1]);
        assert_eq!(&*cyclotomic_polynomial(6), &[1, -1, 1]);
        assert_eq!(&*cyclotomic_polynomial(12), &[1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len(), 49);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn gauss_sums_square_to_signed_prime() {
        for p in (3..=50u64).filter(|&p| numtheory::is_prime(p)) {
            let g = quadratic_gauss_sum(p).unwrap();
            let sq = g.mul(&g).unwrap().as_rational_integer().unwrap();
            let expect = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            assert_eq!(sq, expect, "p = {p}");
        }
        assert_eq!(quadratic_gauss_sum(3).unwrap(), z(3, 1).sub(&z(3, 2)).unwrap());
        assert!(quadratic_gauss_sum(9).is_err());
        assert!(quadratic_gauss_sum(2).is_err());
    }

    #[test]
    fn tensor_basis_agrees_with_polynomial_reduction() {
        for n in [6usize, 10, 12, 15, 30, 36, 45, 60, 84, 105] {
            let fac = factorize(n as u64).unwrap();
            for k in 0..n as u64 {
                let x = z(n, k);
                let a = tensor_canonical(x.coeffs(), &fac).iter().all(|&c| c == 0);
                let b = reduce_mod_cyclotomic(x.coeffs()).unwrap().iter().all(|&c| c == 0);
                assert_eq!(a, b);
                assert!(!a);
            }
        }
    }

    fn element(orders: &'static [usize]) -> impl Strategy<Value = CycInt> {
        proptest::sample::select(orders).prop_flat_map(|n| {
            proptest::collection::vec(-100i64..=100, n)
                .prop_map(|c| CycInt::from_coeffs(c).unwrap())
        })
    }

    fn triple(orders: &'static [usize]) -> impl Strategy<Value = (CycInt, CycInt, CycInt)> {
        proptest::sample::select(orders).prop_flat_map(|n| {
            let v = || proptest::collection::vec(-20i64..=20, n);
            (v(), v(), v()).prop_map(|(a, b, c)| {
                (
                    CycInt::from_coeffs(a).unwrap(),
                    CycInt::from_coeffs(b).unwrap(),
                    CycInt::from_coeffs(c).unwrap(),
                )
            })
        })
    }

    const RING_ORDERS: &[usize] = &[4, 9, 12, 25, 343];

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_laws((x, y, w) in triple(RING_ORDERS)) {
            prop_assert_eq!(x.mul(&y).unwrap().mul(&w).unwrap(), x.mul(&y.mul(&w).unwrap()).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(
                x.mul(&y.add(&w).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&w).unwrap()).unwrap()
            );
            let cc = x.conjugate().conjugate();
            prop_assert_eq!(cc.coeffs(), x.coeffs());
            let nx = x.norm_squared().unwrap();
            prop_assert_eq!(nx.conjugate(), nx);
        }

        #[test]
        fn zero_test_matches_floating_point(x in element(&[3, 4, 6, 8, 12, 15, 20, 21, 30, 36, 49, 60, 77, 100, 105, 128, 135, 210, 243, 330, 385, 400])) {
            let (re, im) = eval(&x);
            let float_zero = re.abs() < 1e-6 && im.abs() < 1e-6;
            prop_assert_eq!(x.is_zero(), float_zero);
        }

        #[test]
        fn coset_sums_vanish(n in 2usize..400, k in 1usize..10) {
            // A full coset of a nontrivial subgroup of roots of unity sums to 0.
            let divs = numtheory::divisors(n as u64);
            let d = divs[k % divs.len()] as usize;
            prop_assume!(d > 1);
            let step = n / d;
            let x = CycInt::from_exponents(n, (0..d).map(|j| (j * step + k) as u64)).unwrap();
            prop_assert!(x.is_zero());
        }
    }
}
