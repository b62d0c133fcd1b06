//! Exact elementary number theory on `u64` values.
//!
//! Every product that could leave the 64-bit range is carried out in `u128`
//! and checked on the way back; nothing here wraps silently.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::{Integer, Roots};

/// Failure modes of the arithmetic helpers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// The argument must be at least one.
    Zero,
    /// An argument fell under its lower bound.
    TooSmall {
        what: &'static str,
        min: u64,
        got: u64,
    },
    NotCoprime {
        a: u64,
        n: u64,
    },
    NotPrime(u64),
    /// An intermediate value left the supported range.
    Overflow,
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::Zero => write!(f, "argument must be a positive integer"),
            ArithError::TooSmall { what, min, got } => {
                write!(f, "{what} must be at least {min}, got {got}")
            }
            ArithError::NotCoprime { a, n } => write!(f, "{a} is not coprime to {n}"),
            ArithError::NotPrime(p) => write!(f, "{p} is not prime"),
            ArithError::Overflow => write!(f, "arithmetic overflow"),
        }
    }
}

impl core::error::Error for ArithError {}

/// Prime factorization with primes in increasing order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime divisors.
    pub fn num_primes(&self) -> usize {
        self.pairs.len()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.pairs
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The factored integer.
    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn is_square_free(&self) -> bool {
        self.pairs.iter().all(|&(_, e)| e == 1)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod modulus`; the result for modulus 1 is 0.
pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, modulus);
        }
        b = mul_mod(b, b, modulus);
        exp >>= 1;
    }
    result
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: u64 = 1_000_000;

// Brent's variant of Pollard rho; `n` must be an odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut seed = 1u64;
    loop {
        seed += 1;
        let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Exact prime factorization: trial division up to 10^6, Pollard rho beyond.
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            pairs.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut p = 5u64;
    while p <= TRIAL_LIMIT && p * p <= rest {
        push(p, &mut rest);
        push(p + 2, &mut rest);
        p += 6;
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_into(rest, &mut big);
        big.sort_unstable();
        for q in big {
            match pairs.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => pairs.push((q, 1)),
            }
        }
    }
    pairs.sort_unstable();
    Ok(Factorization { pairs })
}

pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    let fac = factorize(n)?;
    Ok(fac
        .pairs()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product())
}

/// Multiplicative order of `t` modulo `s`.
///
/// Starts from `phi(s)` and strips prime factors while the power stays at 1.
pub fn mult_ord(t: u64, s: u64) -> Result<u64, ArithError> {
    if s == 0 {
        return Err(ArithError::Zero);
    }
    if s == 1 {
        return Ok(1);
    }
    let t = t % s;
    if t.gcd(&s) != 1 {
        return Err(ArithError::NotCoprime { a: t, n: s });
    }
    let phi = euler_phi(s)?;
    let mut order = phi;
    for (p, _) in factorize(phi)?.pairs().iter().copied() {
        while order % p == 0 && pow_mod(t, order / p, s) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Whether every prime divisor `p` of `n` has a power congruent to -1 modulo
/// the `p`-free part of `w`.
pub fn is_self_conjugate(n: u64, w: u64) -> bool {
    let Ok(fac) = factorize(n.max(1)) else {
        return true;
    };
    let ok = fac.primes().all(|p| prime_is_self_conjugate(p, w));
    ok
}

fn prime_is_self_conjugate(p: u64, w: u64) -> bool {
    let mut u = w.max(1);
    while u % p == 0 {
        u /= p;
    }
    if u <= 2 {
        return true;
    }
    // -1 lies in <p> iff the order is even and the half power is -1.
    match mult_ord(p, u) {
        Ok(ord) => ord % 2 == 0 && pow_mod(p, ord / 2, u) == u - 1,
        Err(_) => false,
    }
}

/// Largest `a` with `p^a | n`.
pub fn valuation(n: u64, p: u64) -> Result<u32, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut a = 0;
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
        a += 1;
    }
    Ok(a)
}

/// All positive divisors in increasing order; empty for `n = 0`.
pub fn divisors(n: u64) -> Vec<u64> {
    let Ok(fac) = factorize(n) else {
        return Vec::new();
    };
    let mut out = vec![1u64];
    for &(p, e) in fac.pairs() {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_square_free(n: u64) -> bool {
    factorize(n).is_ok_and(|f| f.is_square_free())
}

pub fn is_primitive_root(q: u64, n: u64) -> Result<bool, ArithError> {
    if n < 2 {
        return Err(ArithError::TooSmall {
            what: "modulus",
            min: 2,
            got: n,
        });
    }
    Ok(mult_ord(q, n)? == euler_phi(n)?)
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn isqrt(n: u64) -> u64 {
    n.sqrt()
}

pub fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// Smallest `c` with `c^2 >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// All integer solutions of `a^2 + p*b^2 = n` with `b >= 0`.
///
/// Both signs of `a` are listed when `a != 0`. Solutions come ordered by `b`,
/// the non-negative `a` first.
pub fn solve_diagonal_form(p: u64, n: u64) -> Vec<(i64, u64)> {
    let mut out = Vec::new();
    if p == 0 {
        return out;
    }
    let mut b = 0u64;
    loop {
        let pb2 = (p as u128) * (b as u128) * (b as u128);
        if pb2 > n as u128 {
            break;
        }
        let rest = n - pb2 as u64;
        if is_square(rest) {
            let a = isqrt(rest) as i64;
            out.push((a, b));
            if a != 0 {
                out.push((-a, b));
            }
        }
        b += 1;
    }
    out
}

/// The descent modulus `F(M, N)`.
///
/// Writing `M = prod p_i^{c_i}`, each `p_i` receives the least exponent
/// `b_i` in `[1, c_i]` such that every prime `q | N` satisfies one of:
/// `q = p_i` with `(p_i, b_i) != (2, 1)`; `b_i = c_i`; or `q != p_i` with
/// `q^{ord_{m_q}(q)} != 1 (mod p_i^{b_i + 1})`. For `N = 1` this is the
/// radical of `M`.
pub fn compute_f(m: u64, n: u64) -> Result<u64, ArithError> {
    if m < 2 {
        return Err(ArithError::TooSmall {
            what: "M",
            min: 2,
            got: m,
        });
    }
    let m_fac = factorize(m)?;
    let n_fac = factorize(n)?;
    let m_odd = m % 2 == 1;
    let mut result = 1u64;
    for &(p, c) in m_fac.pairs() {
        let mut b = 1u32;
        for q in n_fac.primes() {
            let needed = if q == p {
                if p == 2 {
                    2
                } else {
                    1
                }
            } else {
                let mq = descent_modulus(&m_fac, m_odd, q);
                let ord = mult_ord(q, mq)?;
                let modulus = p.checked_pow(c + 1).ok_or(ArithError::Overflow)?;
                let residue = pow_mod(q, ord, modulus);
                // Largest j <= c with q^ord = 1 mod p^j.
                let mut j = 0u32;
                while j < c && (residue + modulus - 1) % p.pow(j + 1) == 0 {
                    j += 1;
                }
                j
            };
            b = b.max(needed);
        }
        b = b.min(c);
        result = result
            .checked_mul(p.pow(b))
            .ok_or(ArithError::Overflow)?;
    }
    Ok(result)
}

fn descent_modulus(m_fac: &Factorization, m_odd: bool, q: u64) -> u64 {
    if m_odd || q == 2 {
        m_fac.primes().filter(|&p| p != q).product()
    } else {
        4 * m_fac
            .primes()
            .filter(|&p| p != 2 && p != q)
            .product::<u64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcd(a: u64, b: u64) -> u64 {
        a.gcd(&b)
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().pairs().is_empty());
        assert_eq!(factorize(3381).unwrap().pairs(), &[(3, 1), (7, 2), (23, 1)]);
        assert_eq!(factorize(6976).unwrap().pairs(), &[(2, 6), (109, 1)]);
        assert_eq!(factorize(0), Err(ArithError::Zero));
    }

    #[test]
    fn factorize_beyond_trial_limit() {
        // Two primes above 10^6.
        let n = 1_000_003u64 * 1_000_033;
        assert_eq!(factorize(n).unwrap().pairs(), &[(1_000_003, 1), (1_000_033, 1)]);
        let n = 4_294_967_291u64 * 4_294_967_279;
        let f = factorize(n).unwrap();
        assert_eq!(f.value(), n);
        assert_eq!(f.num_primes(), 2);
    }

    #[test]
    fn factorization_reconstructs() {
        for n in 1..=100_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.pairs().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.primes().all(is_prime));
        }
    }

    #[test]
    fn phi_examples_and_count() {
        assert_eq!(euler_phi(7), Ok(6));
        assert_eq!(euler_phi(16), Ok(8));
        assert_eq!(euler_phi(343), Ok(294));
        assert_eq!(euler_phi(0), Err(ArithError::Zero));
        for n in 1..=2000u64 {
            let count = (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64;
            assert_eq!(euler_phi(n).unwrap(), count, "n = {n}");
        }
    }

    fn brute_order(t: u64, s: u64) -> u64 {
        let mut x = t % s;
        let mut e = 1;
        while x != 1 % s {
            x = x * t % s;
            e += 1;
        }
        e
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_ord(2, 7), Ok(3));
        assert_eq!(mult_ord(2, 11), Ok(10));
        // lcm of the orders 2, 42, 22 modulo 3, 49, 23.
        assert_eq!(mult_ord(5, 3381), Ok(462));
        assert_eq!(brute_order(5, 3381), 462);
        assert_eq!(pow_mod(5, 231, 3381), 3380);
        assert_eq!(pow_mod(5, 33, 3381), 2414);
        assert!(matches!(mult_ord(3, 12), Err(ArithError::NotCoprime { .. })));
    }

    #[test]
    fn self_conjugacy_examples() {
        assert!(is_self_conjugate(5, 3381));
        assert!(is_self_conjugate(2, 109));
        assert_eq!(pow_mod(2, 18, 109), 108);
        assert!(!is_self_conjugate(2, 7));
        // Degenerate p-free parts.
        assert!(is_self_conjugate(2, 8));
        assert!(is_self_conjugate(3, 6));
        assert!(is_self_conjugate(1, 7));
    }

    fn brute_self_conjugate_prime(p: u64, w: u64) -> bool {
        let mut u = w;
        while u % p == 0 {
            u /= p;
        }
        if u <= 2 {
            return true;
        }
        let mut x = 1 % u;
        for _ in 0..=u {
            if x == u - 1 {
                return true;
            }
            x = x * p % u;
        }
        false
    }

    #[test]
    fn self_conjugacy_matches_search() {
        for w in 1..300u64 {
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
                assert_eq!(
                    is_self_conjugate(p, w),
                    brute_self_conjugate_prime(p, w),
                    "p = {p}, w = {w}"
                );
            }
        }
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(24, 2), Ok(3));
        assert_eq!(valuation(7, 7), Ok(1));
        assert_eq!(valuation(10, 3), Ok(0));
        assert_eq!(valuation(10, 4), Err(ArithError::NotPrime(4)));
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(5), vec![1, 5]);
        assert_eq!(
            divisors(324),
            vec![1, 2, 3, 4, 6, 9, 12, 18, 27, 36, 54, 81, 108, 162, 324]
        );
    }

    #[test]
    fn square_free_examples() {
        assert!(is_square_free(30));
        assert!(!is_square_free(4));
        assert!(!is_square_free(3380));
        assert!(is_square_free(1));
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(is_primitive_root(2, 11), Ok(true));
        assert_eq!(is_primitive_root(2, 7), Ok(false));
        assert_eq!(is_primitive_root(3, 2), Ok(true));
        assert!(is_primitive_root(5, 10).is_err());
    }

    #[test]
    fn diagonal_form_examples() {
        assert!(solve_diagonal_form(11, 152).is_empty());
        assert!(solve_diagonal_form(7, 18).is_empty());
        assert_eq!(solve_diagonal_form(7, 9), vec![(3, 0), (-3, 0)]);
        assert_eq!(solve_diagonal_form(7, 0), vec![(0, 0)]);
    }

    #[test]
    fn diagonal_form_matches_double_loop() {
        let primes: Vec<u64> = (3..50).filter(|&p| is_prime(p)).collect();
        for &p in &primes {
            for n in 0..=10_000u64 {
                let mut fast = solve_diagonal_form(p, n);
                for &(a, b) in &fast {
                    assert_eq!((a * a) as u64 + p * b * b, n);
                }
                let mut slow = Vec::new();
                let amax = isqrt(n) as i64;
                for b in 0..=isqrt(n / p) {
                    for a in -amax..=amax {
                        if (a * a) as u64 + p * b * b == n {
                            slow.push((a, b));
                        }
                    }
                }
                fast.sort_unstable();
                slow.sort_unstable();
                assert_eq!(fast, slow, "p = {p}, n = {n}");
            }
        }
    }

    #[test]
    fn descent_modulus_examples() {
        assert_eq!(compute_f(343, 108), Ok(7));
        assert_eq!(compute_f(1024, 140), Ok(16));
        assert_eq!(compute_f(12, 1), Ok(6));
        assert_eq!(compute_f(49, 1), Ok(7));
        assert!(compute_f(1, 5).is_err());
    }

    // Literal reading of the definition: test each candidate exponent in turn.
    fn brute_f(m: u64, n: u64) -> u64 {
        let mf = factorize(m).unwrap();
        let nf = factorize(n).unwrap();
        let mut out = 1;
        for &(p, c) in mf.pairs() {
            let b = (1..=c)
                .find(|&b| {
                    nf.primes().all(|q| {
                        let mq = descent_modulus(&mf, m % 2 == 1, q);
                        (q == p && (p, b) != (2, 1))
                            || b == c
                            || (q != p && {
                                let o = brute_order(q, mq);
                                pow_mod(q, o, p.pow(b + 1)) != 1
                            })
                    })
                })
                .unwrap();
            out *= p.pow(b);
        }
        out
    }

    #[test]
    fn descent_modulus_matches_literal_definition() {
        for m in 2..400u64 {
            for n in 1..120u64 {
                assert_eq!(compute_f(m, n).unwrap(), brute_f(m, n), "M = {m}, N = {n}");
            }
        }
    }

    proptest! {
        #[test]
        fn order_divides_phi(s in 2u64..5_000_000, t in 1u64..1_000_000) {
            prop_assume!(gcd(t, s) == 1);
            let o = mult_ord(t, s).unwrap();
            prop_assert_eq!(euler_phi(s).unwrap() % o, 0);
            prop_assert_eq!(pow_mod(t, o, s), 1 % s);
        }

        #[test]
        fn self_conjugacy_is_multiplicative(a in 1u64..2000, b in 1u64..2000, w in 1u64..5000) {
            prop_assert_eq!(
                is_self_conjugate(a * b, w),
                is_self_conjugate(a, w) && is_self_conjugate(b, w)
            );
        }

        #[test]
        fn descent_modulus_bounds_and_monotone(m in 2u64..20_000, n0 in 1u64..2_000, k in 1u64..50) {
            let n = n0 * k;
            let f = compute_f(m, n).unwrap();
            let f0 = compute_f(m, n0).unwrap();
            let rad = factorize(m).unwrap().radical();
            prop_assert_eq!(m % f, 0);
            prop_assert_eq!(f % rad, 0);
            prop_assert_eq!(f % f0, 0);
        }
    }
}
