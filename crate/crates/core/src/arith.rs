//! Integer helpers: primality, factorization, valuations.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first 20 prime bases. Deterministic for
/// `n < 3.3e24`, a strong probable-prime test beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = &one + &one;
    if n.is_even() {
        return false;
    }
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'outer: for a in primes_up_to(71) {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes `p <= bound` in increasing order.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(k, _)| k as u64)
        .collect()
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn valuation_int(n: &BigInt, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    if p < 2 {
        return Err(Error::InvalidArgument(format!("valuation base {p} must be at least 2")));
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut x = n.clone();
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return Ok(v);
        }
        x = q;
        v += 1;
    }
}

/// `v_p(x)` for a nonzero rational.
pub fn valuation(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    Ok(valuation_int(x.numer(), p)? as i64 - valuation_int(x.denom(), p)? as i64)
}

/// Result of factoring an integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    /// `(prime, exponent)` in increasing prime order.
    pub factors: Vec<(BigUint, u32)>,
    /// A composite left over when the factoring budget ran out (1 otherwise).
    pub unfactored: BigUint,
    pub negative: bool,
}

impl Factorization {
    pub fn is_complete(&self) -> bool {
        self.unfactored.is_one()
    }

    /// Prime factors that fit in a `u64`, without multiplicity.
    pub fn small_primes(&self) -> Vec<u64> {
        self.factors.iter().filter_map(|(p, _)| p.to_u64()).collect()
    }
}

fn pollard_brent(n: &BigUint, c: u64, max_iter: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let cc = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &cc) % n;
    let mut y = BigUint::from(2u32);
    let mut r: u64 = 1;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    let m = 128u64;
    let mut iters = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
            iters += m;
            if iters > max_iter {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    if &g == n {
        None
    } else {
        Some(g)
    }
}

fn split_composite(n: BigUint, out: &mut Vec<BigUint>, rest: &mut BigUint, max_iter: u64) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    for c in 1..=8u64 {
        if let Some(d) = pollard_brent(&n, c, max_iter) {
            let e = &n / &d;
            split_composite(d, out, rest, max_iter);
            split_composite(e, out, rest, max_iter);
            return;
        }
    }
    *rest *= n;
}

/// Factor `n` by trial division up to `trial_bound`, then Pollard-Brent
/// with `max_iter` iterations per attempt. Anything left is reported in
/// [`Factorization::unfactored`].
pub fn factor(n: &BigInt, trial_bound: u64, max_iter: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroInput);
    }
    let negative = n.sign() == Sign::Minus;
    let mut x = n.abs().to_biguint().expect("absolute value");
    let mut found: Vec<BigUint> = Vec::new();
    for p in primes_up_to(trial_bound) {
        let pb = BigUint::from(p);
        if &pb * &pb > x {
            break;
        }
        while (&x % &pb).is_zero() {
            x /= &pb;
            found.push(pb.clone());
        }
    }
    let mut rest = BigUint::one();
    if !x.is_one() {
        let small = trial_bound.max(1);
        if x.to_u64().is_some_and(|v| v <= small.saturating_mul(small)) {
            found.push(x);
        } else {
            split_composite(x, &mut found, &mut rest, max_iter);
        }
    }
    found.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { factors, unfactored: rest, negative })
}

/// `n` with every factor 2 and 3 removed and the sign dropped.
pub fn strip_2_3(n: &BigInt) -> BigInt {
    if n.is_zero() {
        return BigInt::zero();
    }
    let mut x = n.abs();
    for p in [2u32, 3] {
        let pb = BigInt::from(p);
        while (&x % &pb).is_zero() {
            x /= &pb;
        }
    }
    x
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let ps: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(ps, primes_up_to(59));
        assert!(is_prime_u64(4_294_967_291));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigRational::from_integer(50.into()), 5).unwrap(), 2);
        assert_eq!(valuation(&BigRational::new(3.into(), 49.into()), 7).unwrap(), -2);
        assert_eq!(valuation(&BigRational::zero(), 7), Err(Error::ZeroInput));
    }

    #[test]
    fn factor_semiprime_beyond_trial_bound() {
        let a = BigInt::from(1_000_003u64);
        let b = BigInt::from(998_244_353u64);
        let n = -(&a * &b * BigInt::from(12));
        let f = factor(&n, 100, 1 << 20).unwrap();
        assert!(f.is_complete());
        assert!(f.negative);
        assert_eq!(f.small_primes(), vec![2, 3, 1_000_003, 998_244_353]);
        assert_eq!(f.factors[0].1, 2);
    }

    #[test]
    fn strip() {
        assert_eq!(strip_2_3(&BigInt::from(-360)), BigInt::from(5));
        assert_eq!(binomial(10, 3), BigInt::from(120));
    }
}
