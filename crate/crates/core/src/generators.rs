//! The generator chain for three variables.
//!
//! Cofactors live in the coordinates `y1 = x1 - x3`, `y2 = x2 - x3`, where
//! `x1 - x2 = y1 - y2`, the transposition `s12` swaps `y1` and `y2`, and
//! `s23` acts as `(y1, y2) -> (y1 - y2, -y2)`. The standard generators are
//! `A_m = (y1 - y2)^{2m+1} K_m` and `B_m = (y1 - y2)^{2m+1} L_m` with `K_m`,
//! `L_m` symmetric integer polynomials of degrees `m` and `m + 1`.
//!
//! A symmetric homogeneous `F` of degree `D` reduces modulo `(y1 - y2)^2` to
//! `F(1, 1) (s / 2)^D` with `s = y1 + y2`, so the lifting step only needs the
//! values of `P3 K`, `P2 L`, `P2^2 K`, `P3 L` at `(1, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, primes_up_to, Factorization};
use crate::coeffs::{Field, Integers, Rationals, Ring};
use crate::error::{Error, Result};
use crate::poly::{sign_product, Monomial, Poly};

/// `P2`, `P3` in the `y` coordinates.
pub fn y_invariants() -> (Poly<Integers>, Poly<Integers>) {
    let z = &Integers;
    let p2 = Poly::from_int_terms(z, 2, &[(&[2, 0], 2), (&[1, 1], -2), (&[0, 2], 2)]);
    let s = Poly::from_int_terms(z, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let a = Poly::from_int_terms(z, 2, &[(&[0, 1], 1), (&[1, 0], -2)]);
    let b = Poly::from_int_terms(z, 2, &[(&[1, 0], 1), (&[0, 1], -2)]);
    (p2, s.mul(&a).mul(&b))
}

fn y_diff() -> Poly<Integers> {
    Poly::from_int_terms(&Integers, 2, &[(&[1, 0], 1), (&[0, 1], -1)])
}

fn eval11(p: &Poly<Integers>) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc + c)
}

fn eval_at(p: &Poly<Integers>, y1: i64, y2: i64) -> BigInt {
    p.eval(&[BigInt::from(y1), BigInt::from(y2)])
}

/// Primitive part with positive leading coefficient (lex with `y1 > y2`).
fn normalize(p: &Poly<Integers>) -> Result<Poly<Integers>> {
    let Some((_, lc)) = p.leading_term() else {
        return Err(Error::NormalizationFailure("zero cofactor".into()));
    };
    let mut g = BigInt::zero();
    for (_, c) in p.terms() {
        g = g.gcd(c);
    }
    if lc.is_negative() {
        g = -g;
    }
    p.div_scalar(&g)
        .ok_or_else(|| Error::NormalizationFailure("content does not divide".into()))
}

/// Cofactors `(K_m, L_m)` and the wedge scalar `c_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorChain {
    pub m: u32,
    /// Symmetric in `(y1, y2)`, degree `m`.
    pub k: Poly<Integers>,
    /// Symmetric in `(y1, y2)`, degree `m + 1`.
    pub l: Poly<Integers>,
    /// `A s23 B - B s23 A = c prod_{i<j} (x_i - x_j)^{2m+1}`.
    pub c: BigInt,
}

/// Serialized form of a chain level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub m: u32,
    pub k: serde_json::Value,
    pub l: serde_json::Value,
    pub c: String,
}

impl GeneratorChain {
    fn from_cofactors(m: u32, k: Poly<Integers>, l: Poly<Integers>) -> Self {
        let c = wedge_from_cofactors(m, &k, &l);
        GeneratorChain { m, k, l, c }
    }

    pub fn record(&self) -> ChainRecord {
        ChainRecord { m: self.m, k: self.k.to_json(), l: self.l.to_json(), c: self.c.to_string() }
    }

    /// Rebuild from a record, re-deriving and checking `c`.
    pub fn from_record(r: &ChainRecord) -> Result<Self> {
        let k = Poly::from_json(&Integers, &r.k)?;
        let l = Poly::from_json(&Integers, &r.l)?;
        if k.nvars() != 2 || l.nvars() != 2 {
            return Err(Error::Parse("cofactors must be in two variables".into()));
        }
        if k.homogeneous_degree().unwrap_or(0) != r.m || l.homogeneous_degree().unwrap_or(0) != r.m + 1 {
            return Err(Error::Parse(format!("cofactor degrees do not match level {}", r.m)));
        }
        let chain = GeneratorChain::from_cofactors(r.m, k, l);
        if chain.c.to_string() != r.c {
            return Err(Error::Parse(format!("stored c does not match the cofactors at level {}", r.m)));
        }
        Ok(chain)
    }

    /// `A_m` in `x` coordinates over `field`.
    pub fn a<F: Ring>(&self, field: &F) -> Poly<F> {
        generator_in_x(field, self.m, &self.k)
    }

    /// `B_m` in `x` coordinates over `field`.
    pub fn b<F: Ring>(&self, field: &F) -> Poly<F> {
        generator_in_x(field, self.m, &self.l)
    }
}

/// Substitute `y1 = x1 - x3`, `y2 = x2 - x3`.
pub fn y_to_x<R: Ring>(ring: &R, p: &Poly<Integers>) -> Poly<R> {
    let mapped = p.map_coeffs(ring, |c| ring.from_bigint(c));
    mapped.compose(&[
        Poly::linear_diff(ring, 3, 0, 2, &ring.one()),
        Poly::linear_diff(ring, 3, 1, 2, &ring.one()),
    ])
}

fn generator_in_x<R: Ring>(ring: &R, m: u32, cof: &Poly<Integers>) -> Poly<R> {
    let full = y_diff().pow(2 * m + 1).mul(cof);
    y_to_x(ring, &full)
}

/// `c = (K L' - L K') / y2^{2m+1}` with `'` the `s23` substitution,
/// evaluated at `(y1, y2) = (0, 1)`.
fn wedge_from_cofactors(m: u32, k: &Poly<Integers>, l: &Poly<Integers>) -> BigInt {
    let k01 = eval_at(k, 0, 1);
    let l01 = eval_at(l, 0, 1);
    let s = k01 * eval11(l) + l01 * eval11(k);
    if m % 2 == 0 {
        -s
    } else {
        s
    }
}

/// `K_0 = 1`, `L_0 = y1 + y2`, so `A_0 = x1 - x2` and
/// `B_0 = (x1 - x2)(x1 + x2 - 2 x3)`.
pub fn initial_chain() -> GeneratorChain {
    let k = Poly::one(&Integers, 2);
    let l = Poly::from_int_terms(&Integers, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    GeneratorChain::from_cofactors(0, k, l)
}

/// Reduction of a symmetric `F` modulo `(y1 - y2)^2`: the coefficient `c`
/// with `F = c (y1 y2)^d` (even degree) or `F = c (y1 + y2)(y1 y2)^d` (odd
/// degree), `d = floor(D / 2)`. Computed by the substitution
/// `y1 = (s + t)/2`, `y2 = (s - t)/2` and dropping `t^2`.
pub fn canonical_reduction(f: &Poly<Integers>) -> Result<BigRational> {
    let q = &Rationals;
    let deg = f.homogeneous_degree().unwrap_or(0);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let y1 = Poly::from_terms(q, 2, [(Monomial::new(&[1, 0]), half.clone()), (Monomial::new(&[0, 1]), half.clone())]);
    let y2 = Poly::from_terms(q, 2, [(Monomial::new(&[1, 0]), half.clone()), (Monomial::new(&[0, 1]), -half)]);
    let g = f.map_coeffs(q, |c| BigRational::from_integer(c.clone())).compose(&[y1, y2]);
    let mut c0 = BigRational::zero();
    for (m, c) in g.terms() {
        match m.exp(1) {
            0 => c0 = c.clone(),
            1 => {
                return Err(Error::InvalidArgument(
                    "canonical reduction needs a symmetric polynomial".into(),
                ))
            }
            _ => {}
        }
    }
    // (y1 y2)^d = s^{2d} / 4^d mod t^2.
    let d = deg / 2;
    Ok(c0 * BigRational::from_integer(BigInt::from(4).pow(d)))
}

/// One step of the recursion: `K_{m+1}` from `P3 K_m`, `P2 L_m` and
/// `L_{m+1}` from `P2^2 K_m`, `P3 L_m`.
pub fn lift_chain(chain: &GeneratorChain) -> Result<GeneratorChain> {
    let (p2, p3) = y_invariants();
    let delta = y_diff().pow(2);
    let combine = |f: Poly<Integers>, g: Poly<Integers>| -> Result<Poly<Integers>> {
        let cf = eval11(&f);
        let cg = eval11(&g);
        if cf.is_zero() && cg.is_zero() {
            return Err(Error::DegenerateLift(chain.m));
        }
        let h = f.scale(&cg).sub(&g.scale(&cf));
        let q = h
            .div_exact(&delta)
            .ok_or_else(|| Error::TheoremViolation("combination not divisible by (x1-x2)^2".into()))?;
        normalize(&q)
    };
    let k = combine(p3.mul(&chain.k), p2.mul(&chain.l))?;
    let l = combine(p2.pow(2).mul(&chain.k), p3.mul(&chain.l))?;
    Ok(GeneratorChain::from_cofactors(chain.m + 1, k, l))
}

/// Levels `0..=m_max`.
pub fn chain_up_to(m_max: u32) -> Result<Vec<GeneratorChain>> {
    let mut out = vec![initial_chain()];
    while out.len() as u32 <= m_max {
        let next = lift_chain(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// `A s23 B - B s23 A` divided by `divisor`, which must leave a scalar.
pub fn wedge_with<F: Field>(a: &Poly<F>, b: &Poly<F>, divisor: &Poly<F>) -> Result<F::Elem> {
    let field = a.ring();
    let w = a.mul(&b.swap(1, 2)).sub(&b.mul(&a.swap(1, 2)));
    let (dm, dc) = divisor
        .leading_term()
        .ok_or_else(|| Error::InvalidArgument("zero divisor".into()))?;
    let c = match w.leading_term() {
        None => field.zero(),
        Some((wm, wc)) => {
            if wm != dm {
                return Err(Error::NotProportional("leading monomials differ".into()));
            }
            field.div(wc, dc).expect("nonzero leading coefficient")
        }
    };
    if w != divisor.scale(&c) {
        return Err(Error::NotProportional("wedge is not a multiple of the sign generator".into()));
    }
    Ok(c)
}

/// Wedge scalar of `A`, `B` against `prod_{i<j} (x_i - x_j)^{2m+1}`.
pub fn wedge_scalar<F: Field>(a: &Poly<F>, b: &Poly<F>, m: u32) -> Result<F::Elem> {
    let s = sign_product(a.ring(), 3, m, false)?;
    wedge_with(a, b, &s)
}

/// Prime factors `p` of `c` with `3 < p <= prime_bound`.
pub fn differing_primes(c: &BigInt, prime_bound: u64) -> Vec<u64> {
    primes_up_to(prime_bound)
        .into_iter()
        .filter(|&p| p > 3 && (c % BigInt::from(p)).is_zero())
        .collect()
}

/// Full factorization of `c_m`: trial division up to
/// `max(trial_bound, 3m + 3)` and Pollard-Brent for the cofactor.
pub fn factor_wedge(chain: &GeneratorChain, trial_bound: u64) -> Result<Factorization> {
    let bound = trial_bound.max(3 * chain.m as u64 + 3);
    factor(&chain.c, bound, 1 << 22)
}

/// Pairs `(a, k)` meeting the two-sided inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenXuWitness {
    pub n: u32,
    pub m: u32,
    pub p: u64,
    pub satisfied: bool,
    pub witnesses: Vec<(u32, u64)>,
}

/// Enumerate `a >= 1`, `k >= 0` with
/// `(mn(n-2) + C(n,2)) / (n(n-2)k + C(n,2) - 1) <= p^a <= mn / (nk + 1)`.
pub fn renxu_check(n: u32, m: u32, p: u64) -> Result<RenXuWitness> {
    if n < 3 {
        return Err(Error::InvalidArgument("the condition is stated for n >= 3".into()));
    }
    if !crate::arith::is_prime_u64(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let (n64, m64) = (n as u128, m as u128);
    let c2 = n64 * (n64 - 1) / 2;
    let lower_num = m64 * n64 * (n64 - 2) + c2;
    let top = m64 * n64;
    let mut witnesses = Vec::new();
    let mut a = 1u32;
    let mut pa = p as u128;
    while pa <= top {
        let mut k = 0u128;
        while pa * (n64 * k + 1) <= top {
            if lower_num <= pa * (n64 * (n64 - 2) * k + c2 - 1) {
                witnesses.push((a, k as u64));
            }
            k += 1;
        }
        a += 1;
        pa *= p as u128;
    }
    Ok(RenXuWitness { n, m, p, satisfied: !witnesses.is_empty(), witnesses })
}

/// The characteristic-zero numerator `1 + 2t^{3m+1} + 2t^{3m+2} + t^{6m+3}`.
pub fn char0_numerator(m: u32) -> Vec<(u32, i64)> {
    vec![(0, 1), (3 * m + 1, 2), (3 * m + 2, 2), (6 * m + 3, 1)]
}

/// Predicted numerator of the Hilbert series over `F_p` (`n = 3`).
pub fn predicted_charp_numerator(m: u32, p: u64) -> Result<Vec<(u32, i64)>> {
    let w = renxu_check(3, m, p)?;
    let Some(&(a, k)) = w.witnesses.iter().max_by_key(|t| t.0) else {
        return Ok(char0_numerator(m));
    };
    let pa = p.pow(a);
    let d = if pa * (2 * k + 1) >= 2 * m as u64 + 1 { pa * (3 * k + 1) } else { pa * (3 * k + 2) };
    let d = u32::try_from(d).expect("degree fits");
    let top = 6 * m + 3;
    let mut terms = vec![(0, 1), (d, 2), (top - d, 2), (top, 1)];
    terms.sort();
    Ok(terms)
}

/// Prime detection at one level: primes dividing `c_m` against primes
/// meeting the inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub m: u32,
    /// `c_m` in decimal.
    pub c_m: String,
    /// Primes `3 < p <= bound` dividing `c_m`.
    pub prime_factors_gt3: Vec<u64>,
    pub renxu_primes: Vec<u64>,
    pub agree: bool,
}

/// Compare `{p : p | c_m}` with `{p : renxu_check(3, m, p)}` for
/// `3 < p <= prime_bound`.
pub fn sweep_record(chain: &GeneratorChain, prime_bound: u64) -> Result<SweepRecord> {
    let differing = differing_primes(&chain.c, prime_bound);
    let mut renxu = Vec::new();
    for p in primes_up_to(prime_bound).into_iter().filter(|&p| p > 3) {
        if renxu_check(3, chain.m, p)?.satisfied {
            renxu.push(p);
        }
    }
    Ok(SweepRecord {
        m: chain.m,
        c_m: chain.c.to_string(),
        agree: differing == renxu,
        prime_factors_gt3: differing,
        renxu_primes: renxu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{divisibility_order, elementary_invariants, vandermonde};

    #[test]
    fn initial_level() {
        let c0 = initial_chain();
        assert_eq!(c0.c, BigInt::from(-3));
        let a = c0.a(&Rationals);
        let b = c0.b(&Rationals);
        assert_eq!(a, Poly::linear_diff(&Rationals, 3, 0, 1, &Rationals.one()));
        assert_eq!(wedge_scalar(&a, &b, 0).unwrap(), BigRational::from_integer((-3).into()));
        let v = vandermonde(&Rationals, 3).scale(&BigRational::from_integer((-3).into()));
        assert_eq!(a.mul(&b.swap(1, 2)).sub(&b.mul(&a.swap(1, 2))), v);
    }

    #[test]
    fn invariants_match_x_coordinates() {
        let (p2, p3) = y_invariants();
        let (x2, x3) = elementary_invariants(&Rationals);
        assert_eq!(y_to_x(&Rationals, &p2), x2);
        assert_eq!(y_to_x(&Rationals, &p3), x3);
    }

    #[test]
    fn fast_wedge_matches_polynomial_wedge() {
        for ch in chain_up_to(4).unwrap() {
            let a = ch.a(&Rationals);
            let b = ch.b(&Rationals);
            let c = wedge_scalar(&a, &b, ch.m).unwrap();
            assert_eq!(c, BigRational::from_integer(ch.c.clone()), "m = {}", ch.m);
            assert!(!ch.c.is_zero());
        }
    }

    #[test]
    fn chain_degrees_and_membership() {
        for ch in chain_up_to(3).unwrap() {
            let a = ch.a(&Rationals);
            let b = ch.b(&Rationals);
            assert_eq!(a.homogeneous_degree(), Some(3 * ch.m + 1));
            assert_eq!(b.homogeneous_degree(), Some(3 * ch.m + 2));
            for p in [&a, &b] {
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let ord = divisibility_order(&p.sub(&p.swap(i, j)), i, j).unwrap();
                    assert!(ord > 2 * ch.m, "m = {} pair {i}{j}", ch.m);
                }
                let s = p.permute(&[1, 2, 0]);
                assert!(p.add(&s).add(&s.permute(&[1, 2, 0])).is_zero());
                assert!(p.leading_term().unwrap().1 > &BigRational::zero());
            }
        }
    }

    #[test]
    fn reduction_agrees_with_evaluation() {
        let (p2, p3) = y_invariants();
        for ch in chain_up_to(5).unwrap() {
            for f in [p3.mul(&ch.k), p2.mul(&ch.l), p2.pow(2).mul(&ch.k), p3.mul(&ch.l)] {
                let deg = f.homogeneous_degree().unwrap();
                let expect = BigRational::new(eval11(&f), BigInt::from(if deg % 2 == 1 { 2 } else { 1 }));
                assert_eq!(canonical_reduction(&f).unwrap(), expect);
            }
        }
    }

    #[test]
    fn renxu_examples() {
        let w = renxu_check(3, 5, 11).unwrap();
        assert!(w.satisfied);
        assert_eq!(w.witnesses, vec![(1, 0)]);
        assert!(!renxu_check(3, 1, 5).unwrap().satisfied);
        assert!(!renxu_check(3, 2, 7).unwrap().satisfied);
        assert_eq!(predicted_charp_numerator(5, 11).unwrap(), vec![(0, 1), (11, 2), (22, 2), (33, 1)]);
        assert_eq!(predicted_charp_numerator(2, 5).unwrap(), vec![(0, 1), (5, 2), (10, 2), (15, 1)]);
        assert_eq!(predicted_charp_numerator(1, 7).unwrap(), char0_numerator(1));
    }

    #[test]
    fn differing_prime_examples() {
        let chain = chain_up_to(5).unwrap();
        assert!(differing_primes(&chain[0].c, 100).is_empty());
        assert!(differing_primes(&chain[1].c, 100).is_empty());
        assert_eq!(differing_primes(&chain[2].c, 100), vec![5]);
        assert_eq!(differing_primes(&chain[5].c, 100), vec![11, 13]);
    }

    #[test]
    fn sweep_agrees_small() {
        for ch in chain_up_to(12).unwrap() {
            let r = sweep_record(&ch, 100).unwrap();
            assert!(r.agree, "{r:?}");
        }
    }

    #[test]
    fn record_roundtrip() {
        let ch = chain_up_to(3).unwrap().pop().unwrap();
        let r = ch.record();
        assert_eq!(GeneratorChain::from_record(&r).unwrap(), ch);
        let mut bad = r.clone();
        bad.c = "7".into();
        assert!(GeneratorChain::from_record(&bad).is_err());
    }
}
