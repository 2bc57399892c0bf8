use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::integers::{parse_rational, rational_string};
use super::intpoly::IntPoly;
use super::{DomainSpec, Field, Ring};
use crate::error::{Error, Result};

/// `Q(zeta_p) = Q[q]/Phi_p(q)` for any order `p >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    order: u64,
    phi: IntPoly,
}

/// A residue mod `Phi_p` with rational coefficients, stored as an integer
/// polynomial of degree `< deg Phi_p` over a positive common denominator.
/// Numerator content and denominator are coprime.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycElem {
    num: IntPoly,
    den: BigInt,
}

impl CycElem {
    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// Rational coefficients of `1, q, q^2, ...`.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.num
            .coeffs()
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    fn normalized(num: IntPoly, den: BigInt) -> CycElem {
        if num.is_zero() {
            return CycElem { num, den: BigInt::one() };
        }
        let mut g = num.content().gcd(&den);
        if den.is_negative() {
            g = -g;
        }
        CycElem {
            num: num.div_scalar_exact(&g),
            den: den / g,
        }
    }
}

pub(crate) fn cyc_to_json(a: &CycElem) -> serde_json::Value {
    serde_json::Value::Array(
        a.coefficients()
            .iter()
            .map(|c| serde_json::Value::String(rational_string(c)))
            .collect(),
    )
}

pub(crate) fn fmt_cyc(a: &CycElem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if a.den.is_one() {
        write!(f, "{}", a.num)
    } else if a.num.degree() == Some(0) {
        write!(f, "{}/{}", a.num, a.den)
    } else {
        write!(f, "({})/{}", a.num, a.den)
    }
}

impl CyclotomicField {
    pub fn new(order: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidDomain(format!(
                "cyclotomic order {order} must be at least 2"
            )));
        }
        Ok(CyclotomicField {
            order,
            phi: IntPoly::cyclotomic(order),
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// `Phi_p`.
    pub fn modulus_poly(&self) -> &IntPoly {
        &self.phi
    }

    pub fn degree(&self) -> usize {
        self.phi.degree().unwrap_or(0)
    }

    pub fn from_int_poly(&self, p: &IntPoly) -> CycElem {
        CycElem::normalized(p.rem_monic(&self.phi), BigInt::one())
    }

    pub fn from_coefficients(&self, cs: &[BigRational]) -> CycElem {
        let mut den = BigInt::one();
        for c in cs {
            den = den.lcm(c.denom());
        }
        let num: Vec<BigInt> = cs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        CycElem::normalized(IntPoly::new(num).rem_monic(&self.phi), den)
    }
}

// Small dense helpers over Q[q], low degree first, used only for inversion.
fn rp_trim(mut a: Vec<BigRational>) -> Vec<BigRational> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn rp_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), rp_trim(r));
    }
    let mut quo = vec![BigRational::zero(); r.len() - db];
    for k in (db..r.len()).rev() {
        if r[k].is_zero() {
            continue;
        }
        let c = &r[k] / &lb;
        for j in 0..=db {
            let t = &c * &b[j];
            r[k - db + j] -= t;
        }
        quo[k - db] = c;
    }
    r.truncate(db);
    (rp_trim(quo), rp_trim(r))
}

fn rp_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    rp_trim(v)
}

fn rp_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    rp_trim(
        (0..n)
            .map(|k| a.get(k).unwrap_or(&z) - b.get(k).unwrap_or(&z))
            .collect(),
    )
}

impl Ring for CyclotomicField {
    type Elem = CycElem;

    fn zero(&self) -> CycElem {
        CycElem { num: IntPoly::zero(), den: BigInt::one() }
    }
    fn one(&self) -> CycElem {
        CycElem { num: IntPoly::one(), den: BigInt::one() }
    }
    fn is_zero(&self, a: &CycElem) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        if a.den == b.den {
            return CycElem::normalized(a.num.add(&b.num), a.den.clone());
        }
        let num = a.num.scale(&b.den).add(&b.num.scale(&a.den));
        CycElem::normalized(num, &a.den * &b.den)
    }
    fn neg(&self, a: &CycElem) -> CycElem {
        CycElem { num: a.num.neg(), den: a.den.clone() }
    }
    fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        let num = a.num.mul(&b.num).rem_monic(&self.phi);
        CycElem::normalized(num, &a.den * &b.den)
    }
    fn from_bigint(&self, n: &BigInt) -> CycElem {
        CycElem::normalized(IntPoly::constant(n.clone()), BigInt::one())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn q_elem(&self) -> Option<CycElem> {
        Some(self.from_int_poly(&IntPoly::q()))
    }
    fn spec(&self) -> Option<DomainSpec> {
        Some(DomainSpec::Cyclotomic(self.order))
    }
    fn fmt_elem(&self, a: &CycElem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_cyc(a, f)
    }
    fn elem_to_json(&self, a: &CycElem) -> serde_json::Value {
        cyc_to_json(a)
    }
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<CycElem> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
        let cs = arr
            .iter()
            .map(|c| {
                c.as_str()
                    .ok_or_else(|| Error::Parse(format!("expected rational string, got {c}")))
                    .and_then(parse_rational)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.from_coefficients(&cs))
    }
}

impl Field for CyclotomicField {
    fn inv(&self, a: &CycElem) -> Option<CycElem> {
        if a.num.is_zero() {
            return None;
        }
        // Extended Euclid in Q[q]: find s with s * a = 1 mod Phi.
        let to_rat = |p: &IntPoly| -> Vec<BigRational> {
            p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
        };
        let mut r0 = to_rat(&self.phi);
        let mut r1 = to_rat(&a.num);
        let mut s0: Vec<BigRational> = Vec::new();
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while r1.len() > 1 {
            let (quo, rem) = rp_divrem(&r0, &r1);
            let s2 = rp_sub(&s0, &rp_mul(&quo, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r1.is_empty() {
            // a shares a factor with Phi; impossible for irreducible Phi.
            return None;
        }
        let c = r1[0].clone();
        let s: Vec<BigRational> = s1.iter().map(|x| x * BigRational::from_integer(a.den.clone()) / &c).collect();
        Some(self.from_coefficients(&s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip_various_orders() {
        for order in [2u64, 3, 4, 5, 6, 8, 9, 12] {
            let f = CyclotomicField::new(order).unwrap();
            let a = f.from_int_poly(&IntPoly::from_i64s(&[3, -1, 2, 5, 0, 7]));
            if f.is_zero(&a) {
                continue;
            }
            let ai = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &ai), f.one(), "order {order}");
        }
    }

    #[test]
    fn q_has_exact_order() {
        for order in [2u64, 3, 5, 6, 7, 8] {
            let f = CyclotomicField::new(order).unwrap();
            let q = f.q_elem().unwrap();
            for k in 1..order {
                assert_ne!(f.pow(&q, k), f.one());
            }
            assert_eq!(f.pow(&q, order), f.one());
        }
    }
}
