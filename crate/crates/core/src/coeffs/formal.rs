use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::integers::parse_bigint;
use super::intpoly::IntPoly;
use super::{DomainSpec, Field, FractionField, GcdDomain, Ring};
use crate::error::{Error, Result};

/// `Z[q]`, the base ring of the formal domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntPolyRing;

/// `Q(q)` realized as fractions of integer polynomials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FormalQ;

/// A reduced fraction `num/den` of integer polynomials in `q`; the
/// denominator has a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QFrac {
    num: IntPoly,
    den: IntPoly,
}

impl QFrac {
    pub fn numer(&self) -> &IntPoly {
        &self.num
    }

    pub fn denom(&self) -> &IntPoly {
        &self.den
    }

    fn reduced(num: IntPoly, den: IntPoly) -> QFrac {
        if num.is_zero() {
            return QFrac { num, den: IntPoly::one() };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        if den.leading().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        QFrac { num, den }
    }
}

fn poly_to_json(p: &IntPoly) -> serde_json::Value {
    serde_json::Value::Array(
        p.coeffs()
            .iter()
            .map(|c| serde_json::Value::String(c.to_string()))
            .collect(),
    )
}

fn poly_from_json(v: &serde_json::Value) -> Result<IntPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
    let cs = arr
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or_else(|| Error::Parse(format!("expected integer string, got {c}")))
                .and_then(parse_bigint)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPoly::new(cs))
}

impl Ring for IntPolyRing {
    type Elem = IntPoly;

    fn zero(&self) -> IntPoly {
        IntPoly::zero()
    }
    fn one(&self) -> IntPoly {
        IntPoly::one()
    }
    fn is_zero(&self, a: &IntPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.add(b)
    }
    fn sub(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.sub(b)
    }
    fn neg(&self, a: &IntPoly) -> IntPoly {
        a.neg()
    }
    fn mul(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.mul(b)
    }
    fn from_bigint(&self, n: &BigInt) -> IntPoly {
        IntPoly::constant(n.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn q_elem(&self) -> Option<IntPoly> {
        Some(IntPoly::q())
    }
    fn fmt_elem(&self, a: &IntPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if a.coeffs().iter().filter(|c| !num_traits::Zero::is_zero(*c)).count() > 1 {
            write!(f, "({a})")
        } else {
            write!(f, "{a}")
        }
    }
    fn elem_to_json(&self, a: &IntPoly) -> serde_json::Value {
        poly_to_json(a)
    }
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<IntPoly> {
        poly_from_json(v)
    }
}

impl GcdDomain for IntPolyRing {
    fn gcd(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.gcd(b)
    }
    fn div_exact(&self, a: &IntPoly, b: &IntPoly) -> IntPoly {
        a.div_exact(b).expect("exact division in Z[q]")
    }
    fn normalizing_sign(&self, a: &IntPoly) -> bool {
        a.leading().is_negative()
    }
    fn is_unit(&self, a: &IntPoly) -> bool {
        a.degree() == Some(0) && a.leading().abs().is_one()
    }
}

impl FormalQ {
    /// The fraction `num/den` in canonical form; `None` if `den` is zero.
    pub fn frac(&self, num: &IntPoly, den: &IntPoly) -> Option<QFrac> {
        if den.is_zero() {
            return None;
        }
        Some(QFrac::reduced(num.clone(), den.clone()))
    }
}

impl Ring for FormalQ {
    type Elem = QFrac;

    fn zero(&self) -> QFrac {
        QFrac { num: IntPoly::zero(), den: IntPoly::one() }
    }
    fn one(&self) -> QFrac {
        QFrac { num: IntPoly::one(), den: IntPoly::one() }
    }
    fn is_zero(&self, a: &QFrac) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &QFrac, b: &QFrac) -> QFrac {
        if a.num.is_zero() {
            return b.clone();
        }
        if b.num.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            return QFrac::reduced(a.num.add(&b.num), a.den.clone());
        }
        QFrac::reduced(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den))
    }
    fn neg(&self, a: &QFrac) -> QFrac {
        QFrac { num: a.num.neg(), den: a.den.clone() }
    }
    fn mul(&self, a: &QFrac, b: &QFrac) -> QFrac {
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        if a.den.is_one() && b.den.is_one() {
            return QFrac { num: a.num.mul(&b.num), den: IntPoly::one() };
        }
        QFrac::reduced(a.num.mul(&b.num), a.den.mul(&b.den))
    }
    fn from_bigint(&self, n: &BigInt) -> QFrac {
        QFrac::reduced(IntPoly::constant(n.clone()), IntPoly::one())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn q_elem(&self) -> Option<QFrac> {
        Some(QFrac { num: IntPoly::q(), den: IntPoly::one() })
    }
    fn spec(&self) -> Option<DomainSpec> {
        Some(DomainSpec::FormalQ)
    }
    fn fmt_elem(&self, a: &QFrac, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = |p: &IntPoly| p.coeffs().iter().filter(|c| !num_traits::Zero::is_zero(*c)).count() > 1;
        if a.den.is_one() {
            if multi(&a.num) {
                write!(f, "({})", a.num)
            } else {
                write!(f, "{}", a.num)
            }
        } else {
            write!(f, "({})/({})", a.num, a.den)
        }
    }
    fn elem_to_json(&self, a: &QFrac) -> serde_json::Value {
        serde_json::json!({ "num": poly_to_json(&a.num), "den": poly_to_json(&a.den) })
    }
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<QFrac> {
        let num = poly_from_json(&v["num"])?;
        let den = poly_from_json(&v["den"])?;
        self.frac(&num, &den)
            .ok_or_else(|| Error::Parse("zero denominator".into()))
    }
}

impl Field for FormalQ {
    fn inv(&self, a: &QFrac) -> Option<QFrac> {
        if a.num.is_zero() {
            return None;
        }
        Some(QFrac::reduced(a.den.clone(), a.num.clone()))
    }

    fn nullspace(&self, rows: Vec<crate::linalg::SparseRow<QFrac>>, ncols: usize) -> Vec<Vec<QFrac>> {
        crate::linalg::fraction_free_nullspace(self, rows, ncols)
    }

    fn rank(&self, rows: Vec<crate::linalg::SparseRow<QFrac>>) -> usize {
        crate::linalg::fraction_free_rank(self, rows)
    }
}

impl FractionField for FormalQ {
    type Base = IntPolyRing;

    fn base(&self) -> &IntPolyRing {
        &IntPolyRing
    }
    fn numer_denom(&self, a: &QFrac) -> (IntPoly, IntPoly) {
        (a.num.clone(), a.den.clone())
    }
    fn from_base(&self, a: &IntPoly) -> QFrac {
        QFrac { num: a.clone(), den: IntPoly::one() }
    }
}
