use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{DomainSpec, Field, FractionField, GcdDomain, Ring};
use crate::error::{Error, Result};

/// The integers, used for fraction-free elimination and integral generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

/// The rationals with arbitrary-precision numerators and denominators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

pub(crate) fn parse_bigint(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let d = parse_bigint(b)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_bigint(a)?, d))
        }
        None => Ok(BigRational::from_integer(parse_bigint(s)?)),
    }
}

pub(crate) fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn json_str(v: &serde_json::Value) -> Result<&str> {
    v.as_str()
        .ok_or_else(|| Error::Parse(format!("expected a decimal string, got {v}")))
}

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn fmt_elem(&self, a: &BigInt, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{a}")
    }
    fn elem_to_json(&self, a: &BigInt) -> serde_json::Value {
        serde_json::Value::String(a.to_string())
    }
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<BigInt> {
        parse_bigint(json_str(v)?)
    }
}

impl GcdDomain for Integers {
    fn gcd(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a.gcd(b)
    }
    fn div_exact(&self, a: &BigInt, b: &BigInt) -> BigInt {
        debug_assert!((a % b).is_zero());
        a / b
    }
    fn normalizing_sign(&self, a: &BigInt) -> bool {
        a.is_negative()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
}

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn spec(&self) -> Option<DomainSpec> {
        Some(DomainSpec::Rational)
    }
    fn fmt_elem(&self, a: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", rational_string(a))
    }
    fn elem_to_json(&self, a: &BigRational) -> serde_json::Value {
        serde_json::Value::String(rational_string(a))
    }
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<BigRational> {
        parse_rational(json_str(v)?)
    }
}

impl Field for Rationals {
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn nullspace(&self, rows: Vec<crate::linalg::SparseRow<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
        crate::linalg::fraction_free_nullspace(self, rows, ncols)
    }

    fn rank(&self, rows: Vec<crate::linalg::SparseRow<BigRational>>) -> usize {
        crate::linalg::fraction_free_rank(self, rows)
    }
}

impl FractionField for Rationals {
    type Base = Integers;

    fn base(&self) -> &Integers {
        &Integers
    }
    fn numer_denom(&self, a: &BigRational) -> (BigInt, BigInt) {
        (a.numer().clone(), a.denom().clone())
    }
    fn from_base(&self, a: &BigInt) -> BigRational {
        BigRational::from_integer(a.clone())
    }
}
