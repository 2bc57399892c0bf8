//! Exact coefficient domains.
//!
//! Every domain is a small immutable value implementing [`Ring`] (and
//! [`Field`] where it is one). Elements are kept in a canonical form, so
//! equality of elements is representational equality.
//!
//! The heavy code paths are generic over these traits. The runtime-typed
//! [`CoefficientDomain`] / [`Scalar`] pair is the dynamic surface used for
//! configuration and serialization.

mod cyclotomic;
mod formal;
mod integers;
pub mod intpoly;
mod prime;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::linalg;

pub use cyclotomic::{CycElem, CyclotomicField};
pub use formal::{FormalQ, IntPolyRing, QFrac};
pub use integers::{Integers, Rationals};
pub use intpoly::IntPoly;
pub use prime::PrimeField;

/// A commutative ring with canonical element representatives.
pub trait Ring: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    fn fmt_elem(&self, a: &Self::Elem, f: &mut fmt::Formatter<'_>) -> fmt::Result;
    /// JSON form of an element.
    fn elem_to_json(&self, a: &Self::Elem) -> serde_json::Value;
    fn elem_from_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// The deformation parameter `q`, for domains that carry one.
    fn q_elem(&self) -> Option<Self::Elem> {
        None
    }

    /// The domain this ring realizes, when it is one of the coefficient
    /// domains of [`DomainSpec`].
    fn spec(&self) -> Option<DomainSpec> {
        None
    }

    fn display<'a>(&'a self, a: &'a Self::Elem) -> ElemDisplay<'a, Self> {
        ElemDisplay { ring: self, elem: a }
    }
}

/// A field: every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// `q^k` for any integer `k` (fields carrying `q` only).
    fn q_power(&self, k: i64) -> Option<Self::Elem> {
        let q = self.q_elem()?;
        let base = if k < 0 { self.inv(&q)? } else { q };
        Some(self.pow(&base, k.unsigned_abs()))
    }

    /// Basis of the right nullspace of a sparse matrix, in reduced echelon
    /// normalization: basis vector `f` has a 1 at free column `f` and zeros at
    /// every other free column. Vectors are listed by increasing free column.
    fn nullspace(&self, rows: Vec<linalg::SparseRow<Self::Elem>>, ncols: usize) -> Vec<Vec<Self::Elem>> {
        linalg::field_nullspace(self, rows, ncols)
    }

    /// Rank of a sparse matrix.
    fn rank(&self, rows: Vec<linalg::SparseRow<Self::Elem>>) -> usize {
        linalg::field_rank(self, rows)
    }
}

/// Rings with a partial exact division.
pub trait ExactDiv: Ring {
    /// `a / b` when `b` divides `a`.
    fn try_div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;
}

impl<F: Field> ExactDiv for F {
    fn try_div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.div(a, b)
    }
}

impl ExactDiv for Integers {
    fn try_div(&self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        use num_integer::Integer as _;
        use num_traits::Zero as _;
        if b.is_zero() {
            return None;
        }
        let (q, r) = a.div_rem(b);
        r.is_zero().then_some(q)
    }
}

/// An integral domain with gcds, used by fraction-free elimination.
pub trait GcdDomain: Ring {
    /// A gcd normalized by [`GcdDomain::unit_normal`].
    fn gcd(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `a / b`, assuming `b` divides `a`.
    fn div_exact(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// A unit `u` with `u * a` in normal form (positive leading coefficient).
    fn normalizing_sign(&self, a: &Self::Elem) -> bool;
    /// Whether `a` is a unit of the domain.
    fn is_unit(&self, a: &Self::Elem) -> bool;
}

/// A field that is the fraction field of a [`GcdDomain`]; nullspaces are
/// computed fraction-free over the base domain.
pub trait FractionField: Field {
    type Base: GcdDomain;
    fn base(&self) -> &Self::Base;
    fn numer_denom(&self, a: &Self::Elem) -> (<Self::Base as Ring>::Elem, <Self::Base as Ring>::Elem);
    fn from_base(&self, a: &<Self::Base as Ring>::Elem) -> Self::Elem;
}

pub struct ElemDisplay<'a, R: Ring + ?Sized> {
    ring: &'a R,
    elem: &'a R::Elem,
}

impl<R: Ring> fmt::Display for ElemDisplay<'_, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ring.fmt_elem(self.elem, f)
    }
}

/// Which coefficient domain to compute over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p")]
pub enum DomainSpec {
    Rational,
    /// `F_p` for a prime `p`.
    PrimeField(u64),
    /// `Q[q]/Phi_p(q)`; `p` may be composite.
    Cyclotomic(u64),
    /// The rational function field `Q(q)`.
    FormalQ,
}

impl DomainSpec {
    pub fn characteristic(&self) -> u64 {
        match self {
            DomainSpec::PrimeField(p) => *p,
            _ => 0,
        }
    }

    pub fn has_q(&self) -> bool {
        matches!(self, DomainSpec::Cyclotomic(_) | DomainSpec::FormalQ)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::PrimeField(p) if !is_prime_u64(p) => {
                Err(Error::InvalidDomain(format!("{p} is not prime")))
            }
            DomainSpec::PrimeField(p) if p > u32::MAX as u64 => {
                Err(Error::InvalidDomain(format!("prime {p} exceeds the supported word size")))
            }
            DomainSpec::Cyclotomic(p) if p < 2 => {
                Err(Error::InvalidDomain(format!("cyclotomic order {p} must be at least 2")))
            }
            _ => Ok(()),
        }
    }

    /// Non-modularity for `S_n`: the characteristic must not divide `n!`.
    pub fn check_non_modular(&self, n: usize) -> Result<()> {
        let p = self.characteristic();
        if p != 0 && p as usize <= n {
            return Err(Error::BadCharacteristic(format!(
                "characteristic {p} divides {n}! (non-modular computations need p > n)"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Rational => write!(f, "Q"),
            DomainSpec::PrimeField(p) => write!(f, "F_{p}"),
            DomainSpec::Cyclotomic(p) => write!(f, "Q(zeta_{p})"),
            DomainSpec::FormalQ => write!(f, "Q(q)"),
        }
    }
}

/// Runtime handle to one of the coefficient domains.
#[derive(Clone, Debug)]
pub enum CoefficientDomain {
    Rational(Rationals),
    PrimeField(PrimeField),
    Cyclotomic(CyclotomicField),
    FormalQ(FormalQ),
}

/// A tagged element of some [`CoefficientDomain`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    PrimeField { p: u64, value: u64 },
    Cyclotomic { order: u64, value: CycElem },
    FormalQ(QFrac),
}

/// Validate `spec` and build the domain.
pub fn make_domain(spec: DomainSpec) -> Result<CoefficientDomain> {
    spec.validate()?;
    Ok(match spec {
        DomainSpec::Rational => CoefficientDomain::Rational(Rationals),
        DomainSpec::PrimeField(p) => CoefficientDomain::PrimeField(PrimeField::new(p)?),
        DomainSpec::Cyclotomic(p) => CoefficientDomain::Cyclotomic(CyclotomicField::new(p)?),
        DomainSpec::FormalQ => CoefficientDomain::FormalQ(FormalQ),
    })
}

/// Dispatch a block over the concrete field behind a [`CoefficientDomain`].
#[macro_export]
macro_rules! with_field {
    ($domain:expr, |$f:ident| $body:expr) => {
        match $domain {
            $crate::coeffs::CoefficientDomain::Rational($f) => $body,
            $crate::coeffs::CoefficientDomain::PrimeField($f) => $body,
            $crate::coeffs::CoefficientDomain::Cyclotomic($f) => $body,
            $crate::coeffs::CoefficientDomain::FormalQ($f) => $body,
        }
    };
}

macro_rules! scalar_binop {
    ($self:ident, $a:ident, $b:ident, $op:ident) => {
        match ($self, $a, $b) {
            (CoefficientDomain::Rational(f), Scalar::Rational(x), Scalar::Rational(y)) => {
                Ok(Scalar::Rational(f.$op(x, y)))
            }
            (CoefficientDomain::PrimeField(f), Scalar::PrimeField { value: x, .. }, Scalar::PrimeField { value: y, .. }) => {
                Ok(Scalar::PrimeField { p: f.modulus(), value: f.$op(x, y) })
            }
            (CoefficientDomain::Cyclotomic(f), Scalar::Cyclotomic { value: x, .. }, Scalar::Cyclotomic { value: y, .. }) => {
                Ok(Scalar::Cyclotomic { order: f.order(), value: f.$op(x, y) })
            }
            (CoefficientDomain::FormalQ(f), Scalar::FormalQ(x), Scalar::FormalQ(y)) => {
                Ok(Scalar::FormalQ(f.$op(x, y)))
            }
            _ => Err(Error::InvalidArgument("scalar does not belong to this domain".into())),
        }
    };
}

impl CoefficientDomain {
    pub fn spec(&self) -> DomainSpec {
        match self {
            CoefficientDomain::Rational(_) => DomainSpec::Rational,
            CoefficientDomain::PrimeField(f) => DomainSpec::PrimeField(f.modulus()),
            CoefficientDomain::Cyclotomic(f) => DomainSpec::Cyclotomic(f.order()),
            CoefficientDomain::FormalQ(_) => DomainSpec::FormalQ,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    fn belongs(&self, a: &Scalar) -> bool {
        a.domain() == self.spec()
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            CoefficientDomain::Rational(f) => Scalar::Rational(f.from_bigint(n)),
            CoefficientDomain::PrimeField(f) => Scalar::PrimeField { p: f.modulus(), value: f.from_bigint(n) },
            CoefficientDomain::Cyclotomic(f) => Scalar::Cyclotomic { order: f.order(), value: f.from_bigint(n) },
            CoefficientDomain::FormalQ(f) => Scalar::FormalQ(f.from_bigint(n)),
        }
    }

    /// The parameter `q` (cyclotomic and formal domains only).
    pub fn q(&self) -> Option<Scalar> {
        match self {
            CoefficientDomain::Cyclotomic(f) => Some(Scalar::Cyclotomic { order: f.order(), value: f.q_elem()? }),
            CoefficientDomain::FormalQ(f) => Some(Scalar::FormalQ(f.q_elem()?)),
            _ => None,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        scalar_binop!(self, a, b, add)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        scalar_binop!(self, a, b, sub)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        scalar_binop!(self, a, b, mul)
    }

    pub fn negate(&self, a: &Scalar) -> Result<Scalar> {
        let z = self.zero();
        self.sub(&z, a)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn invert(&self, a: &Scalar) -> Result<Option<Scalar>> {
        if !self.belongs(a) {
            return Err(Error::InvalidArgument("scalar does not belong to this domain".into()));
        }
        Ok(match (self, a) {
            (CoefficientDomain::Rational(f), Scalar::Rational(x)) => f.inv(x).map(Scalar::Rational),
            (CoefficientDomain::PrimeField(f), Scalar::PrimeField { value, .. }) => {
                f.inv(value).map(|v| Scalar::PrimeField { p: f.modulus(), value: v })
            }
            (CoefficientDomain::Cyclotomic(f), Scalar::Cyclotomic { value, .. }) => {
                f.inv(value).map(|v| Scalar::Cyclotomic { order: f.order(), value: v })
            }
            (CoefficientDomain::FormalQ(f), Scalar::FormalQ(x)) => f.inv(x).map(Scalar::FormalQ),
            _ => unreachable!(),
        })
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        *a == self.zero()
    }

    /// Canonical form of a cyclotomic residue given by an arbitrary
    /// integer polynomial in `q`.
    pub fn reduce(&self, q_poly: &IntPoly) -> Result<Scalar> {
        match self {
            CoefficientDomain::Cyclotomic(f) => Ok(Scalar::Cyclotomic { order: f.order(), value: f.from_int_poly(q_poly) }),
            CoefficientDomain::FormalQ(f) => Ok(Scalar::FormalQ(f.from_base(q_poly))),
            _ => Err(Error::InvalidArgument("domain has no parameter q".into())),
        }
    }

    pub fn to_json(&self, a: &Scalar) -> serde_json::Value {
        scalar_json(a)
    }
}

impl Scalar {
    pub fn domain(&self) -> DomainSpec {
        match self {
            Scalar::Rational(_) => DomainSpec::Rational,
            Scalar::PrimeField { p, .. } => DomainSpec::PrimeField(*p),
            Scalar::Cyclotomic { order, .. } => DomainSpec::Cyclotomic(*order),
            Scalar::FormalQ(_) => DomainSpec::FormalQ,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        scalar_json(self)
    }
}

fn scalar_json(a: &Scalar) -> serde_json::Value {
    match a {
        Scalar::Rational(x) => Rationals.elem_to_json(x),
        Scalar::PrimeField { p, value } => PrimeField::new_unchecked(*p).elem_to_json(value),
        Scalar::Cyclotomic { value, .. } => cyclotomic::cyc_to_json(value),
        Scalar::FormalQ(x) => FormalQ.elem_to_json(x),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(x) => Rationals.fmt_elem(x, f),
            Scalar::PrimeField { p, value } => PrimeField::new_unchecked(*p).fmt_elem(value, f),
            Scalar::Cyclotomic { value, .. } => cyclotomic::fmt_cyc(value, f),
            Scalar::FormalQ(x) => FormalQ.fmt_elem(x, f),
        }
    }
}

/// Image of a formal-`q` element under `q -> zeta_p`, reduced mod `Phi_p`.
///
/// Fails with [`Error::DenominatorVanishes`] when the denominator is
/// divisible by `Phi_p`.
pub fn specialize_q(x: &QFrac, target: &CyclotomicField) -> Result<CycElem> {
    let num = target.from_int_poly(x.numer());
    let den = target.from_int_poly(x.denom());
    let inv = target
        .inv(&den)
        .ok_or(Error::DenominatorVanishes(target.order()))?;
    Ok(target.mul(&num, &inv))
}

/// Reduce an integer to a prime-field residue (helper for callers that
/// work with raw integers).
pub fn residue(n: &BigInt, p: u64) -> u64 {
    PrimeField::new_unchecked(p).from_bigint(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn prime_field_inverse() {
        let d = make_domain(DomainSpec::PrimeField(7)).unwrap();
        let three = d.from_i64(3);
        assert_eq!(d.invert(&three).unwrap(), Some(d.from_i64(5)));
        assert_eq!(d.invert(&d.zero()).unwrap(), None);
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(matches!(make_domain(DomainSpec::PrimeField(9)), Err(Error::InvalidDomain(_))));
        assert!(matches!(make_domain(DomainSpec::PrimeField(1)), Err(Error::InvalidDomain(_))));
        assert!(matches!(make_domain(DomainSpec::Cyclotomic(1)), Err(Error::InvalidDomain(_))));
        assert!(make_domain(DomainSpec::Cyclotomic(6)).is_ok());
    }

    #[test]
    fn cyclotomic_reduction_of_q_squared() {
        let d = make_domain(DomainSpec::Cyclotomic(3)).unwrap();
        let q2 = d.reduce(&IntPoly::from_i64s(&[0, 0, 1])).unwrap();
        let expected = d.reduce(&IntPoly::from_i64s(&[-1, -1])).unwrap();
        assert_eq!(q2, expected);
        let q = d.q().unwrap();
        assert_eq!(d.mul(&q, &q).unwrap(), expected);
    }

    #[test]
    fn formal_normalization() {
        let f = FormalQ;
        let x = f.frac(&IntPoly::from_i64s(&[0, 2]), &IntPoly::from_i64s(&[4])).unwrap();
        assert_eq!(x.numer(), &IntPoly::from_i64s(&[0, 1]));
        assert_eq!(x.denom(), &IntPoly::from_i64s(&[2]));
        let again = f.frac(x.numer(), x.denom()).unwrap();
        assert_eq!(again, x);
    }

    #[test]
    fn specialization_examples() {
        let f = FormalQ;
        let c2 = CyclotomicField::new(2).unwrap();
        let c3 = CyclotomicField::new(3).unwrap();
        let x = f.from_base(&IntPoly::from_i64s(&[1, 1]));
        assert_eq!(specialize_q(&x, &c2).unwrap(), c2.zero());
        let y = f.frac(&IntPoly::from_i64s(&[1, 1, 1]), &IntPoly::from_i64s(&[-1, 1])).unwrap();
        assert_eq!(specialize_q(&y, &c3).unwrap(), c3.zero());
        let z = f.frac(&IntPoly::one(), &IntPoly::from_i64s(&[-1, 0, 0, 1])).unwrap();
        assert_eq!(specialize_q(&z, &c3), Err(Error::DenominatorVanishes(3)));
    }

    #[test]
    fn scalar_json_forms() {
        let q = make_domain(DomainSpec::Rational).unwrap();
        let x = Scalar::Rational(BigRational::new(BigInt::from(-3), BigInt::from(6)));
        assert_eq!(q.to_json(&x), serde_json::json!("-1/2"));
        let p = make_domain(DomainSpec::PrimeField(11)).unwrap();
        assert_eq!(p.to_json(&p.from_i64(-1)), serde_json::json!("10"));
        let fq = make_domain(DomainSpec::FormalQ).unwrap();
        let qq = fq.q().unwrap();
        assert_eq!(fq.to_json(&qq), serde_json::json!({"num": ["0", "1"], "den": ["1"]}));
        let one = BigInt::one();
        assert_eq!(residue(&-one, 5), 4);
    }
}
