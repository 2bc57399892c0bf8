//! Dense univariate polynomials with integer coefficients, used for the
//! formal parameter `q`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A polynomial in `q` with integer coefficients, stored low degree first.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * q^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `q`.
    pub fn q() -> Self {
        Self::monomial(BigInt::one(), 1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Largest `k` with `q^k` dividing `self` (0 for the zero polynomial).
    pub fn q_valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divide out the largest power of `q`.
    pub fn strip_q_power(&self) -> IntPoly {
        let v = self.q_valuation();
        IntPoly::new(self.coeffs[v..].to_vec())
    }

    pub fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        IntPoly { coeffs: v }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k);
            let b = other.coeffs.get(k);
            v.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        IntPoly::new(v)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut v = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        IntPoly::new(v)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide every coefficient by `c`; `c` must divide each exactly.
    pub fn div_scalar_exact(&self, c: &BigInt) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|x| x / c).collect(),
        }
    }

    /// Content-free part with a positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        self.div_scalar_exact(&c)
    }

    /// Pseudo-remainder of `self` by `d`: `lc(d)^k * self mod d`.
    pub fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("pseudo_rem by zero");
        let lc = d.leading();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let lr = r.leading();
            let t = d.scale(&lr).shift(rd - dd);
            r = r.scale(&lc).sub(&t);
        }
        r
    }

    /// Greatest common divisor, normalized to a positive leading coefficient.
    ///
    /// Primitive polynomial remainder sequence; contents are handled separately.
    pub fn gcd(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() {
            return other.normalize_sign();
        }
        if other.is_zero() {
            return self.normalize_sign();
        }
        let cg = self.content().gcd(&other.content());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        // Shared powers of q are cheap to peel off first.
        let qv = a.q_valuation().min(b.q_valuation());
        a = a.strip_q_power();
        b = b.strip_q_power();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == Some(0) {
                a = IntPoly::one();
                break;
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part().scale(&cg).shift(qv)
    }

    fn normalize_sign(&self) -> IntPoly {
        if self.leading().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact division; `None` if `d` does not divide `self` in `Z[q]`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let lc = d.leading();
        let mut r = self.clone();
        let sd = self.degree()?;
        if sd < dd {
            return None;
        }
        let mut quo = vec![BigInt::zero(); sd - dd + 1];
        while let Some(rd) = r.degree() {
            if rd < dd {
                return None;
            }
            let (qc, rem) = r.leading().div_rem(&lc);
            if !rem.is_zero() {
                return None;
            }
            quo[rd - dd] = qc.clone();
            r = r.sub(&d.scale(&qc).shift(rd - dd));
        }
        Some(IntPoly::new(quo))
    }

    /// Remainder modulo a monic polynomial.
    pub fn rem_monic(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("rem by zero");
        debug_assert!(d.leading().is_one());
        let mut v = self.coeffs.clone();
        let mut k = v.len();
        while k > dd {
            k -= 1;
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs[..dd].iter().enumerate() {
                v[k - dd + j] -= &c * dc;
            }
        }
        v.truncate(dd);
        IntPoly::new(v)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// The `n`-th cyclotomic polynomial.
    pub fn cyclotomic(n: u64) -> IntPoly {
        assert!(n >= 1);
        // q^n - 1 = prod_{d | n} Phi_d
        let mut num = IntPoly::monomial(BigInt::one(), n as usize).sub(&IntPoly::one());
        for d in 1..n {
            if n % d == 0 {
                num = num
                    .div_exact(&IntPoly::cyclotomic(d))
                    .expect("cyclotomic factor divides q^n - 1");
            }
        }
        num
    }

    /// Lexicographic comparison used for canonical ordering of finite sets.
    pub fn cmp_canonical(&self, other: &IntPoly) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> IntPoly {
        IntPoly::from_i64s(cs)
    }

    #[test]
    fn cyclotomic_small_orders() {
        assert_eq!(IntPoly::cyclotomic(1), p(&[-1, 1]));
        assert_eq!(IntPoly::cyclotomic(2), p(&[1, 1]));
        assert_eq!(IntPoly::cyclotomic(3), p(&[1, 1, 1]));
        assert_eq!(IntPoly::cyclotomic(4), p(&[1, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(6), p(&[1, -1, 1]));
        assert_eq!(IntPoly::cyclotomic(8), p(&[1, 0, 0, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(9), p(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(12), p(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn gcd_and_exact_division() {
        let a = p(&[-1, 0, 1]); // q^2 - 1
        let b = p(&[1, 2, 1]); // (q + 1)^2
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        let c = p(&[0, 0, 6, 6]); // 6 q^2 (q + 1)
        let d = p(&[0, 4, 4]); // 4 q (q + 1)
        assert_eq!(c.gcd(&d), p(&[0, 2, 2]));
        assert_eq!(a.div_exact(&p(&[1, 1])), Some(p(&[-1, 1])));
        assert_eq!(a.div_exact(&p(&[2, 1])), None);
        assert_eq!(p(&[2, 2]).div_exact(&p(&[1, 1])), Some(p(&[2])));
    }

    #[test]
    fn monic_remainder() {
        let phi3 = IntPoly::cyclotomic(3);
        // q^2 = -1 - q mod Phi_3
        assert_eq!(p(&[0, 0, 1]).rem_monic(&phi3), p(&[-1, -1]));
        assert_eq!(p(&[0, 0, 0, 1]).rem_monic(&phi3), p(&[1]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -2, 0, 3]).to_string(), "3*q^3 - 2*q + 1");
        assert_eq!(p(&[]).to_string(), "0");
    }
}
