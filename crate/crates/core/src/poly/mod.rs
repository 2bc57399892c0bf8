//! Sparse multivariate polynomials with the symmetric group action.

mod ops;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;

use crate::coeffs::{ExactDiv, Ring};
use crate::error::{Error, Result};

pub use ops::{
    divisibility_order, elementary_invariants, isotypic_project, q_divisibility_test, q_divisor,
    q_remainder_table, sign_product, translation_split, vandermonde, IsotypicLabel,
};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 8;

/// An exponent vector. Unused trailing slots are zero.
///
/// `Ord` is graded lexicographic with `x1 > x2 > ... `: higher total degree
/// is larger, ties broken by the first differing exponent.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial([u16; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; MAX_VARS])
    }

    pub fn new(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut e = [0u16; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u16::try_from(x).expect("exponent fits in 16 bits");
        }
        Monomial(e)
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0u16; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    pub fn set_exp(&mut self, i: usize, e: u32) {
        self.0[i] = u16::try_from(e).expect("exponent fits in 16 bits");
    }

    pub fn exps(&self, n: usize) -> Vec<u32> {
        self.0[..n].iter().map(|&e| e as u32).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_add(*b).expect("exponent overflow");
        }
        Monomial(e)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial(e))
    }

    /// The monomial after sending variable `i` to variable `sigma[i]`.
    pub fn permute(&self, sigma: &[usize]) -> Monomial {
        let mut e = [0u16; MAX_VARS];
        for (i, &t) in sigma.iter().enumerate() {
            e[t] = self.0[i];
        }
        Monomial(e)
    }

    /// All monomials of total degree `d` in `n` variables, in descending
    /// graded-lex order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = [0u16; MAX_VARS];
        fn rec(i: usize, n: usize, left: u32, cur: &mut [u16; MAX_VARS], out: &mut Vec<Monomial>) {
            if i + 1 == n {
                cur[i] = left as u16;
                out.push(Monomial(*cur));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e as u16;
                rec(i + 1, n, left - e, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Monomial::one());
            }
            return out;
        }
        rec(0, n, d, &mut cur, &mut out);
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// A polynomial in `x1..xn` over the ring `R`.
#[derive(Clone)]
pub struct Poly<R: Ring> {
    ring: R,
    n: usize,
    terms: BTreeMap<Monomial, R::Elem>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl<R: Ring> Eq for Poly<R> {}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<R: Ring> Poly<R> {
    pub fn zero(ring: &R, n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        Poly { ring: ring.clone(), n, terms: BTreeMap::new() }
    }

    pub fn constant(ring: &R, n: usize, c: R::Elem) -> Self {
        Self::term(ring, n, Monomial::one(), c)
    }

    pub fn one(ring: &R, n: usize) -> Self {
        Self::constant(ring, n, ring.one())
    }

    pub fn term(ring: &R, n: usize, m: Monomial, c: R::Elem) -> Self {
        let mut p = Self::zero(ring, n);
        if !ring.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(ring: &R, n: usize, i: usize) -> Self {
        assert!(i < n, "variable index out of range");
        Self::term(ring, n, Monomial::var(i), ring.one())
    }

    /// `x_i - c x_j` for zero-based indices.
    pub fn linear_diff(ring: &R, n: usize, i: usize, j: usize, c: &R::Elem) -> Self {
        let mut p = Self::var(ring, n, i);
        p.add_term(Monomial::var(j), ring.neg(c));
        p
    }

    pub fn from_terms(ring: &R, n: usize, terms: impl IntoIterator<Item = (Monomial, R::Elem)>) -> Self {
        let mut p = Self::zero(ring, n);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Integer-coefficient convenience constructor: `(exponents, coeff)`.
    pub fn from_int_terms(ring: &R, n: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(ring, n, terms.iter().map(|(e, c)| (Monomial::new(e), ring.from_i64(*c))))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> R::Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &R::Elem)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// The common degree of all terms, if there is one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.degree());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn add_term(&mut self, m: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = self.ring.add(v, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.n, other.n, "polynomials in different numbers of variables");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, self.ring.neg(c));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_terms(|_, c| self.ring.neg(c))
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        if self.ring.is_zero(c) {
            return Self::zero(&self.ring, self.n);
        }
        let mut out = Self::zero(&self.ring, self.n);
        for (m, v) in &self.terms {
            out.add_term(*m, self.ring.mul(c, v));
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, self.n);
        for (m, v) in &self.terms {
            out.add_term(m.mul(mono), self.ring.mul(c, v));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc: BTreeMap<Monomial, R::Elem> = BTreeMap::new();
        let r = &self.ring;
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb);
                let v = r.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(x) => *x = r.add(x, &v),
                    None => {
                        acc.insert(m, v);
                    }
                }
            }
        }
        acc.retain(|_, v| !r.is_zero(v));
        Poly { ring: r.clone(), n: self.n, terms: acc }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ring, self.n);
        let mut base = self.clone();
        let mut e = e;
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

    fn map_terms(&self, f: impl Fn(&Monomial, &R::Elem) -> R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, f(m, c));
        }
        out
    }

    /// Apply `sigma`, sending `x_i` to `x_{sigma(i)}` (zero-based).
    pub fn permute(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.n, "permutation has the wrong length");
        debug_assert!(is_permutation(sigma));
        let mut out = Self::zero(&self.ring, self.n);
        for (m, c) in &self.terms {
            out.terms.insert(m.permute(sigma), c.clone());
        }
        out
    }

    /// The transposition swapping `x_i` and `x_j`.
    pub fn swap(&self, i: usize, j: usize) -> Self {
        let mut sigma: Vec<usize> = (0..self.n).collect();
        sigma.swap(i, j);
        self.permute(&sigma)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.ring, self.n);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut mm = *m;
            mm.set_exp(i, e - 1);
            out.add_term(mm, self.ring.mul(&self.ring.from_i64(e as i64), c));
        }
        out
    }

    /// Substitute `x_i -> images[i]`; the result lives in the variables of
    /// the images.
    pub fn compose(&self, images: &[Poly<R>]) -> Poly<R> {
        assert_eq!(images.len(), self.n, "one image per variable");
        let target_n = images.first().map(|p| p.n).unwrap_or(0);
        let mut powers: Vec<Vec<Poly<R>>> = images
            .iter()
            .map(|p| vec![Poly::one(&self.ring, p.n)])
            .collect();
        let mut out = Poly::zero(&self.ring, target_n);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(&self.ring, target_n, c.clone());
            for (i, img) in images.iter().enumerate() {
                let e = m.exp(i) as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().expect("nonempty").mul(img);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn eval(&self, point: &[R::Elem]) -> R::Elem {
        assert_eq!(point.len(), self.n, "point has the wrong dimension");
        let r = &self.ring;
        let mut acc = r.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = r.mul(&t, &r.pow(x, e as u64));
                }
            }
            acc = r.add(&acc, &t);
        }
        acc
    }

    /// Coefficient-wise image in another ring.
    pub fn map_coeffs<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> Poly<S> {
        let mut out = Poly::zero(target, self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// The same polynomial viewed in `n` variables (`n` at least the number
    /// of variables actually used).
    pub fn with_nvars(&self, n: usize) -> Self {
        assert!(n <= MAX_VARS);
        for m in self.terms.keys() {
            assert!((n..MAX_VARS).all(|i| m.exp(i) == 0), "variable out of range");
        }
        Poly { ring: self.ring.clone(), n, terms: self.terms.clone() }
    }

    /// Coefficient vector in the given column order.
    pub fn coefficients_in(&self, cols: &[Monomial]) -> Vec<R::Elem> {
        cols.iter().map(|m| self.coeff(m)).collect()
    }

    /// JSON form: `{"n": n, "terms": [[[e1, ..., en], coeff], ...]}` with
    /// terms in descending order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!([m.exps(self.n), self.ring.elem_to_json(c)]))
            .collect();
        json!({ "n": self.n, "terms": terms })
    }

    pub fn from_json(ring: &R, v: &serde_json::Value) -> Result<Self> {
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::Parse("polynomial JSON needs an integer field n".into()))? as usize;
        if n > MAX_VARS {
            return Err(Error::Parse(format!("too many variables: {n}")));
        }
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial JSON needs a terms array".into()))?;
        let mut p = Poly::zero(ring, n);
        for t in terms {
            let exps = t[0]
                .as_array()
                .ok_or_else(|| Error::Parse(format!("bad term {t}")))?;
            if exps.len() != n {
                return Err(Error::Parse(format!("term {t} has the wrong number of exponents")));
            }
            let exps = exps
                .iter()
                .map(|e| {
                    e.as_u64()
                        .filter(|&x| x <= u16::MAX as u64)
                        .map(|x| x as u32)
                        .ok_or_else(|| Error::Parse(format!("bad exponent {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            p.add_term(Monomial::new(&exps), ring.elem_from_json(&t[1])?);
        }
        Ok(p)
    }
}

impl<R: ExactDiv> Poly<R> {
    /// `self / divisor` if the division is exact.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.check_compatible(divisor);
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.ring, self.n);
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm)?;
            let qc = self.ring.try_div(c, &lc)?;
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
            quo.add_term(qm, qc);
        }
        Some(quo)
    }

    /// Divide every coefficient by `c`, if each division is exact.
    pub fn div_scalar(&self, c: &R::Elem) -> Option<Self> {
        let mut out = Self::zero(&self.ring, self.n);
        for (m, v) in &self.terms {
            out.add_term(*m, self.ring.try_div(v, c)?);
        }
        Some(out)
    }
}

pub(crate) fn is_permutation(sigma: &[usize]) -> bool {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    true
}

/// Composition `(sigma . tau)(i) = sigma(tau(i))`.
pub fn compose_perms(sigma: &[usize], tau: &[usize]) -> Vec<usize> {
    tau.iter().map(|&t| sigma[t]).collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Sign of a permutation.
pub fn perm_sign(sigma: &[usize]) -> i64 {
    let mut seen = vec![false; sigma.len()];
    let mut sign = 1;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = sigma[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

impl<R: Ring> fmt::Display for Poly<R> {
    /// Terms in descending order as `c * x1^a x2^b`; exponents of 1 are
    /// written bare and absent variables are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", self.ring.display(c))?;
            let vars: Vec<String> = (0..self.n)
                .filter(|&i| m.exp(i) > 0)
                .map(|i| match m.exp(i) {
                    1 => format!("x{}", i + 1),
                    e => format!("x{}^{e}", i + 1),
                })
                .collect();
            if !vars.is_empty() {
                write!(f, " * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}
