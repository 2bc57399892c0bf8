//! The Opdam shift operator in three variables and the scalars it produces on
//! the generator chain.
//!
//! `O_m` maps `Q_{m-1}` into `Q_m`, preserves degree and commutes with `S_3`.
//! Applied to the standard generators it gives
//!
//! ```text
//! O_{m+1} P3 A_m   = a_m A_{m+1}      O_{m+1} P3 B_m   = b_m B_{m+1}
//! O_{m+1} P2 B_m   = d_m A_{m+1}      O_{m+1} P2^2 A_m = e_m B_{m+1}
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{strip_2_3, valuation, valuation_int};
use crate::coeffs::{ExactDiv, Integers, Ring};
use crate::error::{Error, Result};
use crate::generators::GeneratorChain;
use crate::poly::{elementary_invariants, vandermonde, Poly};

const CYCLES: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];

fn dpair<R: Ring>(p: &Poly<R>, i: usize, j: usize) -> Poly<R> {
    p.derivative(i).sub(&p.derivative(j))
}

fn lin<R: Ring>(ring: &R, i: usize, j: usize) -> Poly<R> {
    Poly::linear_diff(ring, 3, i, j, &ring.one())
}

/// The constant term `6(1 - 2m)(1 - 3m)(2 - 3m)`.
pub fn opdam_constant(m: u32) -> BigInt {
    let m = BigInt::from(m);
    let one = BigInt::one();
    BigInt::from(6) * (&one - &m * 2) * (&one - &m * 3) * (BigInt::from(2) - &m * 3)
}

/// Apply `O_m` to a polynomial in three variables.
///
/// The first-order polynomial coefficient is `16m^2 - 18m + 6`; this is the
/// value for which the operator agrees with the Dunkl composition on
/// symmetric polynomials (checked in the tests for several `m`).
///
/// The rational terms are collected over the common denominator
/// `(x1 - x2)(x1 - x3)(x2 - x3)` and divided out exactly; a remainder means
/// the input is not `(m-1)`-quasi-invariant.
pub fn opdam_apply<R: ExactDiv>(m: u32, p: &Poly<R>) -> Result<Poly<R>> {
    if p.nvars() != 3 {
        return Err(Error::InvalidArgument("the shift operator is implemented for three variables".into()));
    }
    let ring = p.ring();
    let mi = m as i64;
    let v = vandermonde(ring, 3);

    let third = dpair(&dpair(&dpair(p, 0, 1), 0, 2), 1, 2);
    let mut out = v.mul(&third);
    out = out.add(&p.scale(&ring.from_bigint(&opdam_constant(m))));

    let c2a = ring.from_i64(3 * mi - 2);
    let c2b = ring.from_i64(1 - 2 * mi);
    let c1 = ring.from_i64(16 * mi * mi - 18 * mi + 6);
    let mut rational = Poly::zero(ring, 3);
    for [a, b, c] in CYCLES {
        let g1 = dpair(p, a, b);
        let g2 = dpair(&g1, a, b);
        let ab = lin(ring, a, b);
        let ac = lin(ring, a, c);
        let bc = lin(ring, b, c);
        let second = ac.mul(&bc).scale(&c2a).add(&ab.pow(2).scale(&c2b));
        out = out.add(&second.mul(&g2));
        out = out.add(&ab.scale(&c1).mul(&g1));
        // (x_b - x_c)^2/(x_c - x_a) - (x_a - x_c)^2/(x_c - x_b)
        //   = ((x_a - x_c)^3 - (x_b - x_c)^3) / ((x_a - x_c)(x_b - x_c)),
        // and (x_a - x_c)(x_b - x_c)(x_a - x_b) is the same for every cycle.
        let num = ac.pow(3).sub(&bc.pow(3));
        rational = rational.add(&num.mul(&ab).mul(&g1));
    }
    if mi != 0 && mi != 1 {
        let quotient = rational
            .div_exact(&v)
            .ok_or_else(|| Error::DenominatorResidue(format!("O_{m} applied to a non-quasi-invariant")))?;
        out = out.add(&quotient.scale(&ring.from_i64(4 * mi * (mi - 1))));
    }
    Ok(out)
}

/// `(1 - s_ij) g / (x_i - x_j)`, exact on polynomials.
fn divided_difference<R: ExactDiv>(g: &Poly<R>, i: usize, j: usize) -> Poly<R> {
    g.sub(&g.swap(i, j))
        .div_exact(&lin(g.ring(), i, j))
        .expect("divided differences are polynomial")
}

/// The Dunkl operator `D_i(k) = d_i - k sum_{j != i} (1 - s_ij) / (x_i - x_j)`.
pub fn dunkl<R: ExactDiv>(k: i64, i: usize, g: &Poly<R>) -> Poly<R> {
    let ring = g.ring();
    let mut out = g.derivative(i);
    let kk = ring.from_i64(k);
    for j in 0..g.nvars() {
        if j != i {
            out = out.sub(&divided_difference(g, i, j).scale(&kk));
        }
    }
    out
}

/// `prod_{i<j} (D_i(k) - D_j(k)) prod_{i<j} (x_i - x_j)` applied to `f`.
/// This agrees with `O_k` on symmetric `f` only.
pub fn dunkl_composition<R: ExactDiv>(k: i64, f: &Poly<R>) -> Poly<R> {
    let mut g = vandermonde(f.ring(), 3).mul(f);
    for (i, j) in [(1, 2), (0, 2), (0, 1)] {
        g = dunkl(k, i, &g).sub(&dunkl(k, j, &g));
    }
    g
}

/// Ratio `image / generator`, which must be an integer scalar.
fn scalar_ratio(image: &Poly<Integers>, generator: &Poly<Integers>, what: &str) -> Result<BigInt> {
    let (gm, gc) = generator
        .leading_term()
        .ok_or_else(|| Error::NotProportional(format!("{what}: zero generator")))?;
    let c = image.coeff(gm);
    let c = Integers
        .try_div(&c, gc)
        .ok_or_else(|| Error::NotProportional(format!("{what}: non-integral ratio")))?;
    if *image != generator.scale(&c) {
        return Err(Error::NotProportional(format!("{what}: image is not a multiple of the generator")));
    }
    Ok(c)
}

/// The four scalars at level `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarEntry {
    pub m: u32,
    pub a: BigInt,
    pub b: BigInt,
    pub d: BigInt,
    pub e: BigInt,
}

/// Which of the four scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    A,
    B,
    D,
    E,
}

impl Which {
    pub const ALL: [Which; 4] = [Which::A, Which::B, Which::D, Which::E];
}

impl ScalarEntry {
    pub fn get(&self, w: Which) -> &BigInt {
        match w {
            Which::A => &self.a,
            Which::B => &self.b,
            Which::D => &self.d,
            Which::E => &self.e,
        }
    }
}

/// Scalars at level `lower.m`, given the chain at `lower.m` and `lower.m + 1`.
pub fn scalar_chain(lower: &GeneratorChain, upper: &GeneratorChain) -> Result<ScalarEntry> {
    if upper.m != lower.m + 1 {
        return Err(Error::InvalidArgument("chain levels must be consecutive".into()));
    }
    let z = &Integers;
    let (p2, p3) = elementary_invariants(z);
    let (a0, b0) = (lower.a(z), lower.b(z));
    let (a1, b1) = (upper.a(z), upper.b(z));
    let shift = |f: Poly<Integers>| opdam_apply(upper.m, &f);
    Ok(ScalarEntry {
        m: lower.m,
        a: scalar_ratio(&shift(p3.mul(&a0))?, &a1, "a")?,
        b: scalar_ratio(&shift(p3.mul(&b0))?, &b1, "b")?,
        d: scalar_ratio(&shift(p2.mul(&b0))?, &a1, "d")?,
        e: scalar_ratio(&shift(p2.pow(2).mul(&a0))?, &b1, "e")?,
    })
}

/// `v_p(x)` for nonzero rational `x`.
pub fn valuation_profile(x: &BigRational, p: u64) -> Result<i64> {
    valuation(x, p)
}

/// `v_p` of an integer scalar; `None` when the scalar vanishes.
pub fn scalar_valuation(x: &BigInt, p: u64) -> Option<u32> {
    valuation_int(x, p).ok()
}

fn residues(w: Which, q: u64) -> Vec<u64> {
    match w {
        Which::A => vec![1 % q, 2 * (q / 3) % q],
        Which::B => vec![2 % q, (2 * ((q + 1) / 3) + q - 1) % q],
        Which::D if q % 6 == 5 => vec![(2 * q - 4) / 3 % q, (2 * q - 1) / 3 % q],
        Which::E if q % 6 == 1 => vec![(2 * q - 5) / 3 % q, (2 * q - 2) / 3 % q],
        _ => vec![],
    }
}

/// The `b` residue written as `2 floor(p^k / 3) - 1`. It agrees with
/// [`residues`] for `p^k = 1 mod 3` and is off by 2 otherwise.
fn residues_alt(w: Which, q: u64) -> Vec<u64> {
    match w {
        Which::B => vec![2 % q, (2 * (q / 3) + q - 1) % q],
        _ => residues(w, q),
    }
}

fn count_matches(m: u32, p: u64, which: Which, res: fn(Which, u64) -> Vec<u64>) -> Option<u32> {
    match (which, m) {
        (Which::A, 1) | (Which::B, 2) => return None,
        _ => {}
    }
    let bound = 3 * m as u64 + 3;
    let mut q = p;
    let mut count = 0;
    while q <= bound {
        if res(which, q).contains(&(m as u64 % q)) {
            count += 1;
        }
        q *= p;
    }
    Some(count)
}

/// Predicted `v_p` of a scalar: the number of `k > 0` with `m` in the
/// listed residue classes mod `p^k`:
///
/// * `a`: `1`, `2 floor(p^k / 3)`
/// * `b`: `2`, `2 floor((p^k + 1) / 3) - 1`
/// * `d`: `(2p^k - 4)/3`, `(2p^k - 1)/3` when `p^k = 5 mod 6`
/// * `e`: `(2p^k - 5)/3`, `(2p^k - 2)/3` when `p^k = 1 mod 6`
/// `None` means every `k` qualifies, which
/// happens exactly for `a` at `m = 1` and `b` at `m = 2`.
///
/// Only `p^k <= 3m + 3` is searched: the non-constant residues are at least
/// `(2p^k - 5)/3`, which exceeds `m` past that bound, and the constant
/// residues 1, 2 can match `m < p^k` only when `m` equals them.
pub fn congruence_predicate(m: u32, p: u64, which: Which) -> Option<u32> {
    count_matches(m, p, which, residues)
}

/// [`congruence_predicate`] with the `b` residue `2 floor(p^k / 3) - 1`.
pub fn congruence_predicate_alt(m: u32, p: u64, which: Which) -> Option<u32> {
    count_matches(m, p, which, residues_alt)
}

/// Outcome of one product relation after removing signs and factors 2, 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationOutcome {
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub m: u32,
    /// `a_m b_m c_{m+1}` against `(m-1)(m-2)(3m+1)(3m+2) c_m`.
    pub ab: RelationOutcome,
    /// `d_m e_m c_{m+1}` against `(3m+1)(3m+2) c_m`.
    pub de: RelationOutcome,
}

fn compare(lhs: BigInt, rhs: BigInt) -> RelationOutcome {
    let (l, r) = (strip_2_3(&lhs), strip_2_3(&rhs));
    RelationOutcome { equal: l == r, lhs: l.to_string(), rhs: r.to_string() }
}

/// Check both product relations at level `s.m`.
pub fn relation_check(s: &ScalarEntry, c_m: &BigInt, c_next: &BigInt) -> RelationReport {
    let m = BigInt::from(s.m);
    let lin = (&m * 3 + 1) * (&m * 3 + 2);
    let ab_factor = (&m - 1) * (&m - 2) * &lin;
    RelationReport {
        m: s.m,
        ab: compare(&s.a * &s.b * c_next, ab_factor * c_m),
        de: compare(&s.d * &s.e * c_next, lin * c_m),
    }
}

/// One valuation comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationRow {
    pub m: u32,
    pub p: u64,
    pub which: Which,
    /// `null` when the scalar vanishes.
    pub computed: Option<u32>,
    pub predicted: Option<u32>,
    /// Prediction with the `b` residue `2 floor(p^k / 3) - 1`.
    pub predicted_alt: Option<u32>,
    pub matches: bool,
}

pub fn valuation_rows(s: &ScalarEntry, primes: &[u64]) -> Vec<ValuationRow> {
    let mut rows = Vec::new();
    for &p in primes {
        for w in Which::ALL {
            let computed = scalar_valuation(s.get(w), p);
            let predicted = congruence_predicate(s.m, p, w);
            let predicted_alt = congruence_predicate_alt(s.m, p, w);
            rows.push(ValuationRow {
                m: s.m,
                p,
                which: w,
                computed,
                predicted,
                predicted_alt,
                matches: computed == predicted,
            });
        }
    }
    rows
}

/// Serializable record for one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub m: u32,
    pub a: String,
    pub b: String,
    pub d: String,
    pub e: String,
    pub valuations: Vec<ValuationRow>,
    pub relations: RelationReport,
    pub agree: bool,
}

/// Scalars, valuations and relations at level `chain[i].m` using
/// `chain[i]` and `chain[i + 1]`.
pub fn shift_record(lower: &GeneratorChain, upper: &GeneratorChain, primes: &[u64]) -> Result<ShiftRecord> {
    let s = scalar_chain(lower, upper)?;
    let valuations = valuation_rows(&s, primes);
    let relations = relation_check(&s, &lower.c, &upper.c);
    let agree = valuations.iter().all(|r| r.matches) && relations.ab.equal && relations.de.equal;
    Ok(ShiftRecord {
        m: s.m,
        a: s.a.to_string(),
        b: s.b.to_string(),
        d: s.d.to_string(),
        e: s.e.to_string(),
        valuations,
        relations,
        agree,
    })
}

impl ShiftRecord {
    pub fn scalar(&self, w: Which) -> &str {
        match w {
            Which::A => &self.a,
            Which::B => &self.b,
            Which::D => &self.d,
            Which::E => &self.e,
        }
    }

    pub fn is_zero(&self, w: Which) -> bool {
        self.scalar(w).parse::<BigInt>().map(|x| x.is_zero()).unwrap_or(false)
    }
}
