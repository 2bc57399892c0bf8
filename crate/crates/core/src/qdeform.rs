//! q-deformed quasi-invariants in three variables.
//!
//! Over `Q(q)` the standard generators are found directly: `A = D12 K` with
//! `D12 = prod_{k=-m}^{m}(x1 - q^k x2)` (cleared of negative powers) and `K`
//! symmetric in `x1, x2`, subject to the remaining divisibility conditions and
//! to `A + sA + s^2 A = 0` for the 3-cycle `s`. The wedge polynomial `c(q)`
//! vanishes exactly at the `q` where the Hilbert series jumps.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::coeffs::{CyclotomicField, Field, FormalQ, FractionField, IntPoly, PrimeField, QFrac, Ring};
use crate::error::{Error, Result};
use crate::generators::{char0_numerator, wedge_with};
use crate::linalg::SparseRow;
use crate::poly::{isotypic_project, sign_product, IsotypicLabel, Monomial, Poly};
use crate::quasi::{constraint_rows, hilbert_data, is_quasi_invariant, isotypic_dimension};

fn q_pow(k: u32) -> QFrac {
    FormalQ.from_base(&IntPoly::monomial(BigInt::one(), k as usize))
}

/// `prod_{k=0}^{m}(x1 - q^k x2) prod_{k=1}^{m}(q^k x1 - x2)`, which is
/// `q^{m(m+1)/2} prod_{k=-m}^{m}(x1 - q^k x2)`.
pub fn d12(m: u32) -> Poly<FormalQ> {
    let f = &FormalQ;
    let mut out = Poly::one(f, 3);
    for k in 0..=m {
        out = out.mul(&Poly::linear_diff(f, 3, 0, 1, &q_pow(k)));
    }
    for k in 1..=m {
        let mut g = Poly::term(f, 3, Monomial::var(0), q_pow(k));
        g.add_term(Monomial::var(1), f.neg(&f.one()));
        out = out.mul(&g);
    }
    out
}

/// Orbit sums `x1^a x2^b x3^c + x1^b x2^a x3^c` of degree `deg`.
fn sym12_basis(deg: u32) -> Vec<Poly<FormalQ>> {
    let f = &FormalQ;
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=a.min(deg - a) {
            let c = deg - a - b;
            let mut p = Poly::term(f, 3, Monomial::new(&[a, b, c]), f.one());
            if a != b {
                p.add_term(Monomial::new(&[b, a, c]), f.one());
            }
            out.push(p);
        }
    }
    out
}

/// Basis of the `s12`-antisymmetric standard quasi-invariants of degree
/// `2m + 1 + k_deg` over `Q(q)`.
pub fn q_std_antisymmetric(m: u32, k_deg: u32) -> Result<Vec<Poly<FormalQ>>> {
    let f = &FormalQ;
    let d = d12(m);
    let cands: Vec<Poly<FormalQ>> = sym12_basis(k_deg).iter().map(|k| d.mul(k)).collect();
    let cols = Monomial::all_of_degree(3, 2 * m + 1 + k_deg);
    let index: BTreeMap<Monomial, usize> = cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut by_col: Vec<Vec<(usize, QFrac)>> = vec![Vec::new(); cols.len()];
    for (j, c) in cands.iter().enumerate() {
        for (mono, v) in c.terms() {
            by_col[index[mono]].push((j, v.clone()));
        }
    }
    let mut rows: Vec<SparseRow<QFrac>> = Vec::new();
    for row in constraint_rows(f, 3, m, &cols, true)? {
        let mut acc: BTreeMap<usize, QFrac> = BTreeMap::new();
        for (c, rv) in &row {
            for (j, v) in &by_col[*c] {
                let e = acc.entry(*j).or_insert_with(|| f.zero());
                *e = f.add(e, &f.mul(rv, v));
            }
        }
        rows.push(acc.into_iter().filter(|(_, v)| !f.is_zero(v)).collect());
    }
    let mut orbit: BTreeMap<Monomial, Vec<(usize, QFrac)>> = BTreeMap::new();
    for (j, c) in cands.iter().enumerate() {
        let s = c.permute(&[1, 2, 0]);
        let o = c.add(&s).add(&s.permute(&[1, 2, 0]));
        for (mono, v) in o.terms() {
            orbit.entry(*mono).or_default().push((j, v.clone()));
        }
    }
    rows.extend(orbit.into_values());
    rows.retain(|r| !r.is_empty());
    let ns = f.nullspace(rows, cands.len());
    Ok(ns
        .into_iter()
        .map(|v| {
            v.iter()
                .zip(&cands)
                .filter(|(c, _)| !f.is_zero(c))
                .fold(Poly::zero(f, 3), |acc, (c, p)| acc.add(&p.scale(c)))
        })
        .collect())
}

/// Scale to coefficients in `Z[q]` with gcd 1 and a positive leading
/// coefficient on the leading term.
pub fn primitive_integral(p: &Poly<FormalQ>) -> Poly<FormalQ> {
    let f = &FormalQ;
    let mut l = IntPoly::one();
    for (_, c) in p.terms() {
        let g = l.gcd(c.denom());
        l = l.mul(c.denom()).div_exact(&g).expect("gcd divides");
    }
    let nums: Vec<(Monomial, IntPoly)> = p
        .terms()
        .map(|(m, c)| (*m, c.numer().mul(&l.div_exact(c.denom()).expect("lcm is a multiple"))))
        .collect();
    let mut g = IntPoly::zero();
    for (_, n) in &nums {
        g = g.gcd(n);
    }
    let lead_negative = nums.last().map(|(_, n)| n.leading().is_negative()).unwrap_or(false);
    if lead_negative {
        g = g.neg();
    }
    Poly::from_terms(
        f,
        3,
        nums.into_iter()
            .map(|(m, n)| (m, f.from_base(&n.div_exact(&g).expect("content divides")))),
    )
}

fn integral_coeff(p: &Poly<FormalQ>, m: &Monomial) -> IntPoly {
    let c = p.coeff(m);
    debug_assert!(c.denom().is_one());
    c.numer().clone()
}

/// gcd in `Z[q]` of the 2x2 minors of the coefficient matrix `[u, v]`.
fn minors_gcd(u: &Poly<FormalQ>, v: &Poly<FormalQ>) -> IntPoly {
    let monos: Vec<Monomial> = u.terms().chain(v.terms()).map(|(m, _)| *m).collect::<BTreeSet<_>>().into_iter().collect();
    let uc: Vec<IntPoly> = monos.iter().map(|m| integral_coeff(u, m)).collect();
    let vc: Vec<IntPoly> = monos.iter().map(|m| integral_coeff(v, m)).collect();
    let mut g = IntPoly::zero();
    for i in 0..monos.len() {
        for j in i + 1..monos.len() {
            let minor = uc[i].mul(&vc[j]).sub(&uc[j].mul(&vc[i]));
            if !minor.is_zero() {
                g = g.gcd(&minor);
            }
        }
    }
    g
}

/// The standard generators over `Q(q)`: `A` in degree `3m + 1` and a `B` in
/// degree `3m + 2` completing `(x1 + x2 + x3) A` to a saturated pair. Both
/// are `s12`-antisymmetric with coprime coefficients in `Z[q]`; the returned
/// integer polynomial is the saturation index `g` with `B = B0 / g`.
pub fn q_standard_generators(m: u32) -> Result<(Poly<FormalQ>, Poly<FormalQ>, IntPoly)> {
    let f = &FormalQ;
    let a_space = q_std_antisymmetric(m, m)?;
    if a_space.len() != 1 {
        return Err(Error::TheoremViolation(format!(
            "expected one antisymmetric standard generator in degree {}, found {}",
            3 * m + 1,
            a_space.len()
        )));
    }
    let a = primitive_integral(&a_space[0]);
    let e1 = Poly::var(f, 3, 0).add(&Poly::var(f, 3, 1)).add(&Poly::var(f, 3, 2));
    let e1a = primitive_integral(&e1.mul(&a));
    let b_space = q_std_antisymmetric(m, m + 1)?;
    if b_space.len() != 2 {
        return Err(Error::TheoremViolation(format!(
            "expected a two-dimensional antisymmetric slice in degree {}, found {}",
            3 * m + 2,
            b_space.len()
        )));
    }
    let b0 = b_space
        .iter()
        .map(primitive_integral)
        .find(|v| minors_gcd(&e1a, v).degree().is_some())
        .ok_or_else(|| Error::TheoremViolation("degree 3m+2 slice is spanned by (x1+x2+x3)A".into()))?;
    let g = minors_gcd(&e1a, &b0);
    Ok((a, b0, g))
}

/// `c(q)` with its cyclotomic factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QWedge {
    pub m: u32,
    /// Primitive, positive leading coefficient, not divisible by `q`.
    pub c: IntPoly,
    /// Orders `d` of the factors `Phi_d`, with multiplicity, ascending.
    pub cyclotomic_factors: Vec<u64>,
    /// What is left after removing the cyclotomic factors.
    pub remainder: IntPoly,
}

impl QWedge {
    /// Distinct `d` with `Phi_d | c(q)`.
    pub fn orders(&self) -> Vec<u64> {
        let mut v = self.cyclotomic_factors.clone();
        v.dedup();
        v
    }

    pub fn has_non_cyclotomic_factor(&self) -> bool {
        self.remainder.degree().unwrap_or(0) > 0
    }
}

/// Split off every `Phi_d` factor, `d <= deg + 1`.
pub fn cyclotomic_factors(c: &IntPoly) -> (Vec<u64>, IntPoly) {
    let mut rest = c.clone();
    let mut out = Vec::new();
    let bound = c.degree().unwrap_or(0) as u64 + 1;
    for d in 1..=bound {
        let phi = IntPoly::cyclotomic(d);
        if phi.degree().unwrap_or(0) > rest.degree().unwrap_or(0) {
            continue;
        }
        while let Some(q) = rest.div_exact(&phi) {
            out.push(d);
            rest = q;
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
        }
    }
    (out, rest)
}

/// The wedge polynomial: `A s23 B - B s23 A = c(q) prod_{i<j} prod_k (x_i - q^k x_j)`
/// up to a unit `+- q^l` and an integer content.
pub fn q_wedge_polynomial(m: u32) -> Result<QWedge> {
    let f = &FormalQ;
    let (a, b0, g) = q_standard_generators(m)?;
    let s = sign_product(f, 3, m, true)?;
    let c = wedge_with(&a, &b0, &s)?;
    if f.is_zero(&c) {
        return Err(Error::TheoremViolation("the q-deformed generators are dependent".into()));
    }
    let frac = f.frac(c.numer(), &c.denom().mul(&g)).expect("nonzero");
    if frac.denom().strip_q_power().degree() != Some(0) {
        return Err(Error::NormalizationFailure(format!("wedge scalar has denominator {}", frac.denom())));
    }
    let c = frac.numer().strip_q_power().primitive_part();
    let (cyclotomic_factors, remainder) = cyclotomic_factors(&c);
    Ok(QWedge { m, c, cyclotomic_factors, remainder })
}

/// Orders `p` at which a primitive `p`-th root of unity is known to change
/// the Hilbert series: the integers in
/// `[ceil((mn(n-2) + C(n,2)) / (C(n,2) - 1)), mn]`, or `None` when empty.
pub fn excluded_range(n: u32, m: u32) -> Result<Option<(u64, u64)>> {
    if n < 3 {
        return Err(Error::InvalidArgument("the range is defined for n >= 3".into()));
    }
    let (n, m) = (n as u64, m as u64);
    let c2 = n * (n - 1) / 2;
    let lo = (m * n * (n - 2) + c2).div_ceil(c2 - 1);
    let hi = m * n;
    Ok((lo <= hi).then_some((lo, hi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PmqCase {
    LargeP,
    OddSmallP,
    EvenSmallP,
}

/// The explicit low-degree quasi-invariant at a primitive `p`-th root of unity.
#[derive(Clone, Debug)]
pub struct PmqElement {
    pub n: usize,
    pub m: u32,
    pub p: u64,
    pub case: PmqCase,
    pub poly: Poly<CyclotomicField>,
    pub degree: u32,
}

/// Serialized form of a [`PmqElement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmqRecord {
    pub case: PmqCase,
    pub degree: u32,
    pub terms: usize,
}

impl PmqElement {
    pub fn record(&self) -> PmqRecord {
        PmqRecord { case: self.case, degree: self.degree, terms: self.poly.len() }
    }
}

/// Build `P_{m,q}` over `Q(zeta_p)` and verify membership, degree and
/// non-symmetry.
pub fn construct_pmq(n: usize, m: u32, p: u64) -> Result<PmqElement> {
    let range = excluded_range(n as u32, m)?;
    if !range.is_some_and(|(lo, hi)| lo <= p && p <= hi) {
        return Err(Error::RangeViolation(format!("p = {p} is outside the admissible range for n = {n}, m = {m}")));
    }
    let field = CyclotomicField::new(p)?;
    let f = &field;
    let pu = p as u32;
    let mut e1 = vec![0; n];
    e1[0] = pu;
    let mut e2 = vec![0; n];
    e2[1] = pu;
    let mut poly = Poly::term(f, n, Monomial::new(&e1), f.one());
    poly.add_term(Monomial::new(&e2), f.neg(&f.one()));
    let big = p >= 2 * m as u64 + 1;
    let case = if big {
        PmqCase::LargeP
    } else if p % 2 == 1 {
        PmqCase::OddSmallP
    } else {
        PmqCase::EvenSmallP
    };
    let k_start = match case {
        PmqCase::LargeP => m + 1,
        PmqCase::OddSmallP => (pu + 1) / 2,
        PmqCase::EvenSmallP => (pu + 2) / 2,
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if case == PmqCase::EvenSmallP && i < j {
                let mut s = Poly::var(f, n, i);
                s = s.add(&Poly::var(f, n, j));
                poly = poly.mul(&s);
            }
            for k in k_start..=m {
                let qk = f.q_power(k as i64).expect("q is invertible");
                poly = poly.mul(&Poly::linear_diff(f, n, i, j, &qk));
            }
        }
    }
    let c2 = (n * (n - 1) / 2) as u32;
    let expected = if big { pu } else { pu + c2 * (2 * m + 1 - pu) };
    let degree = poly.homogeneous_degree().unwrap_or(0);
    if degree != expected || degree > m * n as u32 {
        return Err(Error::MembershipFailure(format!("P_(m,q) has degree {degree}, expected {expected}")));
    }
    if !is_quasi_invariant(&poly, m, true)? {
        return Err(Error::MembershipFailure(format!("P_(m,q) is not quasi-invariant (n = {n}, m = {m}, p = {p})")));
    }
    if isotypic_project(&poly, IsotypicLabel::Triv)? == poly {
        return Err(Error::MembershipFailure("P_(m,q) is symmetric".into()));
    }
    Ok(PmqElement { n, m, p, case, poly, degree })
}

/// `P_{m,q}` together with a scan showing no standard element below its degree.
pub fn minimal_qstd_generator(m: u32, p: u64) -> Result<PmqElement> {
    let el = construct_pmq(3, m, p)?;
    let field = CyclotomicField::new(p)?;
    for e in 1..el.degree {
        if isotypic_dimension(&field, 3, m, e, IsotypicLabel::Std, true)? > 0 {
            return Err(Error::MinimalityFailure(format!(
                "standard element in degree {e} below deg P_(m,q) = {}",
                el.degree
            )));
        }
    }
    if isotypic_dimension(&field, 3, m, el.degree, IsotypicLabel::Std, true)? == 0 {
        return Err(Error::MinimalityFailure("no standard element in the degree of P_(m,q)".into()));
    }
    Ok(el)
}

/// `dim Q_m(3)[d]` in characteristic zero for `d <= d_max`, from
/// `(1 + 2t^{3m+1} + 2t^{3m+2} + t^{6m+3}) / ((1-t)(1-t^2)(1-t^3))`.
pub fn char0_dims(m: u32, d_max: u32) -> Vec<usize> {
    let len = d_max as usize + 1;
    let mut s = vec![0i64; len];
    for (e, c) in char0_numerator(m) {
        if (e as usize) < len {
            s[e as usize] += c;
        }
    }
    for k in 1..=3usize {
        for d in k..len {
            s[d] += s[d - k];
        }
    }
    s.into_iter().map(|x| x as usize).collect()
}

/// Dimensions compared across domains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flatness {
    pub d_max: u32,
    pub char0_dims: Vec<usize>,
    pub cyclotomic_dims: Vec<usize>,
    /// Over `F_p` (ordinary quasi-invariants) when `p` is a prime above 3.
    pub prime_field_dims: Option<Vec<usize>>,
    /// Over `Q(q)`, when requested.
    pub formal_dims: Option<Vec<usize>>,
    pub first_divergence: Option<u32>,
    pub agreement: bool,
    pub dominance_ok: bool,
}

/// Compare `Q_{m,zeta_p}(3)` against characteristic zero through `d_max`.
pub fn flatness_check(m: u32, p: u64, d_max: u32, with_formal: bool) -> Result<Flatness> {
    let field = CyclotomicField::new(p)?;
    let char0 = char0_dims(m, d_max);
    let cyc = hilbert_data(&field, 3, m, Some(d_max), true)?.dims;
    let prime = if p > 3 && is_prime_u64(p) {
        Some(hilbert_data(&PrimeField::new(p)?, 3, m, Some(d_max), false)?.dims)
    } else {
        None
    };
    let formal = if with_formal { Some(hilbert_data(&FormalQ, 3, m, Some(d_max), true)?.dims) } else { None };
    let first_divergence = (0..=d_max).find(|&d| char0[d as usize] != cyc[d as usize]);
    let mut dominance_ok = char0.iter().zip(&cyc).all(|(a, b)| a <= b);
    if let Some(pd) = &prime {
        dominance_ok &= cyc.iter().zip(pd).all(|(a, b)| a <= b);
    }
    if let Some(fd) = &formal {
        dominance_ok &= fd.iter().zip(&cyc).all(|(a, b)| a <= b);
    }
    Ok(Flatness {
        d_max,
        char0_dims: char0,
        cyclotomic_dims: cyc,
        prime_field_dims: prime,
        formal_dims: formal,
        first_divergence,
        agreement: first_divergence.is_none(),
        dominance_ok,
    })
}

fn poly_strings(p: &IntPoly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

/// Summary of the q-deformation analysis at one `(m, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QDeformationReport {
    pub n: u32,
    pub m: u32,
    pub p: u64,
    /// Coefficients of `c(q)`, constant term first.
    pub c_q: Vec<String>,
    /// Orders `d` with `Phi_d | c(q)`.
    pub flat_values_excluded: Vec<u64>,
    pub non_cyclotomic_remainder: Vec<String>,
    pub excluded_range: Option<(u64, u64)>,
    /// Whether the factor orders are exactly the integers in the range.
    pub conjecture_holds: bool,
    /// Whether `Phi_p | c(q)`.
    pub p_excluded: bool,
    pub flatness: Flatness,
    /// Whether the Hilbert series over `Q(zeta_p)` agrees with characteristic zero.
    pub agreement: bool,
    pub pmq: Option<PmqRecord>,
}

/// Factor orders of `c(q)` against the range, for one `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QWedgeRecord {
    pub m: u32,
    pub c_q: Vec<String>,
    pub flat_values_excluded: Vec<u64>,
    pub non_cyclotomic_remainder: Vec<String>,
    pub excluded_range: Option<(u64, u64)>,
    pub conjecture_holds: bool,
}

fn range_set(r: Option<(u64, u64)>) -> Vec<u64> {
    r.map(|(lo, hi)| (lo..=hi).collect()).unwrap_or_default()
}

/// `c(q)` record for the sweep; errors if a value proved to be excluded is
/// missing from the factor orders.
pub fn q_wedge_record(m: u32) -> Result<QWedgeRecord> {
    let w = q_wedge_polynomial(m)?;
    let range = excluded_range(3, m)?;
    let orders = w.orders();
    for p in range_set(range) {
        if !orders.contains(&p) {
            return Err(Error::TheoremViolation(format!("Phi_{p} does not divide c(q) at m = {m}")));
        }
    }
    Ok(QWedgeRecord {
        m,
        c_q: poly_strings(&w.c),
        conjecture_holds: orders == range_set(range) && !w.has_non_cyclotomic_factor(),
        flat_values_excluded: orders,
        non_cyclotomic_remainder: poly_strings(&w.remainder),
        excluded_range: range,
    })
}

/// Full report at `(n = 3, m, p)`.
pub fn qdeform_report(m: u32, p: u64, d_max: Option<u32>, with_formal: bool) -> Result<QDeformationReport> {
    if p < 2 {
        return Err(Error::InvalidArgument("the root of unity must have order at least 2".into()));
    }
    let w = q_wedge_record(m)?;
    let d_max = d_max.unwrap_or(6 * m + 4);
    let flatness = flatness_check(m, p, d_max, with_formal)?;
    let in_range = w.excluded_range.is_some_and(|(lo, hi)| lo <= p && p <= hi);
    let pmq = if in_range { Some(minimal_qstd_generator(m, p)?.record()) } else { None };
    let p_excluded = w.flat_values_excluded.contains(&p);
    if in_range && flatness.agreement && d_max >= 3 * m {
        return Err(Error::TheoremViolation(format!("no divergence at m = {m}, p = {p} although p is in range")));
    }
    Ok(QDeformationReport {
        n: 3,
        m,
        p,
        agreement: flatness.agreement,
        c_q: w.c_q,
        flat_values_excluded: w.flat_values_excluded,
        non_cyclotomic_remainder: w.non_cyclotomic_remainder,
        excluded_range: w.excluded_range,
        conjecture_holds: w.conjecture_holds,
        p_excluded,
        flatness,
        pmq,
    })
}
