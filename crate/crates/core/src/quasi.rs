//! Graded components of quasi-invariants as exact nullspaces.
//!
//! A degree-`d` polynomial is quasi-invariant iff, for every pair `i < j`,
//! the divisibility conditions on `(1 - s_ij) P` hold. Each condition is
//! linear in the coefficients of `P`, so a graded component is the
//! nullspace of a sparse constraint matrix whose columns are the degree-`d`
//! monomials in descending graded-lex order.
//!
//! Ordinary case: substituting `x_i = x_j + u` into
//! `x_i^a x_j^b - x_i^b x_j^a` gives `sum_k (C(a,k) - C(b,k)) u^k x_j^{a+b-k}`,
//! and the coefficients of `u^1 .. u^{2m}` must vanish.
//!
//! Deformed case: the remainder of `x_i^a` modulo the monic product
//! `prod_k (x_i - q^k x_j)` is `sum_r rho[a][r] x_i^r x_j^{a-r}`, and the
//! remainder of `(1 - s_ij) P` must vanish.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::coeffs::Field;
use crate::error::{Error, Result};
use crate::linalg::SparseRow;
use crate::poly::{
    divisibility_order, isotypic_project, q_divisibility_test, q_remainder_table, sign_product,
    IsotypicLabel, Monomial, Poly, MAX_VARS,
};

/// Check the inputs shared by every quasi-invariant computation.
pub fn validate<F: Field>(field: &F, n: usize, q_deformed: bool) -> Result<()> {
    if !(2..=MAX_VARS).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} must be between 2 and {MAX_VARS}")));
    }
    let p = field.characteristic();
    if p != 0 && p as usize <= n {
        return Err(Error::BadCharacteristic(format!(
            "characteristic {p} divides {n}!; the computation must be non-modular (p > n)"
        )));
    }
    if q_deformed && field.q_elem().is_none() {
        return Err(Error::InvalidDomain("the q-deformed condition needs a domain carrying q".into()));
    }
    Ok(())
}

/// Default truncation degree: one past the degree of the sign generator.
pub fn default_d_max(n: usize, m: u32) -> u32 {
    (n * (n - 1) / 2) as u32 * (2 * m + 1) + 1
}

/// Constraint matrix for degree `d`, columns indexed by `cols`.
pub fn constraint_rows<F: Field>(
    field: &F,
    n: usize,
    m: u32,
    cols: &[Monomial],
    q_deformed: bool,
) -> Result<Vec<SparseRow<F::Elem>>> {
    if m == 0 && !q_deformed {
        return Ok(Vec::new());
    }
    let d = cols.first().map(|c| c.degree()).unwrap_or(0);
    // Per-exponent row coefficients: coef[a][t] for t in 0..width.
    let (coef, width, first): (Vec<Vec<F::Elem>>, usize, u32) = if q_deformed {
        (q_remainder_table(field, m, d)?, (2 * m + 1) as usize, 0)
    } else {
        let table = (0..=d)
            .map(|a| (1..=2 * m).map(|k| field.from_bigint(&binomial(a as u64, k as u64))).collect())
            .collect();
        (table, (2 * m) as usize, 1)
    };
    let mut rows: BTreeMap<(usize, usize, u32, Monomial), SparseRow<F::Elem>> = BTreeMap::new();
    let mut pair = 0;
    for i in 0..n {
        for j in i + 1..n {
            for (c, mono) in cols.iter().enumerate() {
                let a = mono.exp(i);
                let b = mono.exp(j);
                if a == b {
                    continue;
                }
                let mut rest = *mono;
                rest.set_exp(i, 0);
                rest.set_exp(j, 0);
                for t in 0..width {
                    let v = field.sub(&coef[a as usize][t], &coef[b as usize][t]);
                    if field.is_zero(&v) {
                        continue;
                    }
                    // Row key: pair, order (u-power or x_i-power), combined
                    // degree of x_i x_j, remaining variables.
                    let key = (pair, t, a + b - if q_deformed { 0 } else { t as u32 + first }, rest);
                    rows.entry(key).or_default().push((c, v));
                }
            }
            pair += 1;
        }
    }
    Ok(rows.into_values().collect())
}

/// Exact basis of the degree-`d` component, in reduced echelon form with
/// respect to the descending graded-lex monomial order.
pub fn quasi_basis<F: Field>(field: &F, n: usize, m: u32, d: u32, q_deformed: bool) -> Result<Vec<Poly<F>>> {
    validate(field, n, q_deformed)?;
    let cols = Monomial::all_of_degree(n, d);
    let rows = constraint_rows(field, n, m, &cols, q_deformed)?;
    let ns = field.nullspace(rows, cols.len());
    Ok(ns
        .into_iter()
        .map(|v| Poly::from_terms(field, n, cols.iter().copied().zip(v)))
        .collect())
}

/// `dim Q_m[d]`, from the rank of the constraint matrix.
pub fn quasi_dimension<F: Field>(field: &F, n: usize, m: u32, d: u32, q_deformed: bool) -> Result<usize> {
    validate(field, n, q_deformed)?;
    let cols = Monomial::all_of_degree(n, d);
    let rows = constraint_rows(field, n, m, &cols, q_deformed)?;
    Ok(cols.len() - field.rank(rows))
}

/// Direct membership test, independent of the constraint matrix.
pub fn is_quasi_invariant<F: Field>(p: &Poly<F>, m: u32, q_deformed: bool) -> Result<bool> {
    let n = p.nvars();
    for i in 0..n {
        for j in i + 1..n {
            let diff = p.sub(&p.swap(i, j));
            let ok = if q_deformed {
                q_divisibility_test(&diff, i, j, m)?
            } else {
                divisibility_order(&diff, i, j).is_none_or(|k| k >= 2 * m + 1)
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Rank of a family of polynomials over a field.
pub fn rank_of<F: Field>(field: &F, polys: &[Poly<F>]) -> usize {
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let mut monos: Vec<Monomial> = polys.iter().flat_map(|p| p.terms().map(|(m, _)| *m)).collect();
    monos.sort_by(|a, b| b.cmp(a));
    monos.dedup();
    for (k, m) in monos.iter().enumerate() {
        index.insert(*m, k);
    }
    let rows = polys
        .iter()
        .map(|p| {
            let mut r: SparseRow<F::Elem> = p.terms().map(|(m, c)| (index[m], c.clone())).collect();
            r.sort_by_key(|e| e.0);
            r
        })
        .collect();
    field.rank(rows)
}

/// Whether `p` lies in the span of `basis`.
pub fn in_span<F: Field>(field: &F, basis: &[Poly<F>], p: &Poly<F>) -> bool {
    let r = rank_of(field, basis);
    let mut all = basis.to_vec();
    all.push(p.clone());
    rank_of(field, &all) == r
}

/// Truncated Hilbert series and its numerator over `prod_{d=1}^n (1 - t^d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertData {
    pub n: usize,
    pub m: u32,
    pub d_max: u32,
    /// `dims[d] = dim Q_m[d]` for `d = 0..=d_max`.
    pub dims: Vec<usize>,
    /// Nonzero `(exponent, coefficient)` pairs of the numerator through
    /// `d_max`.
    pub numerator: Vec<(u32, i64)>,
    pub denominator_degrees: Vec<u32>,
}

impl HilbertData {
    pub fn from_dims(n: usize, m: u32, dims: Vec<usize>) -> Self {
        let d_max = dims.len() as u32 - 1;
        let mut series: Vec<i64> = dims.iter().map(|&x| x as i64).collect();
        for k in 1..=n {
            for e in (k..series.len()).rev() {
                series[e] -= series[e - k];
            }
        }
        let numerator = series
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (e as u32, c))
            .collect();
        HilbertData {
            n,
            m,
            d_max,
            dims,
            numerator,
            denominator_degrees: (1..=n as u32).collect(),
        }
    }

    pub fn numerator_coeff(&self, e: u32) -> i64 {
        self.numerator.iter().find(|t| t.0 == e).map(|t| t.1).unwrap_or(0)
    }

    /// Degree through which the numerator is guaranteed complete if it has
    /// no terms above `d_max`: `d_max - n(n+1)/2`.
    pub fn guard_degree(&self) -> i64 {
        self.d_max as i64 - (self.n * (self.n + 1) / 2) as i64
    }

    pub fn has_nonnegative_numerator(&self) -> bool {
        self.numerator.iter().all(|t| t.1 >= 0)
    }

    /// Symmetry `t^e <-> t^{top - e}` of the numerator, where `top` is the
    /// sign generator degree. `None` when `d_max < top`.
    pub fn is_palindromic(&self) -> Option<bool> {
        let top = (self.n * (self.n - 1) / 2) as u32 * (2 * self.m + 1);
        if self.d_max < top {
            return None;
        }
        Some((0..=top).all(|e| self.numerator_coeff(e) == self.numerator_coeff(top - e)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,dim\r\n");
        for (d, x) in self.dims.iter().enumerate() {
            s.push_str(&format!("{d},{x}\r\n"));
        }
        s
    }
}

/// Dimensions through `d_max` (default [`default_d_max`]) and the numerator.
/// Degrees are computed in parallel; the result does not depend on the
/// thread count.
pub fn hilbert_data<F: Field>(field: &F, n: usize, m: u32, d_max: Option<u32>, q_deformed: bool) -> Result<HilbertData> {
    validate(field, n, q_deformed)?;
    let d_max = d_max.unwrap_or_else(|| default_d_max(n, m));
    // Largest degrees first so the expensive ones start early.
    let mut dims: Vec<(u32, usize)> = (0..=d_max)
        .rev()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| quasi_dimension(field, n, m, d, q_deformed).map(|x| (d, x)))
        .collect::<Result<Vec<_>>>()?;
    dims.sort();
    Ok(HilbertData::from_dims(n, m, dims.into_iter().map(|t| t.1).collect()))
}

/// Dimension of the `label` slice of `Q_m[d]`, by projecting a basis.
pub fn isotypic_dimension<F: Field>(
    field: &F,
    n: usize,
    m: u32,
    d: u32,
    label: IsotypicLabel,
    q_deformed: bool,
) -> Result<usize> {
    let basis = quasi_basis(field, n, m, d, q_deformed)?;
    let projected = basis
        .iter()
        .map(|p| isotypic_project(p, label))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_of(field, &projected))
}

/// Least degree carrying a standard-isotypic quasi-invariant (`n = 3`).
/// The value must lie in `[2m+1, 3m+1]`.
pub fn std_generator_degree<F: Field>(field: &F, m: u32, q_deformed: bool) -> Result<u32> {
    validate(field, 3, q_deformed)?;
    for e in 0..=3 * m + 1 {
        if isotypic_dimension(field, 3, m, e, IsotypicLabel::Std, q_deformed)? > 0 {
            if e < 2 * m + 1 {
                return Err(Error::TheoremViolation(format!(
                    "standard generator in degree {e} below 2m+1 = {}",
                    2 * m + 1
                )));
            }
            return Ok(e);
        }
    }
    Err(Error::TheoremViolation(format!(
        "no standard generator in degrees up to 3m+1 = {}",
        3 * m + 1
    )))
}

/// The free generator of the sign component, checked for membership.
pub fn sign_generator<F: Field>(field: &F, n: usize, m: u32, q_deformed: bool) -> Result<Poly<F>> {
    validate(field, n, q_deformed)?;
    if field.characteristic() == 2 {
        return Err(Error::BadCharacteristic("the sign component needs characteristic other than 2".into()));
    }
    let p = sign_product(field, n, m, q_deformed)?;
    if !is_quasi_invariant(&p, m, q_deformed)? {
        return Err(Error::MembershipFailure("sign generator fails the divisibility test".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CyclotomicField, FormalQ, PrimeField, Rationals, Ring};
    use crate::poly::vandermonde;

    #[test]
    fn basis_examples() {
        // Coefficient of t^3 in (1 + t^3) / ((1 - t)(1 - t^2)).
        let b = quasi_basis(&Rationals, 2, 1, 3, false).unwrap();
        assert_eq!(b.len(), 3);
        for p in &b {
            assert!(is_quasi_invariant(p, 1, false).unwrap());
        }
        let x12 = Poly::linear_diff(&Rationals, 2, 0, 1, &Rationals.one());
        assert!(in_span(&Rationals, &b, &x12.pow(3)));
        assert_eq!(quasi_basis(&Rationals, 3, 1, 0, false).unwrap().len(), 1);
        assert_eq!(quasi_dimension(&Rationals, 3, 1, 4, false).unwrap(), 6);
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(quasi_dimension(&f7, 3, 1, 4, false).unwrap(), 6);
    }

    #[test]
    fn modular_rejected() {
        let f3 = PrimeField::new(3).unwrap();
        assert!(matches!(quasi_basis(&f3, 3, 1, 2, false), Err(Error::BadCharacteristic(_))));
        assert!(matches!(quasi_basis(&Rationals, 3, 1, 2, true), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn hilbert_small() {
        let h = hilbert_data(&Rationals, 3, 1, Some(12), false).unwrap();
        assert_eq!(h.numerator, vec![(0, 1), (4, 2), (5, 2), (9, 1)]);
        assert_eq!(h.is_palindromic(), Some(true));
        let h0 = hilbert_data(&Rationals, 3, 0, None, false).unwrap();
        assert_eq!(h0.numerator, vec![(0, 1), (1, 2), (2, 2), (3, 1)]);
        let h2 = hilbert_data(&Rationals, 2, 2, Some(8), false).unwrap();
        assert_eq!(h2.numerator, vec![(0, 1), (5, 1)]);
    }

    #[test]
    fn isotypic_examples() {
        assert_eq!(isotypic_dimension(&Rationals, 3, 1, 9, IsotypicLabel::Sign, false).unwrap(), 1);
        assert_eq!(isotypic_dimension(&Rationals, 3, 1, 3, IsotypicLabel::Std, false).unwrap(), 0);
        assert_eq!(isotypic_dimension(&Rationals, 3, 0, 1, IsotypicLabel::Std, false).unwrap(), 2);
        assert_eq!(std_generator_degree(&Rationals, 1, false).unwrap(), 4);
    }

    #[test]
    fn sign_generators() {
        let s = sign_generator(&Rationals, 2, 0, false).unwrap();
        assert_eq!(s, Poly::linear_diff(&Rationals, 2, 0, 1, &Rationals.one()));
        let s3 = sign_generator(&Rationals, 3, 1, false).unwrap();
        assert_eq!(s3, vandermonde(&Rationals, 3).pow(3));
        let fq = FormalQ;
        let sq = sign_generator(&fq, 2, 1, true).unwrap();
        assert_eq!(sq.homogeneous_degree(), Some(3));
    }

    #[test]
    fn q_deformed_n2_and_root_of_unity() {
        let c3 = CyclotomicField::new(3).unwrap();
        // Three symmetric cubics plus the orbit of x1^3 - x2^3.
        assert_eq!(quasi_dimension(&c3, 3, 1, 3, true).unwrap(), 5);
        let fq = FormalQ;
        assert_eq!(quasi_dimension(&fq, 2, 1, 3, true).unwrap(), 3);
        for p in quasi_basis(&c3, 3, 1, 3, true).unwrap() {
            assert!(is_quasi_invariant(&p, 1, true).unwrap());
        }
    }
}
