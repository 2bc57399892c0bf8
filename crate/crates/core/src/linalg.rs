//! Sparse exact elimination.
//!
//! Rows are sparse vectors sorted by column. Elimination is incremental:
//! each incoming row is reduced against the current pivots and kept only if
//! something survives, so long redundant constraint systems never grow the
//! working set beyond the rank.

use std::collections::BTreeMap;

use crate::coeffs::{Field, FractionField, GcdDomain, Ring};

/// A sparse row: `(column, value)` pairs, strictly increasing columns, no
/// stored zeros.
pub type SparseRow<E> = Vec<(usize, E)>;

/// `a - c * b` on sparse rows.
fn axpy<R: Ring>(ring: &R, a: &SparseRow<R::Elem>, c: &R::Elem, b: &SparseRow<R::Elem>) -> SparseRow<R::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|t| t.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|t| t.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            let v = ring.neg(&ring.mul(c, &b[j].1));
            if !ring.is_zero(&v) {
                out.push((cb, v));
            }
            j += 1;
        } else {
            let v = ring.sub(&a[i].1, &ring.mul(c, &b[j].1));
            if !ring.is_zero(&v) {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// `x * a - y * b` on sparse rows.
fn comb<R: Ring>(
    ring: &R,
    x: &R::Elem,
    a: &SparseRow<R::Elem>,
    y: &R::Elem,
    b: &SparseRow<R::Elem>,
) -> SparseRow<R::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|t| t.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|t| t.0).unwrap_or(usize::MAX);
        let (col, v) = if ca < cb {
            i += 1;
            (ca, ring.mul(x, &a[i - 1].1))
        } else if cb < ca {
            j += 1;
            (cb, ring.neg(&ring.mul(y, &b[j - 1].1)))
        } else {
            i += 1;
            j += 1;
            (ca, ring.sub(&ring.mul(x, &a[i - 1].1), &ring.mul(y, &b[j - 1].1)))
        };
        if !ring.is_zero(&v) {
            out.push((col, v));
        }
    }
    out
}

fn scale_row<R: Ring>(ring: &R, c: &R::Elem, row: &mut SparseRow<R::Elem>) {
    for e in row.iter_mut() {
        e.1 = ring.mul(c, &e.1);
    }
}

fn value_at<'a, E>(row: &'a SparseRow<E>, col: usize) -> Option<&'a E> {
    row.binary_search_by_key(&col, |t| t.0).ok().map(|k| &row[k].1)
}

/// Echelon form over a field: pivot column -> row with leading entry 1.
fn field_echelon<F: Field>(field: &F, rows: Vec<SparseRow<F::Elem>>) -> BTreeMap<usize, SparseRow<F::Elem>> {
    let mut pivots: BTreeMap<usize, SparseRow<F::Elem>> = BTreeMap::new();
    for mut row in rows {
        row.retain(|e| !field.is_zero(&e.1));
        while let Some((lead, _)) = row.first() {
            match pivots.get(lead) {
                Some(p) => {
                    let c = row[0].1.clone();
                    row = axpy(field, &row, &c, p);
                }
                None => break,
            }
        }
        if let Some((lead, v)) = row.first().cloned() {
            let inv = field.inv(&v).expect("nonzero pivot");
            scale_row(field, &inv, &mut row);
            pivots.insert(lead, row);
        }
    }
    pivots
}

/// Default nullspace over a field: incremental echelon, then back
/// substitution to reduced form.
pub fn field_nullspace<F: Field>(field: &F, rows: Vec<SparseRow<F::Elem>>, ncols: usize) -> Vec<Vec<F::Elem>> {
    let mut pivots = field_echelon(field, rows);
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    // Clear entries above each pivot, from the right.
    for (idx, &c) in cols.iter().enumerate() {
        let prow = pivots[&c].clone();
        for &other in cols[idx + 1..].iter() {
            let r = pivots.get_mut(&other).expect("pivot row");
            if let Some(v) = value_at(r, c).cloned() {
                *r = axpy(field, r, &v, &prow);
            }
        }
    }
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivots.contains_key(&f) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[f] = field.one();
        for (&c, row) in pivots.iter() {
            if c < f {
                if let Some(x) = value_at(row, f) {
                    v[c] = field.neg(x);
                }
            }
        }
        basis.push(v);
    }
    basis
}

pub fn field_rank<F: Field>(field: &F, rows: Vec<SparseRow<F::Elem>>) -> usize {
    field_echelon(field, rows).len()
}

/// Divide a base-ring row by the gcd of its entries and fix the sign of the
/// leading entry.
fn make_primitive<D: GcdDomain>(dom: &D, row: &mut SparseRow<D::Elem>) {
    if row.is_empty() {
        return;
    }
    let mut g = dom.zero();
    for (_, v) in row.iter() {
        g = dom.gcd(&g, v);
        if dom.is_unit(&g) {
            break;
        }
    }
    if !dom.is_unit(&g) {
        for e in row.iter_mut() {
            e.1 = dom.div_exact(&e.1, &g);
        }
    }
    if dom.normalizing_sign(&row[0].1) {
        for e in row.iter_mut() {
            e.1 = dom.neg(&e.1);
        }
    }
}

fn to_base_row<F: FractionField>(field: &F, row: SparseRow<F::Elem>) -> SparseRow<<F::Base as Ring>::Elem> {
    let dom = field.base();
    let mut l = dom.one();
    let mut parts = Vec::with_capacity(row.len());
    for (c, v) in row {
        if field.is_zero(&v) {
            continue;
        }
        let (n, d) = field.numer_denom(&v);
        let g = dom.gcd(&l, &d);
        l = dom.mul(&l, &dom.div_exact(&d, &g));
        parts.push((c, n, d));
    }
    let mut out: SparseRow<_> = parts
        .into_iter()
        .map(|(c, n, d)| (c, dom.mul(&n, &dom.div_exact(&l, &d))))
        .collect();
    make_primitive(dom, &mut out);
    out
}

/// `p * r - r[col] * prow`, with the common gcd of the multipliers removed
/// and the result made primitive.
fn ff_eliminate<D: GcdDomain>(dom: &D, r: &SparseRow<D::Elem>, prow: &SparseRow<D::Elem>, col: usize) -> SparseRow<D::Elem> {
    let p = &prow[0].1;
    let rc = value_at(r, col).expect("entry present");
    let g = dom.gcd(p, rc);
    let x = dom.div_exact(p, &g);
    let y = dom.div_exact(rc, &g);
    let mut out = comb(dom, &x, r, &y, prow);
    make_primitive(dom, &mut out);
    out
}

fn ff_echelon<D: GcdDomain>(dom: &D, rows: Vec<SparseRow<D::Elem>>) -> BTreeMap<usize, SparseRow<D::Elem>> {
    let mut pivots: BTreeMap<usize, SparseRow<D::Elem>> = BTreeMap::new();
    for mut row in rows {
        while let Some((lead, _)) = row.first() {
            let lead = *lead;
            match pivots.get(&lead) {
                Some(p) => row = ff_eliminate(dom, &row, p, lead),
                None => break,
            }
        }
        if let Some((lead, _)) = row.first() {
            pivots.insert(*lead, row);
        }
    }
    pivots
}

/// Nullspace over the fraction field of a gcd domain, computed without
/// fractions: rows are cleared of denominators and kept primitive.
pub fn fraction_free_nullspace<F: FractionField>(
    field: &F,
    rows: Vec<SparseRow<F::Elem>>,
    ncols: usize,
) -> Vec<Vec<F::Elem>> {
    let dom = field.base();
    let base_rows: Vec<_> = rows.into_iter().map(|r| to_base_row(field, r)).collect();
    let mut pivots = ff_echelon(dom, base_rows);
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    for (idx, &c) in cols.iter().enumerate() {
        let prow = pivots[&c].clone();
        for &other in cols[idx + 1..].iter() {
            let r = pivots.get_mut(&other).expect("pivot row");
            if value_at(r, c).is_some() {
                *r = ff_eliminate(dom, r, &prow, c);
            }
        }
    }
    let mut basis = Vec::new();
    for f in 0..ncols {
        if pivots.contains_key(&f) {
            continue;
        }
        let mut v = vec![field.zero(); ncols];
        v[f] = field.one();
        for (&c, row) in pivots.iter() {
            if c < f {
                if let Some(x) = value_at(row, f) {
                    let num = field.from_base(x);
                    let den = field.from_base(&row[0].1);
                    v[c] = field.neg(&field.div(&num, &den).expect("nonzero pivot"));
                }
            }
        }
        basis.push(v);
    }
    basis
}

pub fn fraction_free_rank<F: FractionField>(field: &F, rows: Vec<SparseRow<F::Elem>>) -> usize {
    let dom = field.base();
    let base_rows: Vec<_> = rows.into_iter().map(|r| to_base_row(field, r)).collect();
    ff_echelon(dom, base_rows).len()
}

/// Rows of a dense matrix as sparse rows.
pub fn dense_to_sparse<R: Ring>(ring: &R, rows: &[Vec<R::Elem>]) -> Vec<SparseRow<R::Elem>> {
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| !ring.is_zero(v))
                .map(|(c, v)| (c, v.clone()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{FormalQ, IntPoly, PrimeField, Rationals};
    use num_rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn mat_vec<F: Field>(f: &F, rows: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
        rows.iter()
            .map(|r| r.iter().zip(v).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))))
            .collect()
    }

    #[test]
    fn rational_nullspace_reduced_form() {
        let q = Rationals;
        let m = vec![
            vec![rat(1), rat(2), rat(3), rat(4)],
            vec![rat(2), rat(4), rat(7), rat(9)],
            vec![rat(3), rat(6), rat(10), rat(13)],
        ];
        let ns = q.nullspace(dense_to_sparse(&q, &m), 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&q, &m, v).iter().all(|x| q.is_zero(x)));
        }
        assert_eq!(ns[0], vec![rat(-2), rat(1), rat(0), rat(0)]);
        assert_eq!(ns[1], vec![rat(-1), rat(0), rat(-1), rat(1)]);
        let generic = field_nullspace(&q, dense_to_sparse(&q, &m), 4);
        assert_eq!(generic, ns);
        assert_eq!(q.rank(dense_to_sparse(&q, &m)), 2);
    }

    #[test]
    fn prime_field_rank_drop() {
        let f = PrimeField::new(5).unwrap();
        let m = vec![vec![1, 2], vec![3, 1]];
        assert_eq!(f.rank(dense_to_sparse(&f, &m)), 1);
        let ns = f.nullspace(dense_to_sparse(&f, &m), 2);
        assert_eq!(ns, vec![vec![3, 1]]);
    }

    #[test]
    fn formal_nullspace() {
        let f = FormalQ;
        let q = f.q_elem().unwrap();
        let one = f.one();
        // [1, q, q^2]; [q, q^2 + 1, 0]
        let m = vec![
            vec![one.clone(), q.clone(), f.mul(&q, &q)],
            vec![q.clone(), f.add(&f.mul(&q, &q), &one), f.zero()],
        ];
        let ns = f.nullspace(dense_to_sparse(&f, &m), 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&f, &m, &ns[0]).iter().all(|x| f.is_zero(x)));
        assert_eq!(ns[0][2], f.one());
        assert_eq!(ns[0][1], f.from_base(&IntPoly::from_i64s(&[0, 0, 0, 1])));
    }
}
