use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{all_permutations, perm_sign, Monomial, Poly};
use crate::arith::binomial;
use crate::coeffs::{Field, Ring};
use crate::error::{Error, Result};

/// Irreducible representations of `S_n` used for isotypic slices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IsotypicLabel {
    Triv,
    Sign,
    /// The two-dimensional standard representation (`n = 3` only).
    Std,
}

impl std::str::FromStr for IsotypicLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triv" => Ok(IsotypicLabel::Triv),
            "sign" => Ok(IsotypicLabel::Sign),
            "std" => Ok(IsotypicLabel::Std),
            _ => Err(Error::Parse(format!("unknown isotypic label {s:?}"))),
        }
    }
}

/// Largest `k` with `(x_i - x_j)^k | p`, read off after substituting
/// `x_i = x_j + u`. `None` stands for infinity (`p = 0`).
pub fn divisibility_order<R: Ring>(p: &Poly<R>, i: usize, j: usize) -> Option<u32> {
    assert!(i != j && i < p.nvars() && j < p.nvars(), "need two distinct variables");
    if p.is_zero() {
        return None;
    }
    let ring = p.ring();
    let max_a = p.terms().map(|(m, _)| m.exp(i)).max().unwrap_or(0);
    for k in 0..=max_a {
        // Coefficient of u^k: sum over terms of C(a, k) c x_j^{a - k + b} rest.
        let mut block: BTreeMap<Monomial, R::Elem> = BTreeMap::new();
        for (m, c) in p.terms() {
            let a = m.exp(i);
            if a < k {
                continue;
            }
            let bin = ring.from_bigint(&binomial(a as u64, k as u64));
            if ring.is_zero(&bin) {
                continue;
            }
            let mut mm = *m;
            mm.set_exp(i, 0);
            mm.set_exp(j, a - k + m.exp(j));
            let v = ring.mul(&bin, c);
            let e = block.entry(mm).or_insert_with(|| ring.zero());
            *e = ring.add(e, &v);
        }
        if block.values().any(|v| !ring.is_zero(v)) {
            return Some(k);
        }
    }
    unreachable!("a nonzero polynomial has a nonzero u-coefficient")
}

fn require_q<F: Field>(field: &F) -> Result<F::Elem> {
    field
        .q_elem()
        .ok_or_else(|| Error::InvalidDomain("this operation needs a domain carrying q".into()))
}

/// `prod_{k=-m}^{m} (x_i - q^k x_j)`, monic in `x_i`.
pub fn q_divisor<F: Field>(field: &F, n: usize, i: usize, j: usize, m: u32) -> Result<Poly<F>> {
    require_q(field)?;
    let mut d = Poly::one(field, n);
    for k in -(m as i64)..=(m as i64) {
        let qk = field.q_power(k).expect("q is invertible");
        d = d.mul(&Poly::linear_diff(field, n, i, j, &qk));
    }
    Ok(d)
}

/// Whether `prod_{k=-m}^{m} (x_i - q^k x_j)` divides `p`, by long division
/// in `x_i`.
pub fn q_divisibility_test<F: Field>(p: &Poly<F>, i: usize, j: usize, m: u32) -> Result<bool> {
    assert!(i != j && i < p.nvars() && j < p.nvars(), "need two distinct variables");
    let field = p.ring();
    let d = q_divisor(field, p.nvars(), i, j, m)?;
    let top = 2 * m + 1;
    let mut rem = p.clone();
    loop {
        // Term of highest x_i-degree at or above the divisor's.
        let pick = rem
            .terms()
            .filter(|(mono, _)| mono.exp(i) >= top)
            .max_by_key(|(mono, _)| (mono.exp(i), **mono))
            .map(|(mono, c)| (*mono, c.clone()));
        let Some((mono, c)) = pick else { break };
        let mut shift = mono;
        shift.set_exp(i, mono.exp(i) - top);
        rem = rem.sub(&d.mul_monomial(&shift, &c));
    }
    Ok(rem.is_zero())
}

/// `rho[a][r]`: coefficient of `x^r` in `x^a mod prod_{k=-m}^{m}(x - q^k)`,
/// for `a <= a_max` and `r <= 2m`.
pub fn q_remainder_table<F: Field>(field: &F, m: u32, a_max: u32) -> Result<Vec<Vec<F::Elem>>> {
    require_q(field)?;
    let n = (2 * m + 1) as usize;
    // Coefficients of the monic divisor, low degree first.
    let mut dpoly = vec![field.one()];
    for k in -(m as i64)..=(m as i64) {
        let qk = field.q_power(k).expect("q is invertible");
        let mut next = vec![field.zero(); dpoly.len() + 1];
        for (t, c) in dpoly.iter().enumerate() {
            next[t + 1] = field.add(&next[t + 1], c);
            next[t] = field.sub(&next[t], &field.mul(&qk, c));
        }
        dpoly = next;
    }
    let mut table = Vec::with_capacity(a_max as usize + 1);
    let mut cur = vec![field.zero(); n];
    cur[0] = field.one();
    for a in 0..=a_max {
        if a > 0 {
            // Multiply by x and reduce the overflow coefficient.
            let top = cur[n - 1].clone();
            for r in (1..n).rev() {
                cur[r] = cur[r - 1].clone();
            }
            cur[0] = field.zero();
            if !field.is_zero(&top) {
                for (r, slot) in cur.iter_mut().enumerate() {
                    *slot = field.sub(slot, &field.mul(&top, &dpoly[r]));
                }
            }
        }
        table.push(cur.clone());
    }
    Ok(table)
}

/// `prod_{i<j} (x_i - x_j)`.
pub fn vandermonde<R: Ring>(ring: &R, n: usize) -> Poly<R> {
    let mut v = Poly::one(ring, n);
    for i in 0..n {
        for j in i + 1..n {
            v = v.mul(&Poly::linear_diff(ring, n, i, j, &ring.one()));
        }
    }
    v
}

/// The sign-isotypic generator: `prod_{i<j}(x_i - x_j)^{2m+1}`, or with
/// `q_deformed` the product `prod_{i<j} prod_{k=-m}^{m}(x_i - q^k x_j)` with
/// each `q^{-k}` cleared, i.e. factors `q^k x_i - x_j` for `k > 0`.
pub fn sign_product<F: Field>(field: &F, n: usize, m: u32, q_deformed: bool) -> Result<Poly<F>> {
    if !q_deformed {
        return Ok(vandermonde(field, n).pow(2 * m + 1));
    }
    require_q(field)?;
    let mut out = Poly::one(field, n);
    for i in 0..n {
        for j in i + 1..n {
            out = out.mul(&Poly::linear_diff(field, n, i, j, &field.one()));
            for k in 1..=m as i64 {
                let qk = field.q_power(k).expect("q is invertible");
                out = out.mul(&Poly::linear_diff(field, n, i, j, &qk));
                let mut f = Poly::term(field, n, Monomial::var(i), qk);
                f.add_term(Monomial::var(j), field.neg(&field.one()));
                out = out.mul(&f);
            }
        }
    }
    Ok(out)
}

fn require_invertible_order<F: Field>(field: &F, n: usize) -> Result<()> {
    let p = field.characteristic();
    if p != 0 && p as usize <= n {
        return Err(Error::BadCharacteristic(format!(
            "|S_{n}| is not invertible in characteristic {p}"
        )));
    }
    Ok(())
}

/// Group-averaging projector onto the `label` isotypic component.
pub fn isotypic_project<F: Field>(p: &Poly<F>, label: IsotypicLabel) -> Result<Poly<F>> {
    let field = p.ring();
    let n = p.nvars();
    require_invertible_order(field, n)?;
    if label == IsotypicLabel::Std {
        if n != 3 {
            return Err(Error::InvalidArgument("the Std label is only available for n = 3".into()));
        }
        let t = isotypic_project(p, IsotypicLabel::Triv)?;
        let s = isotypic_project(p, IsotypicLabel::Sign)?;
        return Ok(p.sub(&t).sub(&s));
    }
    let perms = all_permutations(n);
    let order = field.from_i64(perms.len() as i64);
    let inv = field.inv(&order).expect("group order is invertible");
    let mut acc = Poly::zero(field, n);
    for sigma in &perms {
        let img = p.permute(sigma);
        acc = match label {
            IsotypicLabel::Sign if perm_sign(sigma) < 0 => acc.sub(&img),
            _ => acc.add(&img),
        };
    }
    Ok(acc.scale(&inv))
}

/// Split `p = p1 + p2` with `p1` divisible by `x1 + x2 + x3` and `p2` a
/// polynomial in `x1 - x3`, `x2 - x3`.
pub fn translation_split<F: Field>(p: &Poly<F>) -> Result<(Poly<F>, Poly<F>)> {
    let field = p.ring();
    if p.nvars() != 3 {
        return Err(Error::InvalidArgument("translation_split needs n = 3".into()));
    }
    if field.characteristic() == 3 {
        return Err(Error::BadCharacteristic("the coordinate change needs 3 invertible".into()));
    }
    let third = field.inv(&field.from_i64(3)).expect("3 is invertible");
    // New coordinates (e1, y1, y2) as variables 0, 1, 2.
    let e1 = Poly::var(field, 3, 0);
    let y1 = Poly::var(field, 3, 1);
    let y2 = Poly::var(field, 3, 2);
    let x3 = e1.sub(&y1).sub(&y2).scale(&third);
    let x1 = y1.add(&x3);
    let x2 = y2.add(&x3);
    let rewritten = p.compose(&[x1, x2, x3]);
    let mut with_e1 = Poly::zero(field, 3);
    let mut without = Poly::zero(field, 3);
    for (m, c) in rewritten.terms() {
        if m.exp(0) > 0 {
            with_e1.add_term(*m, c.clone());
        } else {
            without.add_term(*m, c.clone());
        }
    }
    let back = [
        Poly::from_int_terms(field, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]),
        Poly::from_int_terms(field, 3, &[(&[1, 0, 0], 1), (&[0, 0, 1], -1)]),
        Poly::from_int_terms(field, 3, &[(&[0, 1, 0], 1), (&[0, 0, 1], -1)]),
    ];
    Ok((with_e1.compose(&back), without.compose(&back)))
}

/// `P2 = (x1-x2)^2 + (x2-x3)^2 + (x3-x1)^2` and
/// `P3 = (x1+x2-2x3)(x2+x3-2x1)(x3+x1-2x2)`.
pub fn elementary_invariants<R: Ring>(ring: &R) -> (Poly<R>, Poly<R>) {
    let d = |i, j| Poly::linear_diff(ring, 3, i, j, &ring.one());
    let p2 = d(0, 1).pow(2).add(&d(1, 2).pow(2)).add(&d(2, 0).pow(2));
    let l = |a: usize, b: usize, c: usize| {
        let mut e = [0u32; 3];
        e[a] = 1;
        let mut f = [0u32; 3];
        f[b] = 1;
        let mut g = [0u32; 3];
        g[c] = 1;
        Poly::from_int_terms(ring, 3, &[(&e, 1), (&f, 1), (&g, -2)])
    };
    let p3 = l(0, 1, 2).mul(&l(1, 2, 0)).mul(&l(2, 0, 1));
    (p2, p3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CyclotomicField, FormalQ, PrimeField, Rationals};
    use num_rational::BigRational;

    fn q3(terms: &[(&[u32], i64)]) -> Poly<Rationals> {
        Poly::from_int_terms(&Rationals, 3, terms)
    }

    #[test]
    fn divisibility_examples() {
        let x12 = q3(&[(&[1, 0, 0], 1), (&[0, 1, 0], -1)]);
        let p = x12.pow(3).mul(&q3(&[(&[0, 0, 1], 1)]));
        assert_eq!(divisibility_order(&p, 0, 1), Some(3));
        assert_eq!(divisibility_order(&q3(&[(&[1, 0, 0], 1), (&[0, 1, 0], 1)]), 0, 1), Some(0));
        assert_eq!(divisibility_order(&Poly::zero(&Rationals, 3), 0, 1), None);
        let f5 = PrimeField::new(5).unwrap();
        let p5 = Poly::from_int_terms(&f5, 2, &[(&[5, 0], 1), (&[0, 5], -1)]);
        assert_eq!(divisibility_order(&p5, 0, 1), Some(5));
        let q5 = Poly::from_int_terms(&Rationals, 2, &[(&[5, 0], 1), (&[0, 5], -1)]);
        assert_eq!(divisibility_order(&q5, 0, 1), Some(1));
    }

    #[test]
    fn q_divisibility_examples() {
        let c3 = CyclotomicField::new(3).unwrap();
        let p = Poly::from_int_terms(&c3, 2, &[(&[3, 0], 1), (&[0, 3], -1)]);
        assert!(q_divisibility_test(&p, 0, 1, 1).unwrap());
        let lin = Poly::from_int_terms(&c3, 2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        assert!(!q_divisibility_test(&lin, 0, 1, 1).unwrap());
        let fq = FormalQ;
        let d = q_divisor(&fq, 3, 0, 1, 2).unwrap();
        assert!(q_divisibility_test(&d, 0, 1, 2).unwrap());
        assert!(q_divisibility_test(&d, 0, 1, 1).unwrap());
        assert!(!q_divisibility_test(&d.swap(0, 2), 0, 1, 2).unwrap());
        assert!(matches!(q_divisibility_test(&q3(&[(&[1, 0, 0], 1)]), 0, 1, 1), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn remainder_table_matches_division() {
        let fq = FormalQ;
        let m = 1;
        let table = q_remainder_table(&fq, m, 8).unwrap();
        let d = q_divisor(&fq, 2, 0, 1, m).unwrap();
        for (a, row) in table.iter().enumerate() {
            let mut p = Poly::term(&fq, 2, Monomial::new(&[a as u32, 0]), fq.one());
            for (r, c) in row.iter().enumerate() {
                p.add_term(Monomial::new(&[r as u32, (a - r.min(a)) as u32]), fq.neg(c));
            }
            // x1^a - sum rho x1^r x2^{a-r} must be divisible.
            if a >= row.len() {
                assert!(q_divisibility_test(&p, 0, 1, m).unwrap(), "a = {a}");
                assert!(p.div_exact(&d).is_some());
            } else {
                assert!(p.is_zero());
            }
        }
    }

    #[test]
    fn cube_roots_factorization() {
        let c3 = CyclotomicField::new(3).unwrap();
        let q = c3.q_elem().unwrap();
        let prod = Poly::linear_diff(&c3, 2, 0, 1, &c3.one())
            .mul(&Poly::linear_diff(&c3, 2, 0, 1, &q))
            .mul(&Poly::linear_diff(&c3, 2, 0, 1, &c3.mul(&q, &q)));
        assert_eq!(prod, Poly::from_int_terms(&c3, 2, &[(&[3, 0], 1), (&[0, 3], -1)]));
    }

    #[test]
    fn isotypic_examples() {
        let e1 = q3(&[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]);
        assert_eq!(isotypic_project(&e1, IsotypicLabel::Triv).unwrap(), e1);
        assert!(isotypic_project(&e1, IsotypicLabel::Sign).unwrap().is_zero());
        assert!(isotypic_project(&e1, IsotypicLabel::Std).unwrap().is_zero());
        let v = vandermonde(&Rationals, 3);
        assert_eq!(isotypic_project(&v, IsotypicLabel::Sign).unwrap(), v);
        let x1 = q3(&[(&[1, 0, 0], 1)]);
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(isotypic_project(&x1, IsotypicLabel::Std).unwrap(), x1.sub(&e1.scale(&third)));
        let f3 = PrimeField::new(3).unwrap();
        let bad = Poly::var(&f3, 3, 0);
        assert!(matches!(isotypic_project(&bad, IsotypicLabel::Triv), Err(Error::BadCharacteristic(_))));
    }

    #[test]
    fn translation_examples() {
        let e1 = q3(&[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]);
        let (a, b) = translation_split(&e1).unwrap();
        assert_eq!(a, e1);
        assert!(b.is_zero());
        let x12 = q3(&[(&[1, 0, 0], 1), (&[0, 1, 0], -1)]);
        let (a, b) = translation_split(&x12).unwrap();
        assert!(a.is_zero());
        assert_eq!(b, x12);
        let sq = q3(&[(&[2, 0, 0], 1)]);
        let (a, b) = translation_split(&sq).unwrap();
        assert_eq!(a.add(&b), sq);
        assert!(a.div_exact(&e1).is_some());
        // b is translation invariant.
        let shift = [
            q3(&[(&[1, 0, 0], 1), (&[0, 0, 1], 1)]),
            q3(&[(&[0, 1, 0], 1), (&[0, 0, 1], 1)]),
            q3(&[(&[0, 0, 1], 2)]),
        ];
        assert_eq!(b.compose(&shift), b);
    }

    #[test]
    fn invariant_identity() {
        let (p2, p3) = elementary_invariants(&Rationals);
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::from_integer(0.into());
        let two = BigRational::from_integer(2.into());
        assert_eq!(p2.eval(&[one.clone(), zero.clone(), zero.clone()]), two);
        assert_eq!(p3.eval(&[two.clone(), one, zero]), BigRational::from_integer(0.into()));
        let v2 = vandermonde(&Rationals, 3).pow(2);
        let lhs = p2.pow(3).sub(&p3.pow(2).scale(&two));
        assert_eq!(lhs, v2.scale(&BigRational::from_integer(54.into())));
    }
}
