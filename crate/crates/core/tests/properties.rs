use num_bigint::BigInt;
use proptest::prelude::*;
use quasinv::coeffs::{CyclotomicField, FormalQ, Integers, PrimeField, Rationals, Ring};
use quasinv::generators::{chain_up_to, ChainRecord, GeneratorChain};
use quasinv::poly::{elementary_invariants, isotypic_project, IsotypicLabel, Poly};
use quasinv::quasi::{
    hilbert_data, in_span, is_quasi_invariant, quasi_basis, quasi_dimension, rank_of, std_generator_degree,
};
use quasinv::shift::{congruence_predicate, dunkl_composition, opdam_apply, scalar_chain, scalar_valuation, Which};

fn e1<R: Ring>(ring: &R) -> Poly<R> {
    (0..3).fold(Poly::zero(ring, 3), |acc, i| acc.add(&Poly::var(ring, 3, i)))
}

/// Symmetric polynomial `sum c_{abc} e1^a P2^b P3^c` over the integers.
fn symmetric(coeffs: &[(u32, u32, u32, i64)]) -> Poly<Integers> {
    let (p2, p3) = elementary_invariants(&Integers);
    let s = e1(&Integers);
    coeffs.iter().fold(Poly::zero(&Integers, 3), |acc, &(a, b, c, k)| {
        acc.add(&s.pow(a).mul(&p2.pow(b)).mul(&p3.pow(c)).scale(&BigInt::from(k)))
    })
}

fn sym_terms() -> impl Strategy<Value = Vec<(u32, u32, u32, i64)>> {
    prop::collection::vec((0u32..3, 0u32..2, 0u32..2, -5i64..=5), 1..4)
}

fn n2_dim(m: u32, d: u32) -> usize {
    let base = d / 2 + 1;
    let top = 2 * m + 1;
    (base + if d >= top { (d - top) / 2 + 1 } else { 0 }) as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_image_is_symmetric_and_matches_dunkl(terms in sym_terms(), m in 0u32..4) {
        let f = symmetric(&terms);
        let img = opdam_apply(m, &f).unwrap();
        prop_assert_eq!(&img, &img.swap(0, 1));
        prop_assert_eq!(&img, &img.swap(1, 2));
        prop_assert_eq!(img, dunkl_composition(m as i64, &f));
    }

    #[test]
    fn quasi_invariants_decrease_in_m(m in 0u32..3, d in 0u32..10) {
        let f = PrimeField::new(7).unwrap();
        for p in quasi_basis(&f, 3, m + 1, d, false).unwrap() {
            prop_assert!(is_quasi_invariant(&p, m, false).unwrap());
        }
        prop_assert!(quasi_dimension(&f, 3, m + 1, d, false).unwrap() <= quasi_dimension(&f, 3, m, d, false).unwrap());
    }

    #[test]
    fn quasi_invariants_form_a_module(m in 0u32..3, d in 0u32..8, terms in sym_terms()) {
        let s = symmetric(&terms).map_coeffs(&Rationals, |c| num_rational::BigRational::from_integer(c.clone()));
        for p in quasi_basis(&Rationals, 3, m, d, false).unwrap() {
            prop_assert!(is_quasi_invariant(&p.mul(&s), m, false).unwrap());
        }
    }

    #[test]
    fn two_variable_dims_ignore_the_domain(m in 0u32..4, which in 0usize..4) {
        let d_max = 2 * m + 4;
        let dims = match which {
            0 => hilbert_data(&Rationals, 2, m, Some(d_max), false).unwrap().dims,
            1 => hilbert_data(&PrimeField::new(5).unwrap(), 2, m, Some(d_max), false).unwrap().dims,
            2 => hilbert_data(&PrimeField::new(11).unwrap(), 2, m, Some(d_max), false).unwrap().dims,
            _ => hilbert_data(&CyclotomicField::new(4).unwrap(), 2, m, Some(d_max), true).unwrap().dims,
        };
        let expected: Vec<usize> = (0..=d_max).map(|d| n2_dim(m, d)).collect();
        prop_assert_eq!(dims, expected);
    }

    #[test]
    fn valuations_follow_the_congruences(m in 0u32..16, pi in 0usize..4, wi in 0usize..4) {
        let chain = chain_up_to(m + 1).unwrap();
        let s = scalar_chain(&chain[m as usize], &chain[m as usize + 1]).unwrap();
        let p = [5u64, 7, 11, 13][pi];
        let w = Which::ALL[wi];
        prop_assert_eq!(scalar_valuation(s.get(w), p), congruence_predicate(m, p, w));
    }
}

#[test]
fn chain_checkpoints_round_trip() {
    for ch in chain_up_to(15).unwrap() {
        let json = serde_json::to_string(&ch.record()).unwrap();
        let back: ChainRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(GeneratorChain::from_record(&back).unwrap(), ch);
    }
}

/// At a primitive cube root of unity the q-divisor for m = 4 is
/// `(x^3 - y^3)^3`, so the m = 1 generator evaluated at cubes is a
/// q-deformed 4-quasi-invariant in degree 12, below the generic degree 13.
#[test]
fn cube_root_counterexample_at_m4() {
    let chain = chain_up_to(1).unwrap();
    let f = CyclotomicField::new(3).unwrap();
    let cubes: Vec<_> = (0..3).map(|i| Poly::var(&f, 3, i).pow(3)).collect();
    let p = chain[1].a(&f).compose(&cubes);
    assert_eq!(p.homogeneous_degree(), Some(12));
    assert!(is_quasi_invariant(&p, 4, true).unwrap());
    assert!(!isotypic_project(&p, IsotypicLabel::Std).unwrap().is_zero());
    assert_eq!(std_generator_degree(&f, 4, true).unwrap(), 12);

    // For generic q the same polynomial is not even 2-quasi-invariant.
    let cubes: Vec<_> = (0..3).map(|i| Poly::var(&FormalQ, 3, i).pow(3)).collect();
    let generic = chain[1].a(&FormalQ).compose(&cubes);
    assert!(!is_quasi_invariant(&generic, 2, true).unwrap());
}

/// Minimal standard degrees over F_13 for m = 5..=8: the first two stay at
/// 3*4+1 = 13, then each further level adds 6.
#[test]
fn k_window_instance() {
    let f = PrimeField::new(13).unwrap();
    let degrees: Vec<u32> = (5..=8).map(|m| std_generator_degree(&f, m, false).unwrap()).collect();
    assert_eq!(degrees, vec![13, 13, 19, 25]);
}

/// The generators span the standard slices of their degrees: `{A, sA}` in
/// degree 3m+1, and `{B, sB, e1 A, e1 sA}` in degree 3m+2.
#[test]
fn chain_spans_standard_slices() {
    let f = Rationals;
    for ch in chain_up_to(4).unwrap() {
        let m = ch.m;
        let (a, b) = (ch.a(&f), ch.b(&f));
        let s = e1(&f);
        for (d, gens) in [
            (3 * m + 1, vec![a.clone(), a.swap(1, 2)]),
            (3 * m + 2, vec![b.clone(), b.swap(1, 2), s.mul(&a), s.mul(&a.swap(1, 2))]),
        ] {
            let slice: Vec<_> = quasi_basis(&f, 3, m, d, false)
                .unwrap()
                .iter()
                .map(|p| isotypic_project(p, IsotypicLabel::Std).unwrap())
                .collect();
            let dim = rank_of(&f, &slice);
            assert_eq!(rank_of(&f, &gens), gens.len(), "m = {m}, d = {d}");
            assert_eq!(dim, gens.len(), "m = {m}, d = {d}");
            for g in &gens {
                assert!(in_span(&f, &slice, g), "m = {m}, d = {d}");
            }
        }
    }
}
