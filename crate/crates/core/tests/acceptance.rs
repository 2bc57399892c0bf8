//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quasinv::coeffs::{CyclotomicField, Field, FormalQ, Integers, PrimeField, Rationals};
use quasinv::generators::{
    chain_up_to, char0_numerator, initial_chain, lift_chain, predicted_charp_numerator, sweep_record, ChainRecord,
    GeneratorChain,
};
use quasinv::poly::{elementary_invariants, vandermonde, IsotypicLabel, Poly};
use quasinv::qdeform::{construct_pmq, flatness_check, q_wedge_record, qdeform_report};
use quasinv::quasi::{
    hilbert_data, is_quasi_invariant, isotypic_dimension, quasi_basis, quasi_dimension, std_generator_degree,
    HilbertData,
};
use quasinv::shift::{dunkl_composition, opdam_apply, shift_record, Which};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: quasinv::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn n2_series(m: u32, d_max: u32) -> Vec<usize> {
    (0..=d_max)
        .map(|d| {
            let top = 2 * m + 1;
            (d / 2 + 1 + if d >= top { (d - top) / 2 + 1 } else { 0 }) as usize
        })
        .collect()
}

fn palindromic(h: &HilbertData) -> Result<(), String> {
    check(h.is_palindromic() == Some(true), || format!("numerator {:?} is not palindromic", h.numerator))
}

fn criterion1() -> Outcome {
    for m in 0..=3 {
        let d_max = 2 * m + 4;
        let runs = [
            ("Q", ok(hilbert_data(&Rationals, 2, m, Some(d_max), false))?),
            ("F_5", ok(hilbert_data(&PrimeField::new(5).unwrap(), 2, m, Some(d_max), false))?),
            ("F_7", ok(hilbert_data(&PrimeField::new(7).unwrap(), 2, m, Some(d_max), false))?),
        ];
        for (name, h) in runs {
            check(h.dims == n2_series(m, d_max), || format!("m = {m} over {name}: {:?}", h.dims))?;
            palindromic(&h)?;
        }
    }
    Ok("m = 0..3 over Q, F_5, F_7".into())
}

fn criterion2() -> Outcome {
    for m in 0..=3 {
        let h = ok(hilbert_data(&Rationals, 3, m, Some(6 * m + 4), false))?;
        check(h.numerator == char0_numerator(m), || format!("m = {m}: numerator {:?}", h.numerator))?;
        palindromic(&h)?;
        let e = ok(std_generator_degree(&Rationals, m, false))?;
        check(e == 3 * m + 1, || format!("m = {m}: standard generator degree {e}"))?;
    }
    Ok("numerators 1+2t^(3m+1)+2t^(3m+2)+t^(6m+3), m = 0..3".into())
}

fn criterion3() -> Outcome {
    let cases = [(2, 5, vec![(0, 1), (5, 2), (10, 2), (15, 1)]), (5, 11, vec![(0, 1), (11, 2), (22, 2), (33, 1)])];
    for (m, p, expected) in cases {
        let h = ok(hilbert_data(&PrimeField::new(p).unwrap(), 3, m, None, false))?;
        check(h.numerator == expected, || format!("m = {m}, p = {p}: {:?}", h.numerator))?;
        let predicted = ok(predicted_charp_numerator(m, p))?;
        check(predicted == expected, || format!("m = {m}, p = {p}: predicted {predicted:?}"))?;
        check(h.numerator != char0_numerator(m), || format!("m = {m}, p = {p}: no divergence"))?;
        palindromic(&h)?;
    }
    Ok("Q_2(F_5) and Q_5(F_11) by brute force".into())
}

fn criterion4() -> Outcome {
    let chain = ok(chain_up_to(30))?;
    let mut with_primes = 0;
    for ch in &chain {
        let r = ok(sweep_record(ch, 100))?;
        check(r.agree, || format!("m = {}: divides {:?}, predicted {:?}", r.m, r.prime_factors_gt3, r.renxu_primes))?;
        check(ch.c != BigInt::from(0), || format!("m = {}: c_m = 0", ch.m))?;
        with_primes += usize::from(!r.prime_factors_gt3.is_empty());
    }
    Ok(format!("m = 0..30, 3 < p <= 100; {with_primes} levels with a divisor"))
}

fn identity<F: Field>(f: &F) -> Result<(), String> {
    let (p2, p3) = elementary_invariants(f);
    let v = vandermonde(f, 3);
    let lhs = p2.pow(3).sub(&p3.pow(2).scale(&f.from_i64(2)));
    let rhs = v.pow(2).scale(&f.from_i64(54));
    check(lhs == rhs, || "P2^3 - 2 P3^2 != 54 V^2".into())
}

fn criterion5() -> Outcome {
    identity(&Rationals)?;
    for p in [5, 7, 11] {
        identity(&PrimeField::new(p).unwrap()).map_err(|e| format!("F_{p}: {e}"))?;
    }
    let f7 = PrimeField::new(7).unwrap();
    for m in 0..=2 {
        for d in 0..=6 * m + 3 {
            let total = ok(quasi_dimension(&Rationals, 3, m, d, false))?;
            let parts: usize = [IsotypicLabel::Triv, IsotypicLabel::Sign, IsotypicLabel::Std]
                .into_iter()
                .map(|l| isotypic_dimension(&Rationals, 3, m, d, l, false))
                .sum::<quasinv::Result<usize>>()
                .map_err(|e| e.to_string())?;
            check(total == parts, || format!("m = {m}, d = {d}: {total} != {parts}"))?;
        }
        palindromic(&ok(hilbert_data(&f7, 3, m, None, false))?)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..20 {
        let m = rng.gen_range(0..4u32);
        let d = rng.gen_range(0..12u32);
        for p in ok(quasi_basis(&Rationals, 3, m + 1, d, false))? {
            check(ok(is_quasi_invariant(&p, m, false))?, || format!("Q_{} not in Q_{m} at d = {d}", m + 1))?;
        }
    }
    Ok("identity over Q, F_5, F_7, F_11; isotypic sums; 20 monotonicity points".into())
}

/// Basis of symmetric polynomials of degree `d`: `e1^a P2^b P3^c`.
fn symmetric_basis(d: u32) -> Vec<Poly<Integers>> {
    let (p2, p3) = elementary_invariants(&Integers);
    let e1 = (0..3).fold(Poly::zero(&Integers, 3), |acc, i| acc.add(&Poly::var(&Integers, 3, i)));
    let mut out = Vec::new();
    for c in 0..=d / 3 {
        for b in 0..=(d - 3 * c) / 2 {
            let a = d - 3 * c - 2 * b;
            out.push(e1.pow(a).mul(&p2.pow(b)).mul(&p3.pow(c)));
        }
    }
    out
}

fn criterion6() -> Outcome {
    for m in 1..=2u32 {
        for d in 0..=6 {
            for f in symmetric_basis(d) {
                let img = ok(opdam_apply(m, &f))?;
                check(img == dunkl_composition(m as i64, &f), || format!("m = {m}, d = {d}: operator mismatch"))?;
            }
        }
    }
    let mut images = 0;
    for m in 1..=3u32 {
        for d in 0..=3 * m + 4 {
            for p in ok(quasi_basis(&Rationals, 3, m - 1, d, false))? {
                let img = ok(opdam_apply(m, &p))?;
                check(ok(is_quasi_invariant(&img, m, false))?, || format!("m = {m}, d = {d}: image not in Q_m"))?;
                images += 1;
            }
        }
    }
    Ok(format!("Dunkl agreement for degree <= 6; {images} shifted basis elements land in Q_m"))
}

fn criterion7() -> Outcome {
    let primes = [5, 7, 11, 13];
    let chain = ok(chain_up_to(21))?;
    let mut rows = 0;
    let mut alternative_mismatches = 0;
    for w in chain.windows(2).take(21) {
        let r = ok(shift_record(&w[0], &w[1], &primes))?;
        for v in &r.valuations {
            check(v.matches, || format!("m = {}, p = {}, {:?}: computed {:?}, predicted {:?}", v.m, v.p, v.which, v.computed, v.predicted))?;
            rows += 1;
            if v.which == Which::B && v.computed != v.predicted_alt {
                alternative_mismatches += 1;
            }
        }
        check(r.relations.ab.equal, || format!("m = {}: a b relation {} vs {}", r.m, r.relations.ab.lhs, r.relations.ab.rhs))?;
        check(r.relations.de.equal, || format!("m = {}: d e relation {} vs {}", r.m, r.relations.de.lhs, r.relations.de.rhs))?;
        check(r.agree, || format!("m = {}: record disagrees", r.m))?;
    }
    Ok(format!(
        "m = 0..20, p in {{5,7,11,13}}: {rows} valuations and all relations hold; b-residue 2floor(q/3)-1 would miss {alternative_mismatches}"
    ))
}

fn criterion8() -> Outcome {
    // (a) two variables: no dependence on q.
    for m in 0..=3 {
        let d_max = 2 * m + 4;
        let expected = n2_series(m, d_max);
        let formal = ok(hilbert_data(&FormalQ, 2, m, Some(d_max), true))?;
        check(formal.dims == expected, || format!("n = 2, m = {m} over Q(q): {:?}", formal.dims))?;
        for p in 2..=7 {
            let h = ok(hilbert_data(&CyclotomicField::new(p).unwrap(), 2, m, Some(d_max), true))?;
            check(h.dims == expected, || format!("n = 2, m = {m}, q^{p} = 1: {:?}", h.dims))?;
        }
    }
    // (b) divergence at the excluded values, witnessed by P_{m,q}.
    let mut reports = Vec::new();
    for (m, p) in [(1, 3), (2, 5), (2, 6)] {
        let r = ok(qdeform_report(m, p, None, false))?;
        check(!r.agreement, || format!("m = {m}, p = {p}: no divergence"))?;
        check(r.p_excluded, || format!("m = {m}, p = {p}: Phi_p does not divide c(q)"))?;
        let pmq = ok(construct_pmq(3, m, p))?;
        check(pmq.degree < 3 * m + 1, || format!("m = {m}, p = {p}: P_(m,q) in degree {}", pmq.degree))?;
        check(ok(is_quasi_invariant(&pmq.poly, m, true))?, || format!("m = {m}, p = {p}: P_(m,q) not q-quasi-invariant"))?;
        reports.push(r);
    }
    // (c) cyclotomic factors of c(q) fill the integer interval.
    for m in 1..=3 {
        let r = ok(q_wedge_record(m))?;
        check(r.conjecture_holds, || format!("m = {m}: factors {:?}, range {:?}", r.flat_values_excluded, r.excluded_range))?;
        check(r.non_cyclotomic_remainder == ["1"], || format!("m = {m}: remainder {:?}", r.non_cyclotomic_remainder))?;
    }
    // (d) dominance of dimensions at every computed degree.
    for r in &reports {
        check(r.flatness.dominance_ok, || format!("m = {}, p = {}: dominance fails", r.m, r.p))?;
    }
    for (m, p) in [(1, 5), (1, 7), (2, 7)] {
        let f = ok(flatness_check(m, p, 6 * m + 4, false))?;
        check(f.dominance_ok, || format!("m = {m}, p = {p}: dominance fails"))?;
        check(f.agreement, || format!("m = {m}, p = {p}: unexpected divergence at {:?}", f.first_divergence))?;
    }
    let f = ok(flatness_check(1, 3, 7, true))?;
    check(f.dominance_ok, || "m = 1, p = 3 with Q(q): dominance fails".into())?;
    Ok("n = 2 flat; (1,3), (2,5), (2,6) diverge; c(q) factors for m = 1..3; dominance holds".into())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn reports_json() -> Result<String, String> {
    let mut out = String::new();
    let h = ok(hilbert_data(&PrimeField::new(7).unwrap(), 3, 2, None, false))?;
    out += &serde_json::to_string(&h).unwrap();
    let chain = ok(chain_up_to(21))?;
    for ch in &chain {
        out += &serde_json::to_string(&ok(sweep_record(ch, 100))?).unwrap();
    }
    for w in chain.windows(2).take(8) {
        out += &serde_json::to_string(&ok(shift_record(&w[0], &w[1], &[5, 7, 11, 13]))?).unwrap();
    }
    out += &serde_json::to_string(&ok(qdeform_report(2, 5, None, false))?).unwrap();
    out += &serde_json::to_string(&ok(q_wedge_record(3))?).unwrap();
    Ok(out)
}

fn criterion9() -> Outcome {
    let one = in_pool(1, reports_json)?;
    for t in [4, 8] {
        let other = in_pool(t, reports_json)?;
        check(other == one, || format!("reports differ between 1 and {t} threads"))?;
    }
    let straight = ok(chain_up_to(50))?;
    for stop in [0usize, 5, 17, 33, 49] {
        let json = serde_json::to_string(&straight[stop].record()).unwrap();
        let rec: ChainRecord = serde_json::from_str(&json).map_err(|e| e.to_string())?;
        let mut ch = ok(GeneratorChain::from_record(&rec))?;
        while (ch.m as usize) < 50 {
            ch = ok(lift_chain(&ch))?;
            check(ch == straight[ch.m as usize], || format!("resume from m = {stop} diverges at m = {}", ch.m))?;
        }
    }
    let mut bad = initial_chain().record();
    bad.c = "5".into();
    check(GeneratorChain::from_record(&bad).is_err(), || "a corrupted checkpoint was accepted".into())?;
    Ok(format!("{} bytes identical across 1, 4, 8 threads; chain resume through m = 50", one.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("two-variable Hilbert series", criterion1),
        ("three variables, characteristic 0", criterion2),
        ("characteristic p divergence", criterion3),
        ("divisors of c_m vs the prime criterion", criterion4),
        ("identities, palindromy, isotypic sums, monotonicity", criterion5),
        ("shift operator", criterion6),
        ("valuations and product relations", criterion7),
        ("q-deformation", criterion8),
        ("determinism and resume", criterion9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: 9/9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
