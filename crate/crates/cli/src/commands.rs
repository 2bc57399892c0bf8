use std::fs;
use std::path::Path;

use quasinv::arith::is_prime_u64;
use quasinv::coeffs::{make_domain, DomainSpec};
use quasinv::generators::{initial_chain, lift_chain, sweep_record, ChainRecord, GeneratorChain};
use quasinv::qdeform::{q_wedge_record, qdeform_report, QWedgeRecord};
use quasinv::quasi::{hilbert_data, HilbertData};
use quasinv::shift::{shift_record, ShiftRecord};
use quasinv::with_field;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::sink::{json_line, write_atomic, CliError, Sink};
use crate::Global;

/// Levels computed per batch; records are written in order after each batch.
const BATCH: u32 = 8;

#[derive(Serialize)]
struct HilbertReport {
    domain: String,
    #[serde(flatten)]
    data: HilbertData,
    palindromic: Option<bool>,
}

#[derive(Serialize)]
struct HilbertRow {
    degree: usize,
    dim: usize,
    numerator: i64,
}

pub fn hilbert(
    g: &Global,
    n: usize,
    m: u32,
    characteristic: u64,
    formal: bool,
    q_order: Option<u64>,
    dmax: Option<u32>,
) -> Result<(), CliError> {
    let spec = match (characteristic, formal, q_order) {
        (0, false, None) => DomainSpec::Rational,
        (0, true, None) => DomainSpec::FormalQ,
        (0, false, Some(p)) => DomainSpec::Cyclotomic(p),
        (p, false, None) => DomainSpec::PrimeField(p),
        _ => return Err(CliError::Config("q-deformation is only supported in characteristic 0".into())),
    };
    let q_deformed = spec.has_q();
    let domain = make_domain(spec)?;
    let header = json!({"command": "hilbert", "n": n, "m": m, "domain": spec.to_string(), "dmax": dmax});
    let (mut sink, resumed) = Sink::open(g, "hilbert", &header, None)?;
    if !resumed.records.is_empty() {
        return Ok(());
    }
    let data = with_field!(&domain, |f| hilbert_data(f, n, m, dmax, q_deformed))?;
    if sink.is_json() {
        let palindromic = data.is_palindromic();
        sink.record(&HilbertReport { domain: spec.to_string(), data, palindromic })?;
    } else {
        let rows: Vec<HilbertRow> = data
            .dims
            .iter()
            .enumerate()
            .map(|(d, &dim)| HilbertRow { degree: d, dim, numerator: data.numerator_coeff(d as u32) })
            .collect();
        sink.rows(&rows)?;
    }
    sink.flush()
}

/// Chain at level `target`, starting from the sidecar checkpoint when it
/// holds a level not beyond `target`.
fn restore_chain(sidecar: Option<&Path>, target: u32) -> Result<GeneratorChain, CliError> {
    let mut chain = initial_chain();
    if let Some(path) = sidecar.filter(|p| p.exists()) {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        if v.get("schema") != Some(&serde_json::Value::from(1)) || v.get("kind").and_then(|k| k.as_str()) != Some("chain") {
            return Err(CliError::Corrupt(format!("{}: not a chain checkpoint", path.display())));
        }
        let rec = ChainRecord::deserialize(&v).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        if rec.m <= target {
            chain = GeneratorChain::from_record(&rec)
                .map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        }
    }
    while chain.m < target {
        chain = lift_chain(&chain)?;
    }
    Ok(chain)
}

fn save_chain(sidecar: Option<&Path>, chain: &GeneratorChain) -> Result<(), CliError> {
    match sidecar {
        Some(path) => write_atomic(path, &(json_line("chain", &chain.record())? + "\n")),
        None => Ok(()),
    }
}

/// Drive a chain-based stream: `extra` levels are kept above each
/// record, `make` builds one record from the window starting at its level.
fn chain_stream<T, F, W>(g: &Global, sink: &mut Sink, start: u32, m_max: u32, extra: u32, make: F, mut write: W) -> Result<(), CliError>
where
    T: Send,
    F: Fn(&[GeneratorChain]) -> quasinv::Result<T> + Sync,
    W: FnMut(&mut Sink, &T) -> Result<(), CliError>,
{
    let sidecar = sink.sidecar(".chain.json");
    let mut m = start;
    let mut window = vec![restore_chain(sidecar.as_deref(), m)?];
    while m <= m_max {
        let end = (m + BATCH - 1).min(m_max);
        while window.last().unwrap().m < end + extra {
            let next = lift_chain(window.last().unwrap())?;
            window.push(next);
        }
        let count = (end - m + 1) as usize;
        let records: Vec<T> = (0..count)
            .into_par_iter()
            .map(|i| make(&window[i..]))
            .collect::<quasinv::Result<_>>()?;
        let mut last = m;
        for (i, r) in records.iter().enumerate() {
            last = m + i as u32;
            write(sink, r)?;
            if g.stop_after == Some(last) {
                break;
            }
        }
        sink.flush()?;
        save_chain(sidecar.as_deref(), &window[(last - m) as usize])?;
        if g.stop_after.is_some_and(|s| s <= last) {
            return Ok(());
        }
        if window.len() == count && end < m_max {
            let next = lift_chain(window.last().unwrap())?;
            window.push(next);
        }
        window.drain(..count);
        m = end + 1;
    }
    Ok(())
}

fn check_m_max(m_max: u32) -> Result<(), CliError> {
    if m_max > 100_000 {
        return Err(CliError::Config(format!("--m-max {m_max} is out of range")));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepRow<'a> {
    m: u32,
    c_m: &'a str,
    prime_factors_gt3: String,
    renxu_primes: String,
    agree: bool,
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn sweep(g: &Global, m_max: u32, prime_bound: u64) -> Result<(), CliError> {
    check_m_max(m_max)?;
    if prime_bound < 5 {
        return Err(CliError::Config("--prime-bound must be at least 5".into()));
    }
    let header = json!({"command": "sweep", "m_max": m_max, "prime_bound": prime_bound});
    let (mut sink, resumed) = Sink::open(g, "sweep", &header, Some(0))?;
    chain_stream(
        g,
        &mut sink,
        resumed.next_m(0),
        m_max,
        0,
        |w| sweep_record(&w[0], prime_bound),
        |sink, r| {
            if sink.is_json() {
                sink.record(r)
            } else {
                sink.rows(&[SweepRow {
                    m: r.m,
                    c_m: &r.c_m,
                    prime_factors_gt3: join(&r.prime_factors_gt3, ";"),
                    renxu_primes: join(&r.renxu_primes, ";"),
                    agree: r.agree,
                }])
            }
        },
    )
}

pub fn shift_verify(g: &Global, m_max: u32, primes: &[u64]) -> Result<(), CliError> {
    check_m_max(m_max)?;
    if let Some(p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(CliError::Config(format!("{p} is not prime")));
    }
    let header = json!({"command": "shift-verify", "m_max": m_max, "primes": primes});
    let (mut sink, resumed) = Sink::open(g, "shift", &header, Some(0))?;
    chain_stream(
        g,
        &mut sink,
        resumed.next_m(0),
        m_max,
        1,
        |w| shift_record(&w[0], &w[1], primes),
        |sink, r: &ShiftRecord| {
            if sink.is_json() {
                sink.record(r)
            } else {
                sink.rows(&r.valuations)
            }
        },
    )
}

#[derive(Serialize)]
struct FlatnessRow {
    degree: usize,
    char0: usize,
    cyclotomic: usize,
    prime_field: Option<usize>,
    formal: Option<usize>,
}

pub fn qdeform(g: &Global, n: u32, m: u32, p: u64, dmax: Option<u32>, formal: bool) -> Result<(), CliError> {
    if n != 3 {
        return Err(CliError::Config(format!("qdeform supports n = 3 only, got n = {n}")));
    }
    if p < 2 {
        return Err(CliError::Config("--p must be at least 2".into()));
    }
    let header = json!({"command": "qdeform", "n": n, "m": m, "p": p, "dmax": dmax, "formal": formal});
    let (mut sink, resumed) = Sink::open(g, "qdeform", &header, None)?;
    if !resumed.records.is_empty() {
        return Ok(());
    }
    let report = qdeform_report(m, p, dmax, formal)?;
    if sink.is_json() {
        sink.record(&report)?;
    } else {
        let f = &report.flatness;
        let rows: Vec<FlatnessRow> = (0..f.char0_dims.len())
            .map(|d| FlatnessRow {
                degree: d,
                char0: f.char0_dims[d],
                cyclotomic: f.cyclotomic_dims[d],
                prime_field: f.prime_field_dims.as_ref().map(|v| v[d]),
                formal: f.formal_dims.as_ref().map(|v| v[d]),
            })
            .collect();
        sink.rows(&rows)?;
    }
    sink.flush()
}

#[derive(Serialize)]
struct QWedgeRow {
    m: u32,
    c_q: String,
    flat_values_excluded: String,
    non_cyclotomic_remainder: String,
    range_lo: Option<u64>,
    range_hi: Option<u64>,
    conjecture_holds: bool,
}

pub fn qdeform_sweep(g: &Global, m_max: u32) -> Result<(), CliError> {
    check_m_max(m_max)?;
    let header = json!({"command": "qdeform-sweep", "m_max": m_max});
    let (mut sink, resumed) = Sink::open(g, "qwedge", &header, Some(0))?;
    let mut m = resumed.next_m(0);
    while m <= m_max {
        let end = (m + BATCH - 1).min(m_max);
        let records: Vec<QWedgeRecord> = (m..=end)
            .into_par_iter()
            .map(q_wedge_record)
            .collect::<quasinv::Result<_>>()?;
        for r in &records {
            if sink.is_json() {
                sink.record(r)?;
            } else {
                sink.rows(&[QWedgeRow {
                    m: r.m,
                    c_q: join(&r.c_q, " "),
                    flat_values_excluded: join(&r.flat_values_excluded, ";"),
                    non_cyclotomic_remainder: join(&r.non_cyclotomic_remainder, " "),
                    range_lo: r.excluded_range.map(|t| t.0),
                    range_hi: r.excluded_range.map(|t| t.1),
                    conjecture_holds: r.conjecture_holds,
                }])?;
            }
            if g.stop_after == Some(r.m) {
                return sink.flush();
            }
        }
        sink.flush()?;
        m = end + 1;
    }
    Ok(())
}
