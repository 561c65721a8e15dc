//! Sharpness scans, density estimates, Dwork verification, corpus generation
//! and report encoding.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::is_prime;
use crate::dwork::{trace_formula_count_with, DworkCount};
use crate::error::{Error, Result};
use crate::ffcount::{build_field, count_points, ord_q, OrdQ};
use crate::hasse::{evaluate_at_variety, hasse_polynomial_from, TWISTED_PRIME_LIMIT};
use crate::lattice::{minimal_data, MinimalData};
use crate::representations::{default_theta, denominator_set_from, is_admissible};
use crate::support::{ExponentVector, SupportSystem, VarietySpec};

pub const SCHEMA: &str = "axdiv/1";

/// Largest prime limit accepted by [`density_estimate`].
pub const DENSITY_LIMIT: u64 = 200;

/// One prime of a sharpness scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpnessRecord {
    pub p: u64,
    pub a: u32,
    pub q: u64,
    pub mu: i64,
    pub admissible: bool,
    pub count: Option<u64>,
    pub ord_q: Option<OrdQ>,
    pub hasse_value: Option<u64>,
    /// `|V(F_q)|/q^μ mod p`; `None` when `q^μ` does not divide the count.
    pub quotient_residue: Option<u64>,
    pub congruence: Option<bool>,
    pub predicted_sharp: Option<bool>,
    pub observed_sharp: Option<bool>,
    pub skipped: Option<String>,
}

impl SharpnessRecord {
    fn skipped(p: u64, a: u32, mu: i64, admissible: bool, reason: String) -> Self {
        SharpnessRecord {
            p,
            a,
            q: p.saturating_pow(a),
            mu,
            admissible,
            count: None,
            ord_q: None,
            hasse_value: None,
            quotient_residue: None,
            congruence: None,
            predicted_sharp: None,
            observed_sharp: None,
            skipped: Some(reason),
        }
    }

    /// A checked record whose congruence or sharpness prediction failed.
    pub fn failed(&self) -> bool {
        self.congruence == Some(false) || (self.predicted_sharp.is_some() && self.predicted_sharp != self.observed_sharp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mu: i64,
    pub a: u32,
    pub theta: u64,
    pub denominators: BTreeSet<u64>,
    pub records: Vec<SharpnessRecord>,
    /// Failed records among admissible primes.
    pub failures: usize,
    /// Failed records among the remaining primes, reported only.
    pub informative_failures: usize,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Count, Hasse value and congruence for one prime.
pub fn sharpness_record(
    spec: &VarietySpec,
    md: &MinimalData,
    p: u64,
    a: u32,
    admissible: bool,
) -> Result<SharpnessRecord> {
    let mu = md.mu;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !spec.coprime_to(p) {
        return Ok(SharpnessRecord::skipped(p, a, mu, admissible, format!("{p} divides a coefficient")));
    }
    if a == 2 && p > TWISTED_PRIME_LIMIT {
        return Ok(SharpnessRecord::skipped(p, a, mu, admissible, format!("a = 2 needs p <= {TWISTED_PRIME_LIMIT}")));
    }
    let field = build_field(p, a)?;
    let count = count_points(spec, &field)?;
    let h = hasse_polynomial_from(spec.system(), md, p, a)?;
    let hasse_value = evaluate_at_variety(&h.poly, spec)?;
    let q = field.q();
    let quotient_residue = quotient_mod_p(count, q, mu, p);
    let ord = ord_q(count, p, a);
    Ok(SharpnessRecord {
        p,
        a,
        q,
        mu,
        admissible,
        count: Some(count),
        observed_sharp: Some(ord.equals(mu)),
        ord_q: Some(ord),
        hasse_value: Some(hasse_value),
        congruence: Some(quotient_residue == Some(hasse_value)),
        quotient_residue,
        predicted_sharp: Some(hasse_value != 0),
        skipped: None,
    })
}

/// `count / q^μ mod p` when the division is exact.
fn quotient_mod_p(count: u64, q: u64, mu: i64, p: u64) -> Option<u64> {
    let qmu = BigInt::from(q).pow(mu.max(0) as u32);
    let c = BigInt::from(count);
    if (&c % &qmu) != BigInt::from(0) {
        return None;
    }
    let r = (c / qmu) % BigInt::from(p);
    u64::try_from(r).ok()
}

/// Sharpness records over `primes` (non-primes are ignored).
pub fn verify(spec: &VarietySpec, primes: &[u64], a: u32, theta: Option<u64>) -> Result<VerifyReport> {
    let system = spec.system();
    let md = minimal_data(system)?;
    let dens = denominator_set_from(system, &md)?;
    let theta = theta.unwrap_or_else(|| default_theta(system));
    let primes: Vec<u64> = primes.iter().copied().filter(|&p| is_prime(p)).collect();
    let records = primes
        .par_iter()
        .map(|&p| sharpness_record(spec, &md, p, a, is_admissible(&dens.denominators, theta, p)))
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|r| r.admissible && r.failed()).count();
    let informative_failures = records.iter().filter(|r| !r.admissible && r.failed()).count();
    Ok(VerifyReport { mu: md.mu, a, theta, denominators: dens.denominators, records, failures, informative_failures })
}

/// Empirical share of sharp primes in a window. An estimate, not a claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub window: (u64, u64),
    pub mu: i64,
    pub theta: u64,
    pub primes_tested: usize,
    pub admissible: usize,
    pub sharp_admissible: usize,
    pub sharp_all: usize,
    /// Sharp admissible primes over admissible primes, as `a/b`.
    pub sharp_fraction: String,
    pub sharp_fraction_value: f64,
    /// Admissible primes over tested primes, as `a/b`.
    pub admissible_fraction: String,
    pub admissible_fraction_value: f64,
    pub estimate: bool,
}

fn fraction(num: usize, den: usize) -> (String, f64) {
    if den == 0 {
        return ("0/0".into(), 0.0);
    }
    let g = num_integer::gcd(num, den);
    (format!("{}/{}", num / g, den / g), num as f64 / den as f64)
}

/// Sharp fraction over primes in `lo..=hi` coprime to the coefficients.
pub fn density_estimate(spec: &VarietySpec, lo: u64, hi: u64, theta: Option<u64>) -> Result<DensityEstimate> {
    if hi > DENSITY_LIMIT {
        return Err(Error::GuardExceeded { size: hi as u128, limit: DENSITY_LIMIT as u128 });
    }
    let system = spec.system();
    let md = minimal_data(system)?;
    let dens = denominator_set_from(system, &md)?;
    let theta = theta.unwrap_or_else(|| default_theta(system));
    let primes: Vec<u64> = (lo.max(2)..=hi).filter(|&p| is_prime(p) && spec.coprime_to(p)).collect();
    let sharp = primes
        .par_iter()
        .map(|&p| {
            let count = count_points(spec, &build_field(p, 1)?)?;
            Ok((p, ord_q(count, p, 1).equals(md.mu)))
        })
        .collect::<Result<Vec<_>>>()?;
    let admissible: Vec<bool> = sharp.iter().map(|&(p, _)| is_admissible(&dens.denominators, theta, p)).collect();
    let n_adm = admissible.iter().filter(|&&x| x).count();
    let sharp_adm = sharp.iter().zip(&admissible).filter(|((_, s), &a)| *s && a).count();
    let (sharp_fraction, sharp_fraction_value) = fraction(sharp_adm, n_adm);
    let (admissible_fraction, admissible_fraction_value) = fraction(n_adm, primes.len());
    Ok(DensityEstimate {
        window: (lo, hi),
        mu: md.mu,
        theta,
        primes_tested: primes.len(),
        admissible: n_adm,
        sharp_admissible: sharp_adm,
        sharp_all: sharp.iter().filter(|(_, s)| *s).count(),
        sharp_fraction,
        sharp_fraction_value,
        admissible_fraction,
        admissible_fraction_value,
        estimate: true,
    })
}

/// Truncated trace formula against brute force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DworkVerdict {
    pub trace: DworkCount,
    pub count: u64,
    pub count_residue: u64,
    pub matches: bool,
}

pub fn dwork_verify(spec: &VarietySpec, p: u64, m: u32, t_bound: u64, corrupt: bool) -> Result<DworkVerdict> {
    let count = count_points(spec, &build_field(p, 1)?)?;
    let trace = trace_formula_count_with(spec, p, m, t_bound, corrupt)?;
    let count_residue = count % trace.window;
    Ok(DworkVerdict { matches: trace.residue == count_residue, count, count_residue, trace })
}

/// Shape limits for random systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusShape {
    pub max_n: usize,
    pub max_r: usize,
    pub max_support: usize,
    pub max_coordinate: u32,
    pub max_coefficient: i64,
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape { max_n: 4, max_r: 2, max_support: 4, max_coordinate: 4, max_coefficient: 9 }
    }
}

/// `count` random systems; every polynomial is nonconstant and every
/// variable occurs somewhere.
pub fn generate_corpus(seed: u64, count: usize) -> Vec<VarietySpec> {
    generate_corpus_with(seed, count, CorpusShape::default())
}

pub fn generate_corpus_with(seed: u64, count: usize, shape: CorpusShape) -> Vec<VarietySpec> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count).map(|_| random_spec(&mut rng, shape)).collect()
}

fn random_spec(rng: &mut ChaCha20Rng, shape: CorpusShape) -> VarietySpec {
    loop {
        let n = rng.gen_range(1..=shape.max_n);
        let r = rng.gen_range(1..=shape.max_r);
        let mut supports = Vec::with_capacity(r);
        for _ in 0..r {
            let size = rng.gen_range(1..=shape.max_support);
            let mut support: Vec<ExponentVector> = Vec::with_capacity(size);
            while support.len() < size {
                let g = ExponentVector::new((0..n).map(|_| rng.gen_range(0..=shape.max_coordinate)).collect());
                if !support.contains(&g) {
                    support.push(g);
                }
            }
            supports.push(support);
        }
        let nonconstant = supports.iter().all(|s| s.iter().any(|g| !g.is_zero()));
        let Ok(system) = SupportSystem::new(n, supports) else { continue };
        if !nonconstant || !system.covers_all_variables() {
            continue;
        }
        let coefficients: Vec<Vec<i64>> = system
            .supports()
            .iter()
            .map(|s| {
                s.iter()
                    .map(|_| loop {
                        let c = rng.gen_range(-shape.max_coefficient..=shape.max_coefficient);
                        if c != 0 {
                            break c;
                        }
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[i64]> = coefficients.iter().map(Vec::as_slice).collect();
        return VarietySpec::with_integers(system, &refs).expect("nonzero integer coefficients");
    }
}

/// Writes `corpus-<seed>-<index>.json` files into `dir`.
pub fn write_corpus(dir: &Path, seed: u64, count: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    generate_corpus(seed, count)
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let path = dir.join(format!("corpus-{seed}-{i:03}.json"));
            fs::write(&path, spec.to_json_string() + "\n")?;
            Ok(path)
        })
        .collect()
}

/// `{"schema": "axdiv/1", "command": .., "report": ..}`.
pub fn envelope<T: Serialize>(command: &str, report: &T) -> Value {
    json!({ "schema": SCHEMA, "command": command, "report": report })
}

/// CSV with a header row taken from the first object's keys; nested values
/// are embedded as JSON text.
pub fn to_csv(rows: &[Value]) -> Result<String> {
    let mut out = csv::Writer::from_writer(Vec::new());
    let Some(Value::Object(first)) = rows.first() else { return Ok(String::new()) };
    let header: Vec<&String> = first.keys().collect();
    out.write_record(&header).map_err(csv_error)?;
    for row in rows {
        let cells: Vec<String> = header
            .iter()
            .map(|k| match row.get(k.as_str()) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            })
            .collect();
        out.write_record(&cells).map_err(csv_error)?;
    }
    let bytes = out.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Internal(format!("csv: {e}"))
}
