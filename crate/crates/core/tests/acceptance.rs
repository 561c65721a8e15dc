//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use axdiv::arith::{is_prime, pow_mod};
use axdiv::bounds::{ax_katz_bound, mu};
use axdiv::dwork::{
    check_leading_congruence, gamma_approximation, leading_matrix, leading_trace_congruence, teichmuller_lift,
    trace_formula_count, RamifiedPadicElement,
};
use axdiv::ffcount::{build_field, count_points, ord_p};
use axdiv::harness::{generate_corpus, verify, SharpnessRecord};
use axdiv::hasse::{evaluate_at_variety, hasse_polynomial, homogeneity_report, SparsePolynomialModP};
use axdiv::lattice::{check_psi_closure, lattice_window, minimal_data, psi_closure_check};
use axdiv::representations::{conditional_number, default_theta, denominator_set, is_admissible};
use axdiv::support::{enumerate_subset_pairs, SubsetPair, SupportSystem, VarietySpec};

/// Every criterion is exact; counts and residues must agree with zero slack.
const TOLERANCE: u64 = 0;
const CORPUS_SEED: u64 = 1;
const CORPUS_SIZE: usize = 25;
const COEFFICIENT_SEED: u64 = 2;
const RANDOM_TUPLES: usize = 5;
const DWORK_TRUNCATION: u64 = 2;

const BUDGET_PER_PRIME: Duration = Duration::from_secs(1);
const BUDGET_MU: Duration = Duration::from_secs(120);
const BUDGET_CONGRUENCE: Duration = Duration::from_secs(300);
const BUDGET_DWORK: Duration = Duration::from_secs(60);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn example2_system() -> SupportSystem {
    SupportSystem::from_vecs(3, &[&[&[3, 3, 0], &[0, 2, 2]]]).unwrap()
}

fn example2(a: i64, b: i64) -> VarietySpec {
    VarietySpec::with_integers(example2_system(), &[&[a, b]]).unwrap()
}

fn quartic(a: i64, b: i64) -> VarietySpec {
    let s = SupportSystem::from_vecs(2, &[&[&[3, 1], &[1, 3]]]).unwrap();
    VarietySpec::with_integers(s, &[&[a, b]]).unwrap()
}

fn line() -> VarietySpec {
    VarietySpec::unit_coefficients(SupportSystem::from_vecs(1, &[&[&[1]]]).unwrap())
}

fn conic(a: i64, b: i64) -> VarietySpec {
    let s = SupportSystem::from_vecs(2, &[&[&[2, 0], &[0, 2]]]).unwrap();
    VarietySpec::with_integers(s, &[&[a, b]]).unwrap()
}

/// `(1,1)` plus seeded pairs coprime to `3·5·7·11·13`.
fn coefficient_tuples() -> Vec<(i64, i64)> {
    let mut rng = ChaCha20Rng::seed_from_u64(COEFFICIENT_SEED);
    let mut out = vec![(1, 1)];
    let mut draw = || loop {
        let c: i64 = rng.gen_range(-30..=30);
        if c != 0 && num_integer::gcd(c, 15015) == 1 {
            break c;
        }
    };
    while out.len() < 1 + RANDOM_TUPLES {
        out.push((draw(), draw()));
    }
    out
}

fn count(spec: &VarietySpec, p: u64, a: u32) -> u64 {
    count_points(spec, &build_field(p, a).unwrap()).unwrap()
}

fn criterion_1() -> Verdict {
    let tuples = coefficient_tuples();
    let mut slowest = Duration::ZERO;
    for p in [3u64, 5, 7, 11, 13] {
        let start = Instant::now();
        for &(a, b) in &tuples {
            let spec = example2(a, b);
            let c = count(&spec, p, 1);
            let expected = p * (2 * p - 1);
            if c.abs_diff(expected) > TOLERANCE {
                return verdict(false, format!("p = {p}, a = ({a},{b}): count {c}, expected {expected}"));
            }
            if ord_p(c, p) != Some(1) {
                return verdict(false, format!("p = {p}: ord_p = {:?}", ord_p(c, p)));
            }
        }
        slowest = slowest.max(start.elapsed());
    }
    let m = mu(&example2_system()).unwrap().mu;
    if m != 1 {
        return verdict(false, format!("mu = {m}"));
    }
    verdict(
        slowest < BUDGET_PER_PRIME,
        format!("{} tuples x 5 primes, count = p(2p-1), ord_p = mu = 1, slowest prime {:.3}s", tuples.len(), slowest.as_secs_f64()),
    )
}

fn criterion_2() -> Verdict {
    let h = hasse_polynomial(&example2_system(), 5, 1).unwrap();
    let mut expected = SparsePolynomialModP::zero(5, h.poly.labels().to_vec());
    expected.add_term(vec![4, 0], 4);
    expected.add_term(vec![0, 4], 4);
    expected.add_term(vec![4, 4], 1);
    let golden = "4*A[1,(0,2,2)]^4 + 4*A[1,(3,3,0)]^4 + 1*A[1,(3,3,0)]^4*A[1,(0,2,2)]^4";
    let text = h.poly.to_canonical_string();
    let value = evaluate_at_variety(&h.poly, &example2(1, 1)).unwrap();
    let from_count = (count(&example2(1, 1), 5, 1) / 5) % 5;
    let pass = h.poly == expected && text == golden && value == 4 && from_count == 4;
    verdict(pass, format!("H_5 = {text}; H_5(1,1) = {value}, 45/5 mod 5 = {from_count}"))
}

fn criterion_3() -> Verdict {
    let report = conditional_number(&example2_system()).unwrap();
    let dens: BTreeSet<u64> = [1].into();
    if report.c_value != Some(-1) || report.denominators != dens || !report.sparsity {
        return verdict(false, format!("c = {:?}, D = {:?}, sparsity = {}", report.c_value, report.denominators, report.sparsity));
    }
    let mut checked = 0;
    for p in [5u64, 7, 11, 13] {
        let h = hasse_polynomial(&example2_system(), p, 1).unwrap();
        for (a, b) in coefficient_tuples() {
            let v = evaluate_at_variety(&h.poly, &example2(a, b)).unwrap();
            checked += 1;
            if v != p - 1 {
                return verdict(false, format!("H_{p}({a},{b}) = {v}"));
            }
        }
    }
    verdict(true, format!("c = -1, D = {{1}}, sparsity true, H_p(a) = -1 in {checked} cases"))
}

fn criterion_4(corpus: &[VarietySpec]) -> Verdict {
    let start = Instant::now();
    for (i, spec) in corpus.iter().enumerate() {
        let s = spec.system();
        let combinatorial = match minimal_data(s) {
            Ok(md) => md.mu,
            Err(e) => return verdict(false, format!("instance {i}: {e}")),
        };
        let report = match mu(s) {
            Ok(r) => r,
            Err(e) => return verdict(false, format!("instance {i}: {e}")),
        };
        if report.mu != combinatorial {
            return verdict(false, format!("instance {i}: {} vs {combinatorial}", report.mu));
        }
        let ak = ax_katz_bound(s.n(), &s.degrees()).value();
        if combinatorial < ak {
            return verdict(false, format!("instance {i}: mu {combinatorial} < Ax-Katz {ak}"));
        }
    }
    let elapsed = start.elapsed();
    verdict(
        elapsed < BUDGET_MU,
        format!("{} instances: w - r = mu and mu >= Ax-Katz in all, {:.2}s", corpus.len(), elapsed.as_secs_f64()),
    )
}

/// Sharpness records for primes `2..=31` on every corpus instance.
fn corpus_records(corpus: &[VarietySpec]) -> (Vec<Vec<SharpnessRecord>>, Duration) {
    let start = Instant::now();
    let primes: Vec<u64> = (2..=31).filter(|&p| is_prime(p)).collect();
    let records = corpus.iter().map(|spec| verify(spec, &primes, 1, None).unwrap().records).collect();
    (records, start.elapsed())
}

fn criterion_5(records: &[Vec<SharpnessRecord>]) -> Verdict {
    let mut checked = 0;
    for (i, recs) in records.iter().enumerate() {
        for r in recs.iter().filter(|r| r.skipped.is_none()) {
            checked += 1;
            let ord = r.ord_q.as_ref().unwrap();
            if !ord.at_least(r.mu) {
                return verdict(false, format!("instance {i}, p = {}: ord {ord} < mu {}", r.p, r.mu));
            }
        }
    }
    verdict(checked > 0, format!("ord_p|V(F_p)| >= mu in {checked} (instance, prime) cases"))
}

fn criterion_6(corpus: &[VarietySpec], records: &[Vec<SharpnessRecord>], elapsed: Duration) -> Verdict {
    let mut checked = 0;
    let mut informative = 0;
    for (i, (spec, recs)) in corpus.iter().zip(records).enumerate() {
        let dens = denominator_set(spec.system()).unwrap().denominators;
        let theta = default_theta(spec.system());
        for r in recs.iter().filter(|r| r.skipped.is_none() && r.p >= 5) {
            if !is_admissible(&dens, theta, r.p) {
                informative += r.failed() as usize;
                continue;
            }
            checked += 1;
            if r.congruence != Some(true) || r.predicted_sharp != r.observed_sharp {
                return verdict(
                    false,
                    format!("instance {i}, p = {}: count/p^mu = {:?}, H = {:?}", r.p, r.quotient_residue, r.hasse_value),
                );
            }
        }
    }
    verdict(
        checked > 0 && elapsed < BUDGET_CONGRUENCE,
        format!(
            "{checked} admissible cases, congruence and sharpness prediction exact ({informative} failures outside the admissible set), {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut details = Vec::new();
    let tuples = coefficient_tuples();
    for p in [3u64, 5] {
        let q = p * p;
        let h = hasse_polynomial(&example2_system(), p, 2).unwrap();
        for &(a, b) in &tuples {
            let spec = example2(a, b);
            let c = count(&spec, p, 2);
            if c != q * (2 * q - 1) {
                return verdict(false, format!("F_{q}: count {c}"));
            }
            if ord_p(c, p) != Some(2) {
                return verdict(false, format!("F_{q}: ord_q != 1"));
            }
            let quotient = (c / q) % p;
            let hv = evaluate_at_variety(&h.poly, &spec).unwrap();
            if quotient != hv {
                return verdict(false, format!("p = {p}, a = ({a},{b}): count/q = {quotient}, H^[2] = {hv}"));
            }
        }
        details.push(format!("|V(F_{q})| = {}", q * (2 * q - 1)));
    }
    verdict(true, format!("{}, ord_q = 1, H^[2] congruence for p in {{3,5}}", details.join(", ")))
}

/// `2p-1` plus `2(p-1)` when `-a2/a1` is a square mod `p`.
fn quartic_count_oracle(a1: i64, a2: i64, p: u64) -> u64 {
    let pi = p as i64;
    let inv = pow_mod(a1.rem_euclid(pi) as u64, p - 2, p);
    let ratio = ((-a2).rem_euclid(pi) as u64 * inv) % p;
    let square = pow_mod(ratio, (p - 1) / 2, p) == 1;
    2 * p - 1 + if square { 2 * (p - 1) } else { 0 }
}

fn criterion_8() -> Verdict {
    let dens = denominator_set(quartic(1, 1).system()).unwrap().denominators;
    let m = mu(quartic(1, 1).system()).unwrap().mu;
    if dens != BTreeSet::from([1, 2]) || m != 0 {
        return verdict(false, format!("D = {dens:?}, mu = {m}"));
    }
    let mut seen = BTreeSet::new();
    for p in [5u64, 7, 11, 13] {
        for (a, b) in coefficient_tuples() {
            let c = count(&quartic(a, b), p, 1);
            let expected = quartic_count_oracle(a, b, p);
            if c != expected || (c != 2 * p - 1 && c != 4 * p - 3) {
                return verdict(false, format!("p = {p}, a = ({a},{b}): count {c}, oracle {expected}"));
            }
            seen.insert(if c == 2 * p - 1 { "2p-1" } else { "4p-3" });
        }
    }
    verdict(true, format!("D = {{1,2}}, mu = 0, counts in {{2p-1, 4p-3}} (observed {seen:?})"))
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut instances: Vec<(String, VarietySpec)> = vec![("x1".into(), line())];
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        instances.push((format!("{a}x1^2+{b}x2^2"), conic(a, b)));
    }
    for (a, b) in coefficient_tuples().into_iter().take(3) {
        instances.push((format!("example 2 ({a},{b})"), example2(a, b)));
    }
    let mut checked = 0;
    for (name, spec) in &instances {
        let s = spec.system();
        let m = (DWORK_TRUNCATION + (s.n() + s.r()) as u64 + 2) as u32;
        for p in [3u64, 5] {
            let res = match trace_formula_count(spec, p, m, DWORK_TRUNCATION) {
                Ok(r) => r,
                Err(e) => return verdict(false, format!("{name}, p = {p}: {e}")),
            };
            let c = count(spec, p, 1);
            checked += 1;
            if res.residue != c % res.window {
                return verdict(false, format!("{name}, p = {p}: trace {} vs count {c} mod {}", res.residue, res.window));
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        elapsed < BUDGET_DWORK,
        format!("{checked} (instance, prime) cases agree mod p^(T+1-s), T = {DWORK_TRUNCATION}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn ring_element(rng: &mut ChaCha20Rng, p: u64, m: u32) -> RamifiedPadicElement {
    let md = p.pow(m);
    let c: Vec<u64> = (0..p - 1).map(|_| rng.gen_range(0..md)).collect();
    RamifiedPadicElement::from_coefficients(&c, p, m).unwrap()
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let mut parts = Vec::new();

    // ring axioms
    let mut triples = 0;
    for (p, m) in [(3u64, 6u32), (5, 4), (7, 3), (11, 3)] {
        for _ in 0..200 {
            let (a, b, c) = (ring_element(&mut rng, p, m), ring_element(&mut rng, p, m), ring_element(&mut rng, p, m));
            triples += 1;
            if a.mul(&b).mul(&c) != a.mul(&b.mul(&c)) || a.mul(&b.add(&c)) != a.mul(&b).add(&a.mul(&c)) {
                return verdict(false, format!("ring axioms fail at p = {p}"));
            }
        }
    }
    parts.push(format!("ring axioms on {triples} triples"));

    // γ^{p-1} + p has π-valuation >= p
    for (p, m) in [(3u64, 5u32), (5, 4), (7, 3), (11, 3), (13, 3)] {
        let g = gamma_approximation(p, m).unwrap();
        let x = g.pow(p - 1).add(&RamifiedPadicElement::from_int(p as i64, p, m).unwrap());
        let pi = RamifiedPadicElement::pi(p, m).unwrap();
        if !x.valuation().is_none_or(|v| v >= p) || g.valuation() != Some(1) || !g.congruent_mod_pi_power(&pi, 2) {
            return verdict(false, format!("gamma congruence fails at p = {p}"));
        }
    }
    parts.push("gamma congruence for p <= 13".into());

    // Teichmüller
    let mut lifts = 0;
    for p in [3u64, 5, 7, 11, 13] {
        for m in 1..=5u32 {
            let md = p.pow(m);
            for a in 1..p as i64 {
                let w = teichmuller_lift(a, p, m).unwrap();
                lifts += 1;
                if w % p != a as u64 || pow_mod(w, p - 1, md) != 1 % md {
                    return verdict(false, format!("Teichmuller lift of {a} mod {p}^{m}"));
                }
            }
        }
    }
    if teichmuller_lift(2, 5, 2).unwrap() != 7 || teichmuller_lift(4, 5, 2).unwrap() != 24 {
        return verdict(false, "Teichmuller examples");
    }
    parts.push(format!("Teichmuller laws on {lifts} lifts"));

    // ψ-closure plus a corrupted set
    let standard = [example2(1, 1), line(), conic(1, 1), quartic(1, 1)];
    let mut scans = 0;
    for spec in &standard {
        let s = spec.system();
        for pair in enumerate_subset_pairs(s.n(), s.r()) {
            for p in [2u64, 3] {
                let v = psi_closure_check(s, &pair, p, 6);
                scans += 1;
                if !v.pass {
                    return verdict(false, format!("psi-closure fails for {pair} at p = {p}"));
                }
            }
        }
    }
    let s1 = line();
    let pair = SubsetPair::one_based(&[1], &[1]);
    let window = lattice_window(s1.system(), &pair, 6);
    let corrupted = check_psi_closure(&window, 3, |lp| lp.t != vec![2]);
    if corrupted.pass {
        return verdict(false, "corrupted psi-closure control passed");
    }
    parts.push(format!("psi-closure on {scans} scans"));

    // homogeneity at admissible primes
    let mut blocks = 0;
    for spec in &standard {
        let s = spec.system();
        let dens = denominator_set(s).unwrap().denominators;
        let theta = default_theta(s);
        for p in [5u64, 7, 11, 13].into_iter().filter(|&p| is_admissible(&dens, theta, p)) {
            let report = homogeneity_report(&hasse_polynomial(s, p, 1).unwrap());
            blocks += report.blocks.len();
            if !report.pass {
                return verdict(false, format!("homogeneity fails at p = {p}"));
            }
        }
    }
    parts.push(format!("homogeneity on {blocks} blocks"));

    // leading-trace congruence plus a corrupted entry
    let mut congruences = 0;
    for spec in [example2(1, 1), example2(2, 3), line(), conic(1, 2)] {
        let md = minimal_data(spec.system()).unwrap();
        for pw in &md.k {
            for p in [5u64, 7, 11] {
                let check = leading_trace_congruence(&spec, &pw.pair, p).unwrap();
                congruences += 1;
                if !check.pass {
                    return verdict(false, format!("leading congruence fails for {} at p = {p}", pw.pair));
                }
            }
        }
    }
    let spec = example2(1, 1);
    let mut mat = leading_matrix(&spec, &SubsetPair::one_based(&[1], &[2, 3]), 5).unwrap();
    let bump = RamifiedPadicElement::from_int(5, 5, mat.precision).unwrap();
    mat.entries[0][0] = mat.entries[0][0].add(&bump);
    if check_leading_congruence(&spec, &mat).unwrap().pass {
        return verdict(false, "corrupted leading-trace control passed");
    }
    parts.push(format!("leading-trace congruence on {congruences} cases"));

    verdict(true, format!("{}; negative controls fail as expected", parts.join(", ")))
}

fn main() {
    let total = Instant::now();
    let corpus = generate_corpus(CORPUS_SEED, CORPUS_SIZE);
    let mut results: Vec<(usize, &str, Verdict, Duration)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let elapsed = start.elapsed();
        println!("[{}] {id:>2} {name}: {} ({:.2}s)", if v.pass { "PASS" } else { "FAIL" }, v.detail, elapsed.as_secs_f64());
        results.push((id, name, v, elapsed));
    };
    run(1, "example 2 exact counts", &mut criterion_1);
    run(2, "Hasse polynomial golden value", &mut criterion_2);
    run(3, "conditional number", &mut criterion_3);
    run(4, "mu cross-check", &mut || criterion_4(&corpus));
    let (records, elapsed) = corpus_records(&corpus);
    run(5, "Adolphson-Sperber lower bound", &mut || criterion_5(&records));
    run(6, "central congruence", &mut || criterion_6(&corpus, &records, elapsed));
    run(7, "extension fields", &mut criterion_7);
    run(8, "denominator example", &mut criterion_8);
    run(9, "Dwork trace formula", &mut criterion_9);
    run(10, "property suites", &mut criterion_10);
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.2}s",
        results.len() - failed.len(),
        results.len(),
        total.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {failed:?}");
        std::process::exit(1);
    }
}
