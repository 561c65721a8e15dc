//! Truncated Dwork matrices, the trace formula for `q = p`, and the
//! leading-term congruence.

pub mod ring;

use serde::Serialize;

pub use ring::RamifiedPadicElement;

use crate::arith::{is_prime, mul_mod, pow_mod, rational_mod};
use crate::error::{Error, Result};
use crate::geometry::{for_each_integral_point, FiberPolytope};
use crate::hasse::{artin_hasse_coefficients, block_trace_polynomial, coefficient_residues};
use crate::lattice::{lattice_window, weight_wz, zmin_for_pair, LatticePair, WeightValue};
use crate::support::{nonempty_subsets, SubsetPair, SupportSystem, VarietySpec};

const NEWTON_ITERATION_CAP: usize = 64;

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 3 {
        return Err(Error::InvalidArgument("the Dwork machinery needs p >= 3".into()));
    }
    Ok(())
}

/// Smallest `K` such that `x^{p^i}/p^i` has π-valuation at least
/// `(p-1)(m+1)` for every `i > K` when `val_π(x) = 1`.
pub fn series_truncation(p: u64, m: u32) -> u32 {
    let target = (p as u128 - 1) * (m as u128 + 1);
    let mut k = 0u32;
    loop {
        let i = k as u128 + 1;
        let pi = (p as u128).pow(i as u32);
        if pi >= target + (p as u128 - 1) * i {
            return k;
        }
        k += 1;
    }
}

/// `Σ_{i<=K} x^{p^i}/p^i` and its derivative `Σ_{i<=K} x^{p^i - 1}`.
fn truncated_log(x: &RamifiedPadicElement, k: u32) -> Result<(RamifiedPadicElement, RamifiedPadicElement)> {
    let p = x.p();
    let m = x.precision();
    let mut scaled = RamifiedPadicElement::zero(p, m)?;
    let mut deriv = RamifiedPadicElement::zero(p, m)?;
    for i in 0..=k {
        let e = p.pow(i);
        scaled = scaled.add(&x.pow(e).scale(p.pow(k - i)));
        deriv = deriv.add(&x.pow(e - 1));
    }
    let mut value = scaled;
    for _ in 0..k {
        value = value.div_p()?;
    }
    Ok((value, deriv))
}

/// The root `γ` of `log E_p` with `γ ≡ π mod π²`, modulo `p^m`.
pub fn gamma_approximation(p: u64, m: u32) -> Result<RamifiedPadicElement> {
    check_prime(p)?;
    if m < 2 {
        return Err(Error::Precision("gamma needs m >= 2".into()));
    }
    let k = series_truncation(p, m);
    let work = m + k + 1;
    let mut x = RamifiedPadicElement::pi(p, work)?;
    for _ in 0..NEWTON_ITERATION_CAP {
        let (value, deriv) = truncated_log(&x, k)?;
        let step = value.mul(&deriv.reduce_precision(value.precision()).inverse()?);
        if step.reduce_precision(m + 1).is_zero() {
            return Ok(x.reduce_precision(m));
        }
        x = x.sub(&step.lift_representative(work)?).lift_representative(work)?;
    }
    Err(Error::NonConvergence(format!("Newton iteration for gamma at p = {p}, m = {m}")))
}

/// Teichmüller representative of `a` modulo `p^m`.
pub fn teichmuller_lift(a: i64, p: u64, m: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if (a as i128).rem_euclid(p as i128) == 0 {
        return Err(Error::DivisibleByPrime { a, p });
    }
    let md = ring::modulus(p, m)?;
    Ok(teichmuller_residue((a as i128).rem_euclid(md as i128) as u64, p, m, md))
}

fn teichmuller_residue(a: u64, p: u64, m: u32, md: u64) -> u64 {
    let mut w = a % md;
    for _ in 0..m {
        w = pow_mod(w, p, md);
    }
    w
}

/// Per-instance data shared by all matrix entries.
struct DworkContext<'a> {
    system: &'a SupportSystem,
    p: u64,
    m: u32,
    modulus: u64,
    gamma_p1: RamifiedPadicElement,
    deltas: Vec<u64>,
    lifts: Vec<u64>,
}

impl<'a> DworkContext<'a> {
    fn new(spec: &'a VarietySpec, p: u64, m: u32, t_bound: u64) -> Result<Self> {
        check_prime(p)?;
        let modulus = ring::modulus(p, m)?;
        let residues = coefficient_residues(spec, p)?;
        let lifts = residues.iter().map(|&a| teichmuller_residue(a, p, m, modulus)).collect();
        let gamma = gamma_approximation(p, m.max(2))?.reduce_precision(m);
        let degree = (p * t_bound.max(1)) as usize;
        let deltas = artin_hasse_coefficients(p, degree)
            .iter()
            .map(|d| rational_mod(d, modulus).ok_or_else(|| Error::Internal("δ is not p-integral".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(DworkContext { system: spec.system(), p, m, modulus, gamma_p1: gamma.pow(p - 1), deltas, lifts })
    }

    /// `G_{T,V}(â)` modulo `p^m`; zero for a target with a negative entry.
    fn g_value(&self, pair: &SubsetPair, t: &[i64], v: &[i64]) -> u64 {
        if t.iter().chain(v).any(|&x| x < 0) {
            return 0;
        }
        let t: Vec<u64> = t.iter().map(|&x| x as u64).collect();
        let v: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let fiber = FiberPolytope::new(self.system, pair, &t, &v);
        let md = self.modulus;
        let mut acc = 0u64;
        for_each_integral_point(&fiber, |u| {
            let mut term = 1u64;
            for (gen, &x) in fiber.generators().iter().zip(u) {
                term = mul_mod(term, self.deltas[x as usize], md);
                term = mul_mod(term, pow_mod(self.lifts[gen.var], x, md), md);
            }
            acc = (acc + term) % md;
            true
        });
        acc
    }

    /// `γ^{(p-1)|t|} G_{p t - t', p v - v'}(â)` for row `(t',v')`, column `(t,v)`.
    fn entry(&self, row: &LatticePair, col: &LatticePair) -> RamifiedPadicElement {
        let p = self.p as i64;
        let t: Vec<i64> = col.t.iter().zip(&row.t).map(|(&a, &b)| p * a as i64 - b as i64).collect();
        let v: Vec<i64> = col.v.iter().zip(&row.v).map(|(&a, &b)| p * a as i64 - b as i64).collect();
        let g = self.g_value(&col.pair, &t, &v);
        self.gamma_p1.pow(col.total()).scale(g)
    }
}

/// Rows and columns indexed by `(t,v) ∈ Z_{B,C}` with `|t| <= T`.
#[derive(Clone, Debug)]
pub struct TruncatedDworkMatrix {
    pub pair: SubsetPair,
    pub p: u64,
    pub precision: u32,
    pub truncation: u64,
    pub basis: Vec<LatticePair>,
    /// `entries[row][col]`.
    pub entries: Vec<Vec<RamifiedPadicElement>>,
}

impl TruncatedDworkMatrix {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> RamifiedPadicElement {
        let mut acc = RamifiedPadicElement::zero(self.p, self.precision).expect("checked precision");
        for (i, row) in self.entries.iter().enumerate() {
            acc = acc.add(&row[i]);
        }
        acc
    }
}

fn check_window_precision(m: u32, t_bound: u64) -> Result<()> {
    if (m as u64) <= t_bound {
        return Err(Error::Precision(format!(
            "precision {m} cannot represent entries of valuation up to {t_bound}"
        )));
    }
    Ok(())
}

/// The Dwork matrix of one pair, truncated at `|t| <= T`.
pub fn truncated_matrix(
    spec: &VarietySpec,
    pair: &SubsetPair,
    p: u64,
    m: u32,
    t_bound: u64,
) -> Result<TruncatedDworkMatrix> {
    check_window_precision(m, t_bound)?;
    let ctx = DworkContext::new(spec, p, m, t_bound)?;
    Ok(matrix_with(&ctx, pair, t_bound))
}

fn matrix_with(ctx: &DworkContext<'_>, pair: &SubsetPair, t_bound: u64) -> TruncatedDworkMatrix {
    let basis = lattice_window(ctx.system, pair, t_bound);
    let entries = basis.iter().map(|row| basis.iter().map(|col| ctx.entry(row, col)).collect()).collect();
    TruncatedDworkMatrix { pair: pair.clone(), p: ctx.p, precision: ctx.m, truncation: t_bound, basis, entries }
}

fn truncated_trace(ctx: &DworkContext<'_>, pair: &SubsetPair, t_bound: u64) -> Result<(usize, RamifiedPadicElement)> {
    let basis = lattice_window(ctx.system, pair, t_bound);
    let mut acc = RamifiedPadicElement::zero(ctx.p, ctx.m)?;
    for x in &basis {
        acc = acc.add(&ctx.entry(x, x));
    }
    Ok((basis.len(), acc))
}

/// Pairs `(B, C)` entering the trace formula: `B` nonempty, `C` any subset.
pub fn trace_formula_pairs(n: usize, r: usize) -> Vec<SubsetPair> {
    let mut cs = vec![Vec::new()];
    cs.extend(nonempty_subsets(n));
    let mut out = Vec::new();
    for b in nonempty_subsets(r) {
        for c in &cs {
            out.push(SubsetPair::new(b.clone(), c.clone()));
        }
    }
    out
}

/// Outcome of the truncated trace formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DworkCount {
    pub p: u64,
    pub precision: u32,
    pub truncation: u64,
    pub slack: u32,
    /// `p^{T+1-s}`.
    pub window: u64,
    /// Count modulo `window`.
    pub residue: u64,
    /// Pairs with a nonempty truncated basis.
    pub pairs_used: usize,
    pub corrupted: bool,
}

/// `|V(F_p)|` modulo `p^{T+1-s}` from truncated Dwork matrices.
pub fn trace_formula_count(spec: &VarietySpec, p: u64, m: u32, t_bound: u64) -> Result<DworkCount> {
    trace_formula_count_with(spec, p, m, t_bound, false)
}

/// As [`trace_formula_count`]; with `corrupt` the trace of the largest
/// nonempty pair is perturbed.
pub fn trace_formula_count_with(
    spec: &VarietySpec,
    p: u64,
    m: u32,
    t_bound: u64,
    corrupt: bool,
) -> Result<DworkCount> {
    let system = spec.system();
    let (n, r) = (system.n(), system.r());
    if (m as u64) < t_bound + (n + r) as u64 + 2 {
        return Err(Error::Precision(format!(
            "precision {m} is below T + n + r + 2 = {}",
            t_bound + (n + r) as u64 + 2
        )));
    }
    let slack = r as u32;
    if t_bound + 1 <= slack as u64 {
        return Err(Error::InvalidArgument(format!("truncation {t_bound} leaves no window after slack {slack}")));
    }
    let ctx = DworkContext::new(spec, p, m, t_bound)?;
    let pairs = trace_formula_pairs(n, r);
    let traces = pairs
        .iter()
        .map(|pair| truncated_trace(&ctx, pair, t_bound))
        .collect::<Result<Vec<_>>>()?;

    // p^s·|V| = p^{n+s} + Σ (p-1)^d p^{n+s-d} Tr
    let shift = n as u32 + slack;
    let mut total = RamifiedPadicElement::from_residue(p.pow(shift), p, m)?;
    let mut pairs_used = 0;
    let mut corrupt_at = None;
    if corrupt {
        corrupt_at = pairs
            .iter()
            .zip(&traces)
            .enumerate()
            .filter(|(_, (_, (len, _)))| *len > 0)
            .max_by_key(|(_, (pair, _))| pair.size())
            .map(|(i, _)| i);
    }
    for (i, (pair, (len, trace))) in pairs.iter().zip(&traces).enumerate() {
        if *len == 0 {
            continue;
        }
        pairs_used += 1;
        let d = pair.size() as u32;
        let factor = mul_mod(pow_mod(p - 1, d as u64, ctx.modulus), p.pow(shift - d), ctx.modulus);
        let mut trace = trace.clone();
        if corrupt_at == Some(i) {
            // shifts |V| by the unit (p-1)^d when d >= n
            let bump = p.pow(d.saturating_sub(n as u32));
            trace = trace.add(&RamifiedPadicElement::from_residue(bump, p, m)?);
        }
        total = total.add(&trace.scale(factor));
    }
    if !total.is_rational() {
        return Err(Error::Precision(format!("assembled value has a nonzero π-part: {total}")));
    }
    let mut value = total;
    for _ in 0..slack {
        value = value
            .div_p()
            .map_err(|_| Error::Precision("assembled value is not integral".into()))?;
    }
    let window = p.pow((t_bound + 1) as u32 - slack);
    Ok(DworkCount {
        p,
        precision: m,
        truncation: t_bound,
        slack,
        window,
        residue: value.coefficients()[0] % window,
        pairs_used,
        corrupted: corrupt,
    })
}

/// Both sides of the leading-term congruence for one pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub pair: SubsetPair,
    pub weight: u64,
    pub p: u64,
    /// `Tr(M)/p^w mod π`.
    pub trace_side: u64,
    /// `(-1)^w Tr(N(â)) mod p`.
    pub hasse_side: u64,
    pub pass: bool,
}

/// Matrix used by [`leading_trace_congruence`], truncated at `|t| = w_Z`.
pub fn leading_matrix(spec: &VarietySpec, pair: &SubsetPair, p: u64) -> Result<TruncatedDworkMatrix> {
    let w = match weight_wz(spec.system(), pair) {
        WeightValue::Finite(w) => w,
        WeightValue::Infinite => return Err(Error::InfiniteWeight(pair.clone())),
    };
    truncated_matrix(spec, pair, p, w as u32 + 2, w)
}

pub fn leading_trace_congruence(spec: &VarietySpec, pair: &SubsetPair, p: u64) -> Result<CongruenceCheck> {
    let matrix = leading_matrix(spec, pair, p)?;
    check_leading_congruence(spec, &matrix)
}

/// Compares a (possibly modified) leading matrix against the Hasse block.
pub fn check_leading_congruence(spec: &VarietySpec, matrix: &TruncatedDworkMatrix) -> Result<CongruenceCheck> {
    let system = spec.system();
    let p = matrix.p;
    let pair = &matrix.pair;
    let zmin = zmin_for_pair(system, pair)?;
    let w = zmin.first().map(LatticePair::total).unwrap_or(0);
    let mut trace = matrix.trace();
    for _ in 0..w {
        trace = trace.div_p()?;
    }
    let trace_side = trace.coefficients()[0] % p;
    let residues: Vec<Option<u64>> = coefficient_residues(spec, p)?.into_iter().map(Some).collect();
    let block = block_trace_polynomial(system, pair, &zmin, p, 1)?.evaluate(&residues)?;
    let hasse_side = if w % 2 == 0 { block } else { (p - block) % p };
    Ok(CongruenceCheck { pair: pair.clone(), weight: w, p, trace_side, hasse_side, pass: trace_side == hasse_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcount::{build_field, count_points};
    use crate::support::SupportSystem;
    use proptest::prelude::*;

    fn line() -> VarietySpec {
        VarietySpec::unit_coefficients(SupportSystem::from_vecs(1, &[&[&[1]]]).unwrap())
    }

    fn example2(a: i64, b: i64) -> VarietySpec {
        let system = SupportSystem::from_vecs(3, &[&[&[3, 3, 0], &[0, 2, 2]]]).unwrap();
        VarietySpec::with_integers(system, &[&[a, b]]).unwrap()
    }

    fn conic(a: i64, b: i64) -> VarietySpec {
        let system = SupportSystem::from_vecs(2, &[&[&[2, 0], &[0, 2]]]).unwrap();
        VarietySpec::with_integers(system, &[&[a, b]]).unwrap()
    }

    /// Root of `h(y) = Σ (-1)^{e_i} p^{e_i - i} y^{p^i}` with `y ≡ 1`, by search.
    fn h_root(p: u64, k: u32) -> u64 {
        let md = p.pow(k);
        let h = |y: u64| {
            let mut acc: i128 = 0;
            for i in 0..6u32 {
                let e = (p.pow(i) - 1) / (p - 1);
                if e - i as u64 >= k as u64 {
                    continue;
                }
                let coeff = p.pow((e - i as u64) as u32) as i128;
                let term = coeff * pow_mod(y, p.pow(i), md) as i128;
                acc += if e % 2 == 0 { term } else { -term };
            }
            acc.rem_euclid(md as i128) as u64
        };
        let roots: Vec<u64> = (0..md).filter(|&y| y % p == 1 && h(y) == 0).collect();
        assert_eq!(roots.len(), 1, "unique lift");
        roots[0]
    }

    #[test]
    fn gamma_matches_independent_root() {
        for (p, m) in [(3u64, 4u32), (5, 3), (7, 3)] {
            let g = gamma_approximation(p, m).unwrap();
            let y = h_root(p, m);
            let mut expect = vec![0u64; (p - 1) as usize];
            expect[1] = y;
            assert_eq!(g.coefficients(), expect.as_slice(), "p = {p}");
        }
    }

    #[test]
    fn gamma_defining_congruences() {
        for (p, m) in [(3u64, 4u32), (5, 3), (7, 3), (11, 3), (13, 2)] {
            let g = gamma_approximation(p, m).unwrap();
            let pi = RamifiedPadicElement::pi(p, m).unwrap();
            assert_eq!(g.valuation(), Some(1));
            assert!(g.congruent_mod_pi_power(&pi, 2));
            let lhs = g.pow(p - 1).add(&RamifiedPadicElement::from_int(p as i64, p, m).unwrap());
            assert!(lhs.valuation().is_none_or(|v| v >= p), "p = {p}");
            let (value, _) = truncated_log(&g.lift_representative(m + 4).unwrap(), series_truncation(p, m)).unwrap();
            assert!(value.reduce_precision(m).valuation().is_none_or(|v| v >= (p - 1) * m as u64 - 1));
        }
    }

    #[test]
    fn log_of_pi_has_high_valuation() {
        // π^p/p = -π, so the first two terms of ℓ(π) cancel
        for p in [3u64, 5, 7] {
            let pi = RamifiedPadicElement::pi(p, 4).unwrap();
            let (value, _) = truncated_log(&pi, 2).unwrap();
            assert!(value.valuation().is_none_or(|v| v >= p * p - 2 * (p - 1)));
        }
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller_lift(2, 5, 2).unwrap(), 7);
        assert_eq!(teichmuller_lift(4, 5, 2).unwrap(), 24);
        assert_eq!(teichmuller_lift(1, 7, 5).unwrap(), 1);
        assert!(matches!(teichmuller_lift(10, 5, 2), Err(Error::DivisibleByPrime { a: 10, p: 5 })));
    }

    proptest! {
        #[test]
        fn teichmuller_laws(a in 1i64..1000, idx in 0usize..4, m in 1u32..6) {
            let p = [3u64, 5, 7, 11][idx];
            prop_assume!(a % p as i64 != 0);
            let w = teichmuller_lift(a, p, m).unwrap();
            let md = p.pow(m);
            prop_assert_eq!(w % p, a as u64 % p);
            prop_assert_eq!(pow_mod(w, p - 1, md), 1 % md);
        }

        #[test]
        fn teichmuller_is_multiplicative(a in 1i64..200, b in 1i64..200) {
            let (p, m) = (7u64, 4u32);
            prop_assume!(a % 7 != 0 && b % 7 != 0);
            let md = p.pow(m);
            let lhs = teichmuller_lift(a * b, p, m).unwrap();
            let rhs = mul_mod(teichmuller_lift(a, p, m).unwrap(), teichmuller_lift(b, p, m).unwrap(), md);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn line_matrix_basis_and_diagonal() {
        let spec = line();
        let pair = SubsetPair::one_based(&[1], &[1]);
        let mat = truncated_matrix(&spec, &pair, 3, 6, 2).unwrap();
        let labels: Vec<String> = mat.basis.iter().map(ToString::to_string).collect();
        assert_eq!(labels, ["((1),(1))", "((2),(2))"]);
        // diagonal: γ^{2k} δ_{2k}
        let ctx = DworkContext::new(&spec, 3, 6, 2).unwrap();
        for (i, x) in mat.basis.iter().enumerate() {
            let k = x.total();
            let expected = ctx.gamma_p1.pow(k).scale(ctx.deltas[(2 * k) as usize]);
            assert_eq!(mat.entries[i][i], expected);
        }
        // off-diagonal from (t'=2) to (t=1): G_{1,1} = δ_1 = 1
        assert_eq!(mat.entries[1][0], ctx.gamma_p1.pow(1));
    }

    #[test]
    fn entry_valuations_respect_column_weight() {
        let spec = example2(1, 1);
        for pair in trace_formula_pairs(3, 1) {
            let mat = truncated_matrix(&spec, &pair, 5, 5, 2).unwrap();
            for row in &mat.entries {
                for (col, e) in mat.basis.iter().zip(row) {
                    if let Some(v) = e.valuation() {
                        assert!(v >= 4 * col.total(), "{pair} column {col}");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_restricted_support_gives_empty_matrix() {
        let spec = example2(1, 1);
        let mat = truncated_matrix(&spec, &SubsetPair::one_based(&[1], &[1]), 3, 4, 2).unwrap();
        assert_eq!(mat.dim(), 0);
    }

    #[test]
    fn precision_guards() {
        let spec = line();
        let pair = SubsetPair::one_based(&[1], &[1]);
        assert!(matches!(truncated_matrix(&spec, &pair, 3, 2, 2), Err(Error::Precision(_))));
        assert!(matches!(trace_formula_count(&spec, 3, 4, 2), Err(Error::Precision(_))));
        assert!(matches!(gamma_approximation(4, 3), Err(Error::NotPrime(4))));
    }

    fn assert_trace_count(spec: &VarietySpec, p: u64) {
        let n = spec.system().n();
        let r = spec.system().r();
        let m = 2 + n as u32 + r as u32 + 2;
        let res = trace_formula_count(spec, p, m, 2).unwrap();
        let count = count_points(spec, &build_field(p, 1).unwrap()).unwrap();
        assert_eq!(res.residue, count % res.window, "p = {p}, count = {count}, window = {}", res.window);
    }

    #[test]
    fn trace_formula_matches_counts() {
        for p in [3u64, 5] {
            assert_trace_count(&line(), p);
            assert_trace_count(&conic(1, 1), p);
            assert_trace_count(&conic(1, 2), p);
            assert_trace_count(&example2(1, 1), p);
            assert_trace_count(&example2(2, 1), p);
        }
    }

    #[test]
    fn trace_formula_with_constant_terms() {
        // x + 1 and x^2 + y - 1: pairs with C = ∅ contribute
        let s1 = SupportSystem::from_vecs(1, &[&[&[1], &[0]]]).unwrap();
        let s2 = SupportSystem::from_vecs(2, &[&[&[2, 0], &[0, 1], &[0, 0]]]).unwrap();
        let v1 = VarietySpec::with_integers(s1, &[&[1, 1]]).unwrap();
        let v2 = VarietySpec::with_integers(s2, &[&[1, 1, -1]]).unwrap();
        for p in [3u64, 5] {
            assert_trace_count(&v1, p);
            assert_trace_count(&v2, p);
        }
    }

    #[test]
    fn corrupted_trace_is_detected() {
        let spec = line();
        let res = trace_formula_count_with(&spec, 3, 7, 2, true);
        let count = count_points(&spec, &build_field(3, 1).unwrap()).unwrap();
        let r = res.unwrap();
        assert_ne!(r.residue, count % r.window);
    }

    #[test]
    fn leading_congruence_examples() {
        let spec = example2(1, 1);
        let check = leading_trace_congruence(&spec, &SubsetPair::one_based(&[1], &[2, 3]), 5).unwrap();
        assert!(check.pass);
        assert_eq!((check.trace_side, check.hasse_side), (1, 1));
        let check = leading_trace_congruence(&line(), &SubsetPair::one_based(&[1], &[1]), 5).unwrap();
        assert!(check.pass);
        for p in [5u64, 7, 11] {
            for (pair, _) in crate::lattice::minimal_data(spec.system()).unwrap().finite_pairs() {
                assert!(leading_trace_congruence(&example2(2, 3), pair, p).unwrap().pass, "{pair} p = {p}");
            }
        }
    }

    #[test]
    fn leading_congruence_negative_control() {
        let spec = example2(1, 1);
        let mut mat = leading_matrix(&spec, &SubsetPair::one_based(&[1], &[2, 3]), 5).unwrap();
        let bump = RamifiedPadicElement::from_int(5, 5, mat.precision).unwrap();
        mat.entries[0][0] = mat.entries[0][0].add(&bump);
        assert!(!check_leading_congruence(&spec, &mat).unwrap().pass);
    }
}
