//! Integral weights `w_Z(B,C)`, the lattice sets `Z_{B,C}` and their minima.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::polytope::{qi, qu};
use crate::geometry::{fiber_witness, for_each_projected_lattice_point, FiberPolytope, RationalLp, Q};
use crate::support::{enumerate_subset_pairs, SubsetPair, SupportSystem};
use num_traits::{One, Zero};

/// A point `(t, v)` of `Z_{B,C}`. `t` is indexed like `pair.b`, `v` has length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePair {
    pub pair: SubsetPair,
    pub t: Vec<u64>,
    pub v: Vec<u64>,
}

impl LatticePair {
    pub fn total(&self) -> u64 {
        self.t.iter().sum()
    }

    pub fn fiber(&self, system: &SupportSystem) -> FiberPolytope {
        FiberPolytope::new(system, &self.pair, &self.t, &self.v)
    }

    pub fn fiber_at_level(&self, system: &SupportSystem, level: u64) -> FiberPolytope {
        FiberPolytope::at_level(system, &self.pair, &self.t, &self.v, level)
    }

    /// Positivity pattern and rational fiber membership.
    pub fn is_member(&self, system: &SupportSystem) -> bool {
        let c = &self.pair.c;
        let pattern_ok = self.t.len() == self.pair.b.len()
            && self.t.iter().all(|&x| x > 0)
            && self.v.len() == system.n()
            && self.v.iter().enumerate().all(|(i, &x)| (x > 0) == c.contains(&i));
        pattern_ok && fiber_witness(&self.fiber(system)).is_some()
    }
}

impl fmt::Display for LatticePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "(({}),({}))", join(&self.t), join(&self.v))
    }
}

/// `w_Z(B,C)`: a positive integer, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightValue {
    Finite(u64),
    Infinite,
}

impl WeightValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            WeightValue::Finite(w) => Some(w),
            WeightValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, WeightValue::Finite(_))
    }
}

impl fmt::Display for WeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightValue::Finite(w) => write!(f, "{w}"),
            WeightValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for WeightValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            WeightValue::Finite(w) => s.serialize_u64(*w),
            WeightValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for WeightValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(w) => Ok(WeightValue::Finite(w)),
            Raw::Text(s) if s == "inf" => Ok(WeightValue::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("bad weight {s:?}"))),
        }
    }
}

/// Search region for `Z_{B,C}` at a fixed total `|t| = level`.
///
/// Variables: `u_g` for the restricted generators, then one surplus variable
/// per `t_j >= 1` and per `v_i >= 1`. Forms: `t_j` for `j ∈ B`, then `v_i`
/// for `i ∈ C`.
struct LevelRegion {
    lp: RationalLp,
    forms: Vec<Vec<Q>>,
}

impl LevelRegion {
    /// `None` when some `G_{j,C}` is empty.
    fn new(system: &SupportSystem, pair: &SubsetPair, level: u64) -> Option<Self> {
        let fiber = FiberPolytope::new(system, pair, &vec![0; pair.b.len()], &vec![0; system.n()]);
        let gens = fiber.generators();
        for &j in &pair.b {
            if !gens.iter().any(|g| g.j == j) {
                return None;
            }
        }
        let k = gens.len();
        let surplus = pair.b.len() + pair.c.len();
        let width = k + surplus;
        let mut forms = Vec::with_capacity(surplus);
        for &j in &pair.b {
            let mut row = vec![Q::zero(); width];
            for (x, g) in gens.iter().enumerate() {
                if g.j == j {
                    row[x] = Q::one();
                }
            }
            forms.push(row);
        }
        for &i in &pair.c {
            let mut row = vec![Q::zero(); width];
            for (x, g) in gens.iter().enumerate() {
                row[x] = qu(g.g.entries()[i] as u64);
            }
            forms.push(row);
        }
        let mut lp = RationalLp::new(width);
        for (s, form) in forms.iter().enumerate() {
            let mut row = form.clone();
            row[k + s] = qi(-1);
            lp.add_equality(row, Q::one());
        }
        let mut total = vec![Q::zero(); width];
        for x in total.iter_mut().take(k) {
            *x = Q::one();
        }
        lp.add_equality(total, qu(level));
        Some(LevelRegion { lp, forms })
    }

    /// Visits points `(t, v)` in lexicographic order until `visit` returns false.
    fn for_each(&self, system: &SupportSystem, pair: &SubsetPair, visit: &mut dyn FnMut(LatticePair) -> bool) {
        let nb = pair.b.len();
        for_each_projected_lattice_point(&self.lp, &self.forms, &mut |point| {
            let t = point[..nb].iter().map(|&x| x as u64).collect();
            let mut v = vec![0u64; system.n()];
            for (&i, &x) in pair.c.iter().zip(&point[nb..]) {
                v[i] = x as u64;
            }
            visit(LatticePair { pair: pair.clone(), t, v })
        });
    }
}

/// Whether some `G_{j,C}` with `j ∈ B` is empty, or some `i ∈ C` is not
/// covered by any restricted generator. Either makes `w_Z` infinite.
fn obviously_infinite(system: &SupportSystem, pair: &SubsetPair) -> bool {
    let mut covered = vec![false; system.n()];
    for &j in &pair.b {
        let mut any = false;
        for g in system.support(j) {
            if g.supported_in(&pair.c) {
                any = true;
                for (i, &e) in g.entries().iter().enumerate() {
                    if e > 0 {
                        covered[i] = true;
                    }
                }
            }
        }
        if !any {
            return true;
        }
    }
    pair.c.iter().any(|&i| !covered[i])
}

/// Points of `Z_{B,C}` with `|t| = level`.
pub fn lattice_points_at_level(system: &SupportSystem, pair: &SubsetPair, level: u64) -> Vec<LatticePair> {
    let mut out = Vec::new();
    if level < pair.b.len() as u64 || obviously_infinite(system, pair) {
        return out;
    }
    if let Some(region) = LevelRegion::new(system, pair, level) {
        region.for_each(system, pair, &mut |lp| {
            out.push(lp);
            true
        });
    }
    out
}

fn has_point_at_level(system: &SupportSystem, pair: &SubsetPair, level: u64) -> bool {
    let Some(region) = LevelRegion::new(system, pair, level) else { return false };
    let mut found = false;
    region.for_each(system, pair, &mut |_| {
        found = true;
        false
    });
    found
}

/// `w_Z(B,C)`, the least `|t|` over `Z_{B,C}`.
///
/// When finite it lies in `[|B|, |B|+|C|]`: a single generator per block plus
/// one covering generator per coordinate of `C` gives an integral point of
/// total `|B|+|C|`.
pub fn weight_wz(system: &SupportSystem, pair: &SubsetPair) -> WeightValue {
    if obviously_infinite(system, pair) {
        return WeightValue::Infinite;
    }
    let lo = pair.b.len() as u64;
    let hi = (pair.b.len() + pair.c.len()) as u64;
    for level in lo..=hi {
        if has_point_at_level(system, pair, level) {
            return WeightValue::Finite(level);
        }
    }
    WeightValue::Infinite
}

/// `Z^min_{B,C}` in lexicographic `(t, v)` order.
pub fn zmin_for_pair(system: &SupportSystem, pair: &SubsetPair) -> Result<Vec<LatticePair>> {
    match weight_wz(system, pair) {
        WeightValue::Finite(w) => Ok(lattice_points_at_level(system, pair, w)),
        WeightValue::Infinite => Err(Error::InfiniteWeight(pair.clone())),
    }
}

/// Points of `Z_{B,C}` with `|t| <= bound`, ordered by `|t|` then lexicographically.
pub fn lattice_window(system: &SupportSystem, pair: &SubsetPair, bound: u64) -> Vec<LatticePair> {
    let lo = pair.b.len() as u64;
    (lo..=bound).flat_map(|level| lattice_points_at_level(system, pair, level)).collect()
}

/// `w_Z` of one subset pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWeight {
    pub pair: SubsetPair,
    pub weight: WeightValue,
}

/// `μ`, the minimizing pairs `K` and `Z^min` over `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalData {
    pub mu: i64,
    /// Every subset pair with its weight, in enumeration order.
    pub weights: Vec<PairWeight>,
    /// Pairs attaining `μ` with their weights.
    pub k: Vec<PairWeight>,
    /// `Z^min_{B,C}` for each pair of `k`, in the same order.
    pub zmin: Vec<Vec<LatticePair>>,
}

impl MinimalData {
    pub fn zmin_points(&self) -> impl Iterator<Item = &LatticePair> {
        self.zmin.iter().flatten()
    }

    /// `(pair, w_Z, Z^min)` for every pair of finite weight.
    pub fn finite_pairs(&self) -> impl Iterator<Item = (&SubsetPair, u64)> {
        self.weights.iter().filter_map(|pw| pw.weight.finite().map(|w| (&pw.pair, w)))
    }
}

/// `n - |B| - |C| + w_Z(B,C)`.
pub fn pair_value(n: usize, pair: &SubsetPair, w: u64) -> i64 {
    n as i64 - pair.size() as i64 + w as i64
}

/// Minimizes `n - |B| - |C| + w_Z(B,C)` over all subset pairs.
pub fn minimal_data(system: &SupportSystem) -> Result<MinimalData> {
    let n = system.n();
    let pairs = enumerate_subset_pairs(n, system.r());
    let weights: Vec<PairWeight> = pairs
        .into_par_iter()
        .map(|pair| {
            let weight = weight_wz(system, &pair);
            PairWeight { pair, weight }
        })
        .collect();
    let mu = weights
        .iter()
        .filter_map(|pw| pw.weight.finite().map(|w| pair_value(n, &pw.pair, w)))
        .min()
        .ok_or(Error::UnreachableWeight)?;
    let k: Vec<PairWeight> = weights
        .iter()
        .filter(|pw| pw.weight.finite().is_some_and(|w| pair_value(n, &pw.pair, w) == mu))
        .cloned()
        .collect();
    let zmin = k
        .par_iter()
        .map(|pw| lattice_points_at_level(system, &pw.pair, pw.weight.finite().unwrap_or(0)))
        .collect();
    Ok(MinimalData { mu, weights, k, zmin })
}

/// Outcome of a ψ-closure scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureVerdict {
    pub pass: bool,
    /// Number of window points divisible by `p`.
    pub checked: usize,
    pub counterexample: Option<LatticePair>,
}

/// Checks that `(t/p, v/p)` lies in the set whenever `(t, v)` does and
/// `p` divides every entry. Membership is decided by `contains`.
pub fn check_psi_closure(
    points: &[LatticePair],
    p: u64,
    contains: impl Fn(&LatticePair) -> bool,
) -> ClosureVerdict {
    let mut checked = 0;
    for point in points {
        if point.t.iter().chain(&point.v).all(|x| x % p == 0) {
            checked += 1;
            let image = LatticePair {
                pair: point.pair.clone(),
                t: point.t.iter().map(|x| x / p).collect(),
                v: point.v.iter().map(|x| x / p).collect(),
            };
            if !contains(&image) {
                return ClosureVerdict { pass: false, checked, counterexample: Some(point.clone()) };
            }
        }
    }
    ClosureVerdict { pass: true, checked, counterexample: None }
}

/// ψ-closure of `Z_{B,C}` over the window `|t| <= bound`.
pub fn psi_closure_check(system: &SupportSystem, pair: &SubsetPair, p: u64, bound: u64) -> ClosureVerdict {
    let window = lattice_window(system, pair, bound);
    check_psi_closure(&window, p, |lp| lp.is_member(system))
}
