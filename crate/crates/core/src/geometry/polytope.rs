//! Fiber polytopes, polytope dilations and exact lattice-point search.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lp::{form_range, lp_feasible, lp_minimize, Feasibility, LpSolution, RationalLp, Q};
use crate::error::{Error, Result};
use crate::support::{ExponentVector, SubsetPair, SupportSystem};

pub(crate) fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub(crate) fn qu(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// One variable `u_g` of a fiber: monomial `k` of polynomial `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub j: usize,
    pub k: usize,
    /// Global coefficient-variable index.
    pub var: usize,
    pub g: ExponentVector,
}

/// `{ u >= 0 : Σ u_g g = v, Σ_{g ∈ G_{j,C}} u_g = t_j for j ∈ B }`.
///
/// Variables are the restricted supports `G_{j,C}` for `j ∈ B`, block by
/// block in support order. `t` is indexed like `pair.b`; `v` has length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPolytope {
    pair: SubsetPair,
    n: usize,
    t: Vec<u64>,
    v: Vec<u64>,
    generators: Vec<Generator>,
    /// Generator index range of each block, parallel to `pair.b`.
    blocks: Vec<(usize, usize)>,
}

impl FiberPolytope {
    pub fn new(system: &SupportSystem, pair: &SubsetPair, t: &[u64], v: &[u64]) -> Self {
        assert_eq!(t.len(), pair.b.len(), "t must be indexed by B");
        assert_eq!(v.len(), system.n(), "v must have length n");
        let mut generators = Vec::new();
        let mut blocks = Vec::with_capacity(pair.b.len());
        for &j in &pair.b {
            let start = generators.len();
            for (k, g) in system.support(j).iter().enumerate() {
                if g.supported_in(&pair.c) {
                    generators.push(Generator {
                        j,
                        k,
                        var: system.variable_index(j, k),
                        g: g.clone(),
                    });
                }
            }
            blocks.push((start, generators.len()));
        }
        FiberPolytope { pair: pair.clone(), n: system.n(), t: t.to_vec(), v: v.to_vec(), generators, blocks }
    }

    /// The fiber over `(level·t, level·v)`.
    pub fn at_level(system: &SupportSystem, pair: &SubsetPair, t: &[u64], v: &[u64], level: u64) -> Self {
        let t: Vec<u64> = t.iter().map(|x| x * level).collect();
        let v: Vec<u64> = v.iter().map(|x| x * level).collect();
        FiberPolytope::new(system, pair, &t, &v)
    }

    pub fn pair(&self) -> &SubsetPair {
        &self.pair
    }

    pub fn t(&self) -> &[u64] {
        &self.t
    }

    pub fn v(&self) -> &[u64] {
        &self.v
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Equality system: one row per block sum, then one row per coordinate.
    pub fn lp(&self) -> RationalLp {
        let k = self.generators.len();
        let mut lp = RationalLp::new(k);
        for (b, &(lo, hi)) in self.blocks.iter().enumerate() {
            let row = (0..k).map(|x| if (lo..hi).contains(&x) { Q::one() } else { Q::zero() }).collect();
            lp.add_equality(row, qu(self.t[b]));
        }
        for i in 0..self.n {
            let row = self.generators.iter().map(|gen| qu(gen.g.entries()[i] as u64)).collect();
            lp.add_equality(row, qu(self.v[i]));
        }
        lp
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        self.lp().is_satisfied_by(u)
    }
}

/// Least `c >= 0` with `y ∈ c·conv({0} ∪ vertices)`, or `None` when `y` is
/// outside the cone spanned by the vertices.
pub fn minimal_dilation(vertices: &[Vec<Q>], y: &[Q]) -> Result<Option<Q>> {
    if vertices.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let dim = y.len();
    if vertices.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument("vertex dimension differs from the point".into()));
    }
    let mut lp = RationalLp::new(vertices.len());
    for coord in 0..dim {
        lp.add_equality(vertices.iter().map(|p| p[coord].clone()).collect(), y[coord].clone());
    }
    let lp = lp.with_objective(vec![Q::one(); vertices.len()]);
    match lp_minimize(&lp) {
        LpSolution::Optimal { value, .. } => Ok(Some(value)),
        LpSolution::Infeasible { .. } => Ok(None),
        LpSolution::Unbounded => Err(Error::Internal("dilation LP unbounded".into())),
    }
}

/// All integral points of a fiber, in lexicographic order.
pub fn enumerate_integral_points(fiber: &FiberPolytope) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for_each_integral_point(fiber, |u| {
        out.push(u.to_vec());
        true
    });
    out
}

/// Number of integral points of a fiber.
pub fn count_integral_points(fiber: &FiberPolytope) -> u64 {
    let mut count = 0u64;
    for_each_integral_point(fiber, |_| {
        count += 1;
        true
    });
    count
}

/// Visits the integral points of a fiber in lexicographic order until the
/// callback returns false.
pub fn for_each_integral_point(fiber: &FiberPolytope, mut visit: impl FnMut(&[u64]) -> bool) {
    // empty blocks force t_j = 0
    for (b, &(lo, hi)) in fiber.blocks.iter().enumerate() {
        if lo == hi && fiber.t[b] > 0 {
            return;
        }
    }
    let mut search = IntegralSearch::new(fiber);
    let mut current = vec![0u64; fiber.generators.len()];
    search.descend(0, &mut current, &mut visit);
}

struct IntegralSearch<'a> {
    fiber: &'a FiberPolytope,
    block_of: Vec<usize>,
    block_rem: Vec<u64>,
    v_rem: Vec<i64>,
    /// `suffix_max[idx][i]`: max of `g_i` over generators `idx..` in the
    /// same block as `idx`.
    suffix_max: Vec<Vec<u32>>,
    suffix_min: Vec<Vec<u32>>,
}

impl<'a> IntegralSearch<'a> {
    fn new(fiber: &'a FiberPolytope) -> Self {
        let k = fiber.generators.len();
        let n = fiber.n;
        let mut block_of = vec![0; k];
        let mut suffix_max = vec![vec![0u32; n]; k];
        let mut suffix_min = vec![vec![u32::MAX; n]; k];
        for (b, &(lo, hi)) in fiber.blocks.iter().enumerate() {
            for idx in (lo..hi).rev() {
                block_of[idx] = b;
                for i in 0..n {
                    let e = fiber.generators[idx].g.entries()[i];
                    let (mx, mn) = if idx + 1 < hi {
                        (suffix_max[idx + 1][i].max(e), suffix_min[idx + 1][i].min(e))
                    } else {
                        (e, e)
                    };
                    suffix_max[idx][i] = mx;
                    suffix_min[idx][i] = mn;
                }
            }
        }
        IntegralSearch {
            fiber,
            block_of,
            block_rem: fiber.t.clone(),
            v_rem: fiber.v.iter().map(|&x| x as i64).collect(),
            suffix_max,
            suffix_min,
        }
    }

    /// Remaining target must lie between what the unassigned generators can
    /// minimally and maximally contribute.
    fn reachable(&self, next: usize) -> bool {
        let n = self.fiber.n;
        for i in 0..n {
            let mut lo: i64 = 0;
            let mut hi: i64 = 0;
            for (b, &(start, end)) in self.fiber.blocks.iter().enumerate() {
                let from = start.max(next);
                let rem = self.block_rem[b] as i64;
                if rem == 0 {
                    continue;
                }
                if from >= end {
                    // budget left but no generator remains
                    return false;
                }
                lo += rem * self.suffix_min[from][i] as i64;
                hi += rem * self.suffix_max[from][i] as i64;
            }
            if self.v_rem[i] < lo || self.v_rem[i] > hi {
                return false;
            }
        }
        true
    }

    fn descend(&mut self, idx: usize, current: &mut [u64], visit: &mut impl FnMut(&[u64]) -> bool) -> bool {
        let k = self.fiber.generators.len();
        if idx == k {
            if self.v_rem.iter().all(|&x| x == 0) && self.block_rem.iter().all(|&x| x == 0) {
                return visit(current);
            }
            return true;
        }
        let b = self.block_of[idx];
        let (_, end) = self.fiber.blocks[b];
        let g = self.fiber.generators[idx].g.entries().to_vec();
        let mut cap = self.block_rem[b] as i64;
        for (i, &e) in g.iter().enumerate() {
            if e > 0 {
                cap = cap.min(self.v_rem[i] / e as i64);
            }
        }
        let values: Vec<i64> = if idx + 1 == end {
            let forced = self.block_rem[b] as i64;
            if forced > cap {
                return true;
            }
            vec![forced]
        } else {
            (0..=cap).collect()
        };
        for u in values {
            self.block_rem[b] -= u as u64;
            for (i, &e) in g.iter().enumerate() {
                self.v_rem[i] -= u * e as i64;
            }
            current[idx] = u as u64;
            let keep_going = if self.reachable(idx + 1) {
                self.descend(idx + 1, current, visit)
            } else {
                true
            };
            self.block_rem[b] += u as u64;
            for (i, &e) in g.iter().enumerate() {
                self.v_rem[i] += u * e as i64;
            }
            current[idx] = 0;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Vertices of a fiber with its affine dimension (`-1` when empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub vertices: Vec<Vec<Q>>,
    pub dimension: i64,
}

/// Exhaustive basic-solution enumeration. Intended for fibers with at most a
/// dozen variables.
pub fn enumerate_vertices(fiber: &FiberPolytope) -> VertexSet {
    let lp = fiber.lp();
    let rows: Vec<Vec<Q>> = lp.rows().iter().map(|(r, _)| r.clone()).collect();
    let rhs: Vec<Q> = lp.rows().iter().map(|(_, b)| b.clone()).collect();
    let k = fiber.dim();
    if k == 0 {
        let empty_ok = rhs.iter().all(Zero::is_zero);
        return if empty_ok {
            VertexSet { vertices: vec![vec![]], dimension: 0 }
        } else {
            VertexSet { vertices: vec![], dimension: -1 }
        };
    }

    let independent = independent_rows(&rows);
    let rank = independent.len();
    let a: Vec<Vec<Q>> = independent.iter().map(|&i| rows[i].clone()).collect();
    let b: Vec<Q> = independent.iter().map(|&i| rhs[i].clone()).collect();

    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    for cols in combinations(k, rank) {
        let square: Vec<Vec<Q>> = a.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        let Some(sol) = solve_square(square, b.clone()) else { continue };
        if sol.iter().any(Signed::is_negative) {
            continue;
        }
        let mut x = vec![Q::zero(); k];
        for (&c, val) in cols.iter().zip(sol) {
            x[c] = val;
        }
        if lp.is_satisfied_by(&x) {
            found.insert(x);
        }
    }
    let vertices: Vec<Vec<Q>> = found.into_iter().collect();
    let dimension = affine_dimension(&vertices);
    VertexSet { vertices, dimension }
}

/// Affine dimension of the hull of a point set (`-1` when empty).
pub fn affine_dimension(points: &[Vec<Q>]) -> i64 {
    let Some(first) = points.first() else { return -1 };
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect())
        .collect();
    independent_rows(&diffs).len() as i64
}

/// Indices of a maximal linearly independent subset of `rows`, found by
/// incremental Gaussian elimination.
pub(crate) fn independent_rows(rows: &[Vec<Q>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Q>)> = Vec::new(); // (pivot column, reduced row)
    let mut picked = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, br) in &basis {
            if !r[*pc].is_zero() {
                let f = r[*pc].clone() / &br[*pc];
                for (x, y) in r.iter_mut().zip(br) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pc, r));
            picked.push(idx);
        }
    }
    picked
}

/// Solves a square system exactly; `None` when singular.
pub(crate) fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let v = &a[r][c] - &f * &a[col][c];
                    a[r][c] = v;
                }
                let v = &b[r] - &f * &b[col];
                b[r] = v;
            }
        }
    }
    Some(b)
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        out.push(combo.clone());
        let mut i = k;
        while i > 0 && combo[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        combo[i - 1] += 1;
        for l in i..k {
            combo[l] = combo[l - 1] + 1;
        }
    }
    out
}

/// Enumerates the integer vectors `(f_0·x, …, f_{m-1}·x)` attained by
/// feasible points `x` of `lp`, depth-first with coordinates fixed in order.
/// Each coordinate's range is the exact LP projection given the fixed prefix;
/// by convexity every integer inside it extends to a feasible point at that
/// depth. The region must be bounded along every form.
///
/// The callback returns false to stop; the function returns false if stopped.
pub fn for_each_projected_lattice_point(
    lp: &RationalLp,
    forms: &[Vec<Q>],
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    let mut prefix = Vec::with_capacity(forms.len());
    projected_descend(lp, forms, &mut prefix, visit)
}

fn projected_descend(
    lp: &RationalLp,
    forms: &[Vec<Q>],
    prefix: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    let depth = prefix.len();
    if depth == forms.len() {
        return visit(prefix);
    }
    let Some((lo, hi)) = form_range(lp, &forms[depth]) else { return true };
    let (Some(lo), Some(hi)) = (lo, hi) else {
        panic!("projected lattice search requires a bounded region");
    };
    let lo = ceil_to_i64(&lo);
    let hi = floor_to_i64(&hi);
    for value in lo..=hi {
        let mut child = lp.clone();
        child.add_equality(forms[depth].clone(), qi(value));
        prefix.push(value);
        let go_on = projected_descend(&child, forms, prefix, visit);
        prefix.pop();
        if !go_on {
            return false;
        }
    }
    true
}

pub(crate) fn ceil_to_i64(q: &Q) -> i64 {
    q.ceil().to_integer().to_i64().expect("bound fits in i64")
}

pub(crate) fn floor_to_i64(q: &Q) -> i64 {
    q.floor().to_integer().to_i64().expect("bound fits in i64")
}

/// Lowest-terms common denominator of a rational vector.
pub fn common_denominator(x: &[Q]) -> BigInt {
    x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Whether some feasible point exists, with its exact witness.
pub fn fiber_witness(fiber: &FiberPolytope) -> Option<Vec<Q>> {
    match lp_feasible(&fiber.lp()) {
        Feasibility::Feasible(x) => Some(x),
        Feasibility::Infeasible(_) => None,
    }
}
