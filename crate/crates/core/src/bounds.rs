//! Ax–Katz, Moreno–Moreno and Adolphson–Sperber bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lp::{form_range, lp_minimize, LpSolution};
use crate::geometry::polytope::{ceil_to_i64, floor_to_i64, qi, qu};
use crate::geometry::{minimal_dilation, RationalLp, Q};
use crate::lattice::minimal_data;
use crate::support::{format_rational, ExponentVector, SupportSystem};

/// Raw Ax–Katz ceiling; `vacuous` when negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxKatz {
    pub raw: i64,
    pub vacuous: bool,
}

impl AxKatz {
    pub fn value(&self) -> i64 {
        self.raw.max(0)
    }
}

/// `⌈(n - Σ deg) / max deg⌉`.
pub fn ax_katz_bound(n: usize, degrees: &[u64]) -> AxKatz {
    assert!(!degrees.is_empty() && degrees.iter().all(|&d| d >= 1), "degrees must be positive");
    let total: i64 = degrees.iter().map(|&d| d as i64).sum();
    let max = *degrees.iter().max().unwrap() as i64;
    let raw = Integer::div_ceil(&(n as i64 - total), &max);
    AxKatz { raw, vacuous: raw < 0 }
}

/// Sum of base-`p` digits over all entries.
pub fn digit_sum(g: &ExponentVector, p: u64) -> u64 {
    g.entries()
        .iter()
        .map(|&e| {
            let mut e = e as u64;
            let mut s = 0;
            while e > 0 {
                s += e % p;
                e /= p;
            }
            s
        })
        .sum()
}

/// `(1/a)·⌈a·(n - Σ_j σ_p(f_j)) / max_j σ_p(f_j)⌉`.
pub fn moreno_moreno_bound(system: &SupportSystem, p: u64, a: u32) -> Result<Q> {
    if a == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    let sigmas: Vec<i64> = system
        .supports()
        .iter()
        .map(|gs| gs.iter().map(|g| digit_sum(g, p) as i64).max().unwrap_or(0))
        .collect();
    let max = *sigmas.iter().max().unwrap_or(&0);
    if sigmas.iter().any(|&s| s < 1) {
        return Err(Error::InvalidArgument("every polynomial needs a nonconstant monomial".into()));
    }
    let total: i64 = sigmas.iter().sum();
    let a = a as i64;
    let ceil = Integer::div_ceil(&(a * (system.n() as i64 - total)), &max);
    Ok(Q::new(BigInt::from(ceil), BigInt::from(a)))
}

/// The points `(g, e_j)` spanning the Newton polytope together with the origin.
pub fn newton_points(system: &SupportSystem) -> Vec<Vec<Q>> {
    let (n, r) = (system.n(), system.r());
    let mut out = Vec::new();
    for (j, gs) in system.supports().iter().enumerate() {
        for g in gs {
            let mut p: Vec<Q> = g.entries().iter().map(|&e| qu(e as u64)).collect();
            p.extend((0..r).map(|l| if l == j { Q::one() } else { Q::zero() }));
            debug_assert_eq!(p.len(), n + r);
            out.push(p);
        }
    }
    out
}

/// `w(f̄)` with a positive integral point attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightWitness {
    pub w: Q,
    pub y: Vec<u64>,
}

/// Least dilation of the Newton polytope containing a point with all
/// coordinates positive integers.
///
/// Branch and bound over the integer coordinates of `y`, the last `r`
/// coordinates first. A node fixes a prefix of `y`; its LP relaxation
/// `min Σλ` bounds every completion, and the range of the next coordinate is
/// the exact projection of the node's region.
pub fn adolphson_sperber_weight(system: &SupportSystem) -> Result<WeightWitness> {
    let points = newton_points(system);
    let dim = system.n() + system.r();
    let count = points.len();
    let y0: Vec<Q> = (0..dim).map(|c| points.iter().map(|p| p[c].clone()).sum()).collect();
    if y0.iter().any(Zero::is_zero) {
        return Err(Error::UnreachableWeight);
    }
    let start = minimal_dilation(&points, &y0)?.ok_or(Error::UnreachableWeight)?;
    let mut best = WeightWitness { w: start.clone(), y: y0.iter().map(|q| q.to_integer().to_u64().unwrap()).collect() };

    // λ (count), surplus for y_c >= 1 (dim), slack for Σλ <= start (1)
    let width = count + dim + 1;
    let mut order: Vec<usize> = (system.n()..dim).collect();
    order.extend(0..system.n());
    let forms: Vec<Vec<Q>> = order
        .iter()
        .map(|&c| {
            let mut row = vec![Q::zero(); width];
            for (x, p) in points.iter().enumerate() {
                row[x] = p[c].clone();
            }
            row
        })
        .collect();
    let mut lp = RationalLp::new(width);
    for (s, form) in forms.iter().enumerate() {
        let mut row = form.clone();
        row[count + s] = qi(-1);
        lp.add_equality(row, Q::one());
    }
    let mut cap = vec![Q::zero(); width];
    for x in cap.iter_mut().take(count) {
        *x = Q::one();
    }
    cap[width - 1] = Q::one();
    lp.add_equality(cap, start);
    let mut objective = vec![Q::zero(); width];
    for x in objective.iter_mut().take(count) {
        *x = Q::one();
    }

    let mut prefix = Vec::with_capacity(dim);
    weight_search(&lp, &objective, &forms, &order, &points, &mut prefix, &mut best)?;
    Ok(best)
}

fn weight_search(
    lp: &RationalLp,
    objective: &[Q],
    forms: &[Vec<Q>],
    order: &[usize],
    points: &[Vec<Q>],
    prefix: &mut Vec<i64>,
    best: &mut WeightWitness,
) -> Result<()> {
    let depth = prefix.len();
    if depth == forms.len() {
        let mut y = vec![Q::zero(); order.len()];
        for (&c, &val) in order.iter().zip(prefix.iter()) {
            y[c] = qi(val);
        }
        if let Some(c) = minimal_dilation(points, &y)? {
            if c < best.w {
                best.w = c;
                best.y = prefix_to_point(order, prefix);
            }
        }
        return Ok(());
    }
    match lp_minimize(&lp.clone().with_objective(objective.to_vec())) {
        LpSolution::Optimal { value, .. } if value < best.w => {}
        LpSolution::Optimal { .. } | LpSolution::Infeasible { .. } => return Ok(()),
        LpSolution::Unbounded => return Err(Error::Internal("weight relaxation unbounded".into())),
    }
    let Some((Some(lo), Some(hi))) = form_range(lp, &forms[depth]) else { return Ok(()) };
    for value in ceil_to_i64(&lo)..=floor_to_i64(&hi) {
        let mut child = lp.clone();
        child.add_equality(forms[depth].clone(), qi(value));
        prefix.push(value);
        weight_search(&child, objective, forms, order, points, prefix, best)?;
        prefix.pop();
    }
    Ok(())
}

fn prefix_to_point(order: &[usize], prefix: &[i64]) -> Vec<u64> {
    let mut y = vec![0u64; order.len()];
    for (&c, &val) in order.iter().zip(prefix) {
        y[c] = val as u64;
    }
    y
}

/// `μ` computed both ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuReport {
    pub mu: i64,
    pub w: Q,
}

/// `μ` as `w(f̄) - r`, checked against the subset-pair minimum.
pub fn mu(system: &SupportSystem) -> Result<MuReport> {
    let combinatorial = minimal_data(system)?.mu;
    let weight = adolphson_sperber_weight(system)?;
    let polytope = &weight.w - qu(system.r() as u64);
    if !polytope.is_integer() || polytope.to_integer() != BigInt::from(combinatorial) {
        return Err(Error::MuMismatch { combinatorial, polytope: format_rational(&polytope) });
    }
    Ok(MuReport { mu: combinatorial, w: weight.w })
}

/// All bounds for one support system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub r: usize,
    pub degrees: Vec<u64>,
    pub ax_katz: i64,
    pub ax_katz_raw: i64,
    pub ax_katz_vacuous: bool,
    /// Present when a prime was supplied.
    pub prime: Option<u64>,
    pub a: u32,
    pub moreno_moreno: Option<String>,
    pub mu_polytope: i64,
    pub mu_combinatorial: i64,
    pub w_polytope: String,
    pub witness: Vec<u64>,
}

pub fn bound_report(system: &SupportSystem, prime: Option<u64>, a: u32) -> Result<BoundReport> {
    let degrees = system.degrees();
    let ak = ax_katz_bound(system.n(), &degrees);
    let moreno_moreno = match prime {
        Some(p) => Some(format_rational(&moreno_moreno_bound(system, p, a)?)),
        None => None,
    };
    let combinatorial = minimal_data(system)?.mu;
    let weight = adolphson_sperber_weight(system)?;
    let polytope = &weight.w - qu(system.r() as u64);
    if !polytope.is_integer() || polytope.to_integer() != BigInt::from(combinatorial) {
        return Err(Error::MuMismatch { combinatorial, polytope: format_rational(&polytope) });
    }
    Ok(BoundReport {
        n: system.n(),
        r: system.r(),
        degrees,
        ax_katz: ak.value(),
        ax_katz_raw: ak.raw,
        ax_katz_vacuous: ak.vacuous,
        prime,
        a,
        moreno_moreno,
        mu_polytope: polytope.to_integer().to_i64().unwrap(),
        mu_combinatorial: combinatorial,
        w_polytope: format_rational(&weight.w),
        witness: weight.y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example1() -> SupportSystem {
        let gens: Vec<Vec<u32>> = (0..4)
            .flat_map(|i| (i..4).map(move |k| (i, k)))
            .map(|(i, k)| {
                let mut g = vec![0u32; 4];
                g[i] += 1;
                g[k] += 1;
                g
            })
            .collect();
        let refs: Vec<&[u32]> = gens.iter().map(|g| g.as_slice()).collect();
        SupportSystem::from_vecs(4, &[&refs]).unwrap()
    }

    fn example2() -> SupportSystem {
        SupportSystem::from_vecs(3, &[&[&[3, 3, 0], &[0, 2, 2]]]).unwrap()
    }

    #[test]
    fn ax_katz_examples() {
        assert_eq!(ax_katz_bound(3, &[6]), AxKatz { raw: 0, vacuous: false });
        assert_eq!(ax_katz_bound(4, &[2]).raw, 1);
        assert_eq!(ax_katz_bound(1, &[1]).raw, 0);
        let neg = ax_katz_bound(1, &[3, 3]);
        assert_eq!(neg.raw, -1);
        assert!(neg.vacuous);
        assert_eq!(neg.value(), 0);
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(digit_sum(&ExponentVector::new(vec![3, 3]), 2), 4);
        assert_eq!(digit_sum(&ExponentVector::new(vec![5]), 3), 3);
        assert_eq!(digit_sum(&ExponentVector::new(vec![1, 2, 0]), 5), 3);
    }

    #[test]
    fn moreno_moreno_examples() {
        assert_eq!(moreno_moreno_bound(&example2(), 2, 1).unwrap(), qi(0));
        assert_eq!(moreno_moreno_bound(&example1(), 5, 1).unwrap(), qi(1));
        let lin = SupportSystem::from_vecs(1, &[&[&[1]]]).unwrap();
        assert_eq!(moreno_moreno_bound(&lin, 7, 1).unwrap(), qi(0));
        // a = 2 keeps the fractional part
        let s = SupportSystem::from_vecs(3, &[&[&[2, 0, 0]], &[&[0, 0, 1]]]).unwrap();
        assert_eq!(moreno_moreno_bound(&s, 5, 2).unwrap(), Q::new(BigInt::from(0), BigInt::from(1)));
    }

    #[test]
    fn weight_examples() {
        let w = adolphson_sperber_weight(&example2()).unwrap();
        assert_eq!(w.w, qi(2));
        let lin = SupportSystem::from_vecs(1, &[&[&[1]]]).unwrap();
        assert_eq!(adolphson_sperber_weight(&lin).unwrap().w, qi(1));
        let two_one = SupportSystem::from_vecs(2, &[&[&[3, 1], &[1, 3]]]).unwrap();
        let w = adolphson_sperber_weight(&two_one).unwrap();
        assert_eq!(w.w, qi(1));
    }

    #[test]
    fn unreachable_weight() {
        let s = SupportSystem::from_vecs(2, &[&[&[2, 0]]]).unwrap();
        assert!(matches!(adolphson_sperber_weight(&s), Err(Error::UnreachableWeight)));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&example2()).unwrap().mu, 1);
        assert_eq!(mu(&example1()).unwrap().mu, 1);
        let two_one = SupportSystem::from_vecs(2, &[&[&[3, 1], &[1, 3]]]).unwrap();
        assert_eq!(mu(&two_one).unwrap().mu, 0);
    }

    #[test]
    fn report_example_two() {
        let rep = bound_report(&example2(), Some(2), 1).unwrap();
        assert_eq!(rep.ax_katz, 0);
        assert_eq!(rep.mu_polytope, 1);
        assert_eq!(rep.mu_combinatorial, 1);
        assert_eq!(rep.w_polytope, "2");
        assert_eq!(rep.moreno_moreno.as_deref(), Some("0"));
    }

    proptest! {
        #[test]
        fn ax_katz_monotone(n in 1usize..8, degs in prop::collection::vec(1u64..9, 1..4), idx in 0usize..4, bump in 1u64..5) {
            let idx = idx % degs.len();
            let mut bigger = degs.clone();
            bigger[idx] += bump;
            prop_assert!(ax_katz_bound(n, &bigger).value() <= ax_katz_bound(n, &degs).value());
        }

        #[test]
        fn moreno_moreno_reduces_to_ax_katz(
            n in 1usize..4,
            gens in prop::collection::btree_set(prop::collection::vec(0u32..5, 3), 1..4),
        ) {
            let gens: Vec<Vec<u32>> = gens.into_iter().map(|mut g| { g.truncate(n); g }).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            prop_assume!(gens.iter().any(|g| g.iter().any(|&e| e > 0)));
            let refs: Vec<&[u32]> = gens.iter().map(|g| g.as_slice()).collect();
            let s = SupportSystem::from_vecs(n, &[&refs]).unwrap();
            let mm = moreno_moreno_bound(&s, 5, 1).unwrap();
            prop_assert_eq!(mm, qi(ax_katz_bound(n, &s.degrees()).raw));
        }
    }
}
