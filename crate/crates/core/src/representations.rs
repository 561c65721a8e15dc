//! Rational representations, the denominator set and the conditional number.

use std::collections::BTreeSet;

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, lcm_all};
use crate::error::{Error, Result};
use crate::geometry::polytope::common_denominator;
use crate::geometry::{count_integral_points, enumerate_vertices, Q};
use crate::lattice::{lattice_points_at_level, minimal_data, LatticePair, MinimalData};
use crate::support::SupportSystem;

/// `v = (1/d)·Σ r_g·g` with `gcd(d, r) = 1`. `r` follows the fiber's
/// generator order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalRepresentation {
    pub d: u64,
    pub r: Vec<u64>,
}

impl RationalRepresentation {
    fn from_vertex(u: &[Q]) -> Self {
        let d = common_denominator(u);
        let r = u.iter().map(|x| (x * Q::from_integer(d.clone())).to_integer().to_u64().unwrap()).collect();
        RationalRepresentation { d: d.to_u64().expect("denominator fits in u64"), r }
    }

    pub fn as_point(&self) -> Vec<Q> {
        let d = Q::from_integer(self.d.into());
        self.r.iter().map(|&x| Q::from_integer(x.into()) / &d).collect()
    }
}

/// Vertex-derived representations of one lattice pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationSet {
    pub point: LatticePair,
    pub representations: Vec<RationalRepresentation>,
    pub fiber_dimension: i64,
}

impl RepresentationSet {
    pub fn positive_dimensional(&self) -> bool {
        self.fiber_dimension > 0
    }
}

pub fn rational_representations(system: &SupportSystem, point: &LatticePair) -> Result<RepresentationSet> {
    let vs = enumerate_vertices(&point.fiber(system));
    if vs.vertices.is_empty() {
        return Err(Error::Internal(format!("empty fiber over {}", point)));
    }
    let representations = vs.vertices.iter().map(|u| RationalRepresentation::from_vertex(u)).collect();
    Ok(RepresentationSet { point: point.clone(), representations, fiber_dimension: vs.dimension })
}

fn dimension_warning(set: &RepresentationSet) -> String {
    format!(
        "fiber over {} at {} has dimension {}",
        set.point, set.point.pair, set.fiber_dimension
    )
}

/// The denominator set with positive-dimension warnings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorSet {
    pub denominators: BTreeSet<u64>,
    pub warnings: Vec<String>,
}

fn representation_sets(system: &SupportSystem, points: &[LatticePair]) -> Result<Vec<RepresentationSet>> {
    points.par_iter().map(|lp| rational_representations(system, lp)).collect()
}

/// Denominators over all of `Z^min`.
pub fn denominator_set(system: &SupportSystem) -> Result<DenominatorSet> {
    let md = minimal_data(system)?;
    denominator_set_from(system, &md)
}

pub fn denominator_set_from(system: &SupportSystem, md: &MinimalData) -> Result<DenominatorSet> {
    let points: Vec<LatticePair> = md.zmin_points().cloned().collect();
    let sets = representation_sets(system, &points)?;
    let mut denominators = BTreeSet::new();
    let mut warnings = Vec::new();
    for set in &sets {
        denominators.extend(set.representations.iter().map(|r| r.d));
        if set.positive_dimensional() {
            warnings.push(dimension_warning(set));
        }
    }
    Ok(DenominatorSet { denominators, warnings })
}

/// `m_{(t,v)}` for one point of `Z^min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub point: LatticePair,
    pub weight: u64,
    pub m: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalReport {
    pub mu: i64,
    pub n: usize,
    pub denominators: BTreeSet<u64>,
    /// `None` unless the denominator set is `{1}` and every fiber is a point.
    pub c_value: Option<i64>,
    pub multiplicities: Vec<Multiplicity>,
    pub sparsity: bool,
    pub fiber_dimension_warnings: Vec<String>,
}

impl ConditionalReport {
    /// Predicted `H_p(a) mod p` for large `p`, as a signed integer:
    /// `(-1)^{n-μ}·c`.
    pub fn predicted_hasse_value(&self) -> Option<i64> {
        let sign = if (self.n as i64 - self.mu) % 2 == 0 { 1 } else { -1 };
        self.c_value.map(|c| sign * c)
    }
}

pub fn conditional_number(system: &SupportSystem) -> Result<ConditionalReport> {
    let md = minimal_data(system)?;
    conditional_number_from(system, &md)
}

pub fn conditional_number_from(system: &SupportSystem, md: &MinimalData) -> Result<ConditionalReport> {
    let dens = denominator_set_from(system, md)?;
    let sparsity = sparsity_criterion_from(system, md)?;
    let mut multiplicities = Vec::new();
    let mut c = 0i64;
    for (pw, points) in md.k.iter().zip(&md.zmin) {
        let w = pw.weight.finite().expect("pairs of K have finite weight");
        let sign = if w % 2 == 0 { 1 } else { -1 };
        for point in points {
            let m = count_integral_points(&point.fiber(system));
            c += sign * m as i64;
            multiplicities.push(Multiplicity { point: point.clone(), weight: w, m });
        }
    }
    let defined = dens.denominators.iter().eq([1u64].iter()) && dens.warnings.is_empty();
    Ok(ConditionalReport {
        mu: md.mu,
        n: system.n(),
        denominators: dens.denominators,
        c_value: defined.then_some(c),
        multiplicities,
        sparsity,
        fiber_dimension_warnings: dens.warnings,
    })
}

/// Every fiber over `Z^min_{B,C}`, for every pair of finite weight, is a single
/// integral point.
pub fn check_sparsity_criterion(system: &SupportSystem) -> Result<bool> {
    let md = minimal_data(system)?;
    sparsity_criterion_from(system, &md)
}

pub fn sparsity_criterion_from(system: &SupportSystem, md: &MinimalData) -> Result<bool> {
    let points: Vec<LatticePair> = md
        .finite_pairs()
        .flat_map(|(pair, w)| lattice_points_at_level(system, pair, w))
        .collect();
    let sets = representation_sets(system, &points)?;
    Ok(sets.iter().all(|s| s.fiber_dimension == 0 && s.representations.iter().all(|r| r.d == 1)))
}

/// Default `θ`: twice `r` times the largest exponent.
pub fn default_theta(system: &SupportSystem) -> u64 {
    2 * system.r() as u64 * system.max_coordinate() as u64
}

/// Primes `p <= limit` with `p > theta` and `p ≡ 1 (mod lcm(D))`.
pub fn admissible_primes(denominators: &BTreeSet<u64>, theta: u64, limit: u64) -> Vec<u64> {
    let l = lcm_all(denominators.iter().copied());
    (2..=limit).filter(|&p| p > theta && is_prime(p) && p % l == 1 % l).collect()
}

pub fn is_admissible(denominators: &BTreeSet<u64>, theta: u64, p: u64) -> bool {
    let l = lcm_all(denominators.iter().copied());
    p > theta && is_prime(p) && p % l == 1 % l
}

/// `true` when `1` is the only denominator.
pub fn trivial_denominators(denominators: &BTreeSet<u64>) -> bool {
    denominators.len() == 1 && denominators.iter().all(|d| d.is_one())
}
