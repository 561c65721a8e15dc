//! Artin–Hasse coefficients, deformed coefficient polynomials and Hasse polynomials.

pub mod poly;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use poly::SparsePolynomialModP;

use crate::arith::{is_prime, rational_mod};
use crate::error::{Error, Result};
use crate::geometry::{for_each_integral_point, FiberPolytope, Q};
use crate::lattice::{minimal_data, LatticePair, MinimalData};
use crate::support::{format_rational, SubsetPair, SupportSystem, VarietySpec};

/// Largest prime accepted for the twisted polynomial.
pub const TWISTED_PRIME_LIMIT: u64 = 13;

/// Coefficients `δ_0..=δ_degree` of `exp(Σ_i x^{p^i}/p^i)`.
///
/// From `E' = E·Σ_i x^{p^i - 1}`: `n·δ_n = Σ_{p^i <= n} δ_{n-p^i}`.
pub fn artin_hasse_coefficients(p: u64, degree: usize) -> Vec<Q> {
    let mut powers = Vec::new();
    let mut pk = 1usize;
    while pk <= degree.max(1) {
        powers.push(pk);
        match pk.checked_mul(p as usize) {
            Some(next) => pk = next,
            None => break,
        }
    }
    let mut delta = vec![Q::zero(); degree + 1];
    delta[0] = Q::one();
    for n in 1..=degree {
        let s: Q = powers.iter().filter(|&&q| q <= n).map(|&q| delta[n - q].clone()).sum();
        delta[n] = s / Q::from_integer(BigInt::from(n));
    }
    delta
}

/// `δ_i mod p` for `0 <= i <= degree`.
pub fn artin_hasse_residues(p: u64, degree: usize) -> Vec<u64> {
    artin_hasse_coefficients(p, degree)
        .iter()
        .map(|d| rational_mod(d, p).expect("Artin–Hasse coefficients are p-integral"))
        .collect()
}

fn labels(system: &SupportSystem) -> Vec<String> {
    (0..system.variable_count()).map(|i| system.variable_label(i)).collect()
}

/// `Σ_u (Π_g δ_{u_g}) A^u` over the integral points of a fiber.
fn g_from_fiber(fiber: &FiberPolytope, deltas: &[u64], p: u64, labels: &[String]) -> SparsePolynomialModP {
    let mut out = SparsePolynomialModP::zero(p, labels.to_vec());
    let gens = fiber.generators();
    for_each_integral_point(fiber, |u| {
        let mut coeff = 1u64;
        let mut exps = vec![0u32; labels.len()];
        for (gen, &x) in gens.iter().zip(u) {
            coeff = crate::arith::mul_mod(coeff, deltas[x as usize], p);
            exps[gen.var] = x as u32;
        }
        out.add_term(exps, coeff);
        true
    });
    out
}

/// `G_{T,V}(A)` for a possibly negative target; zero when any entry is negative.
fn g_at(
    system: &SupportSystem,
    pair: &SubsetPair,
    t: &[i64],
    v: &[i64],
    deltas: &[u64],
    p: u64,
    labels: &[String],
) -> SparsePolynomialModP {
    if t.iter().chain(v).any(|&x| x < 0) {
        return SparsePolynomialModP::zero(p, labels.to_vec());
    }
    let t: Vec<u64> = t.iter().map(|&x| x as u64).collect();
    let v: Vec<u64> = v.iter().map(|&x| x as u64).collect();
    g_from_fiber(&FiberPolytope::new(system, pair, &t, &v), deltas, p, labels)
}

/// `G_{s·t, s·v}(A) mod p`.
pub fn g_polynomial(system: &SupportSystem, point: &LatticePair, scale: u64, p: u64) -> SparsePolynomialModP {
    let fiber = point.fiber_at_level(system, scale);
    let degree = fiber.t().iter().copied().max().unwrap_or(0) as usize;
    let deltas = artin_hasse_residues(p, degree);
    g_from_fiber(&fiber, &deltas, p, &labels(system))
}

/// One `(B,C)` summand, sign included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseBlock {
    pub pair: SubsetPair,
    pub weight: u64,
    pub poly: SparsePolynomialModP,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HassePolynomial {
    pub p: u64,
    pub a: u32,
    pub poly: SparsePolynomialModP,
    pub blocks: Vec<HasseBlock>,
    /// Some monomial occurs in two different blocks.
    pub blocks_overlap: bool,
}

fn check_prime_and_degree(p: u64, a: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match a {
        1 => Ok(()),
        2 if p <= TWISTED_PRIME_LIMIT => Ok(()),
        2 => Err(Error::InvalidArgument(format!(
            "a = 2 requires p <= {TWISTED_PRIME_LIMIT}, got {p}"
        ))),
        _ => Err(Error::UnsupportedDegree(a, 2)),
    }
}

pub fn hasse_polynomial(system: &SupportSystem, p: u64, a: u32) -> Result<HassePolynomial> {
    check_prime_and_degree(p, a)?;
    let md = minimal_data(system)?;
    hasse_polynomial_from(system, &md, p, a)
}

pub fn hasse_polynomial_from(system: &SupportSystem, md: &MinimalData, p: u64, a: u32) -> Result<HassePolynomial> {
    check_prime_and_degree(p, a)?;
    let labels = labels(system);
    let max_w = md.k.iter().filter_map(|pw| pw.weight.finite()).max().unwrap_or(0);
    let deltas = artin_hasse_residues(p, (p * max_w.max(1)) as usize);
    let blocks: Vec<HasseBlock> = md
        .k
        .par_iter()
        .zip(&md.zmin)
        .map(|(pw, points)| {
            let w = pw.weight.finite().expect("pairs of K have finite weight");
            let trace = block_trace(system, &pw.pair, points, p, a, &deltas, &labels);
            let exponent = pw.pair.size() as u64 + a as u64 * w;
            let poly = if exponent % 2 == 0 { trace } else { trace.scale(p - 1) };
            HasseBlock { pair: pw.pair.clone(), weight: w, poly }
        })
        .collect();
    let mut poly = SparsePolynomialModP::zero(p, labels);
    let mut blocks_overlap = false;
    for (i, block) in blocks.iter().enumerate() {
        blocks_overlap |= blocks[..i].iter().any(|b| b.poly.shares_monomial_with(&block.poly));
        poly.add_assign(&block.poly);
    }
    Ok(HassePolynomial { p, a, poly, blocks, blocks_overlap })
}

/// Unsigned `Tr(N^{[a]})` of one block over the given `Z^min` points.
pub fn block_trace_polynomial(
    system: &SupportSystem,
    pair: &SubsetPair,
    points: &[LatticePair],
    p: u64,
    a: u32,
) -> Result<SparsePolynomialModP> {
    check_prime_and_degree(p, a)?;
    let w = points.iter().map(LatticePair::total).max().unwrap_or(0);
    let deltas = artin_hasse_residues(p, (p * w.max(1)) as usize);
    Ok(block_trace(system, pair, points, p, a, &deltas, &labels(system)))
}

/// `Tr(N^{[a]})` for one block.
fn block_trace(
    system: &SupportSystem,
    pair: &SubsetPair,
    points: &[LatticePair],
    p: u64,
    a: u32,
    deltas: &[u64],
    labels: &[String],
) -> SparsePolynomialModP {
    let mut out = SparsePolynomialModP::zero(p, labels.to_vec());
    let shifted = |x: &LatticePair, y: &LatticePair| {
        let t: Vec<i64> = x.t.iter().zip(&y.t).map(|(&a, &b)| p as i64 * a as i64 - b as i64).collect();
        let v: Vec<i64> = x.v.iter().zip(&y.v).map(|(&a, &b)| p as i64 * a as i64 - b as i64).collect();
        g_at(system, pair, &t, &v, deltas, p, labels)
    };
    match a {
        1 => {
            for x in points {
                out.add_assign(&shifted(x, x));
            }
        }
        _ => {
            // entries G_{p t_x - t_y, p v_x - v_y}; trace of N(A^p)·N(A)
            for x in points {
                for y in points {
                    let left = shifted(x, y);
                    if left.is_zero() {
                        continue;
                    }
                    let right = shifted(y, x);
                    out.add_assign(&left.twist(p as u32).mul(&right));
                }
            }
        }
    }
    out
}

/// Coefficients mod `p` in global variable order.
pub fn coefficient_residues(spec: &VarietySpec, p: u64) -> Result<Vec<u64>> {
    spec.flat_coefficients()
        .iter()
        .map(|c| match rational_mod(c, p) {
            Some(r) if r != 0 => Ok(r),
            _ => Err(Error::NonUnitCoefficient { coefficient: format_rational(c), p }),
        })
        .collect()
}

/// Value of a polynomial at residues.
pub fn evaluate_hasse(h: &SparsePolynomialModP, values: &[Option<u64>]) -> Result<u64> {
    h.evaluate(values)
}

/// `H(a mod p)` for a variety.
pub fn evaluate_at_variety(h: &SparsePolynomialModP, spec: &VarietySpec) -> Result<u64> {
    let values: Vec<Option<u64>> = coefficient_residues(spec, h.p())?.into_iter().map(Some).collect();
    h.evaluate(&values)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockHomogeneity {
    pub pair: SubsetPair,
    pub expected_degree: u64,
    pub degrees: Vec<u64>,
    pub max_variable_degree: u32,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub pass: bool,
    pub nonzero: bool,
    pub disjoint_blocks: bool,
    pub blocks: Vec<BlockHomogeneity>,
}

/// Each block is nonzero and homogeneous of degree `(p^a - 1)·w_Z`; for
/// `a = 1` every variable degree is at most `p - 1`. The sum is nonzero and
/// the blocks share no monomial.
pub fn homogeneity_report(h: &HassePolynomial) -> HomogeneityReport {
    let p = h.p;
    let blocks: Vec<BlockHomogeneity> = h
        .blocks
        .iter()
        .map(|b| {
            let expected_degree = (p.pow(h.a) - 1) * b.weight;
            let mut degrees = b.poly.total_degrees();
            degrees.sort_unstable();
            degrees.dedup();
            let max_variable_degree = b.poly.max_variable_degree();
            let homogeneous = !degrees.is_empty() && degrees.iter().all(|&d| d == expected_degree);
            let variable_ok = h.a != 1 || max_variable_degree as u64 <= p - 1;
            BlockHomogeneity {
                pair: b.pair.clone(),
                expected_degree,
                degrees,
                max_variable_degree,
                pass: homogeneous && variable_ok,
            }
        })
        .collect();
    let nonzero = !h.poly.is_zero();
    let disjoint_blocks = !h.blocks_overlap;
    HomogeneityReport { pass: nonzero && disjoint_blocks && blocks.iter().all(|b| b.pass), nonzero, disjoint_blocks, blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::valuation;
    use crate::geometry::polytope::qi;

    fn example2() -> SupportSystem {
        SupportSystem::from_vecs(3, &[&[&[3, 3, 0], &[0, 2, 2]]]).unwrap()
    }

    fn linear() -> SupportSystem {
        SupportSystem::from_vecs(1, &[&[&[1]]]).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    fn factorial(n: i64) -> Q {
        qi((1..=n).product::<i64>().max(1))
    }

    #[test]
    fn artin_hasse_examples() {
        let d = artin_hasse_coefficients(5, 4);
        assert_eq!(d[0], qi(1));
        assert_eq!(d[1], qi(1));
        assert_eq!(d[2], q(1, 2));
        assert_eq!(d[4], q(1, 24));
        assert_eq!(artin_hasse_coefficients(3, 3)[3], q(1, 2));
        for p in [3i64, 5, 7] {
            let d = artin_hasse_coefficients(p as u64, p as usize);
            assert_eq!(d[p as usize], (qi(1) + factorial(p - 1)) / factorial(p));
        }
    }

    #[test]
    fn artin_hasse_integrality() {
        for p in [2u64, 3, 5, 7] {
            let d = artin_hasse_coefficients(p, 4 * p as usize);
            for (i, x) in d.iter().enumerate() {
                if i < p as usize {
                    assert_eq!(*x, qi(1) / factorial(i as i64));
                }
                assert!(valuation(x, p).unwrap() >= 0, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn g_polynomial_examples() {
        let s = example2();
        let p23 = LatticePair { pair: SubsetPair::one_based(&[1], &[2, 3]), t: vec![1], v: vec![0, 2, 2] };
        assert_eq!(g_polynomial(&s, &p23, 4, 5).to_canonical_string(), "4*A[1,(0,2,2)]^4");
        let full = LatticePair { pair: SubsetPair::one_based(&[1], &[1, 2, 3]), t: vec![2], v: vec![3, 5, 2] };
        assert_eq!(g_polynomial(&s, &full, 4, 5).to_canonical_string(), "1*A[1,(3,3,0)]^4*A[1,(0,2,2)]^4");
        let empty = LatticePair { pair: SubsetPair::one_based(&[1], &[1, 2, 3]), t: vec![2], v: vec![3, 5, 3] };
        assert!(g_polynomial(&s, &empty, 4, 5).is_zero());
    }

    #[test]
    fn hasse_examples() {
        let s = example2();
        let h = hasse_polynomial(&s, 5, 1).unwrap();
        assert_eq!(
            h.poly.to_canonical_string(),
            "4*A[1,(0,2,2)]^4 + 4*A[1,(3,3,0)]^4 + 1*A[1,(3,3,0)]^4*A[1,(0,2,2)]^4"
        );
        assert_eq!(h.poly.evaluate(&[Some(1), Some(1)]).unwrap(), 4);
        let h7 = hasse_polynomial(&s, 7, 1).unwrap();
        assert_eq!(
            h7.poly.to_canonical_string(),
            "6*A[1,(0,2,2)]^6 + 6*A[1,(3,3,0)]^6 + 1*A[1,(3,3,0)]^6*A[1,(0,2,2)]^6"
        );
        assert_eq!(h7.poly.evaluate(&[Some(1), Some(1)]).unwrap(), 6);
        let lin = hasse_polynomial(&linear(), 5, 1).unwrap();
        assert_eq!(lin.poly.to_canonical_string(), "1*A[1,(1)]^4");
    }

    #[test]
    fn twisted_example_two() {
        for p in [3u64, 5] {
            let h = hasse_polynomial(&example2(), p, 2).unwrap();
            assert_eq!(h.poly.evaluate(&[Some(1), Some(1)]).unwrap(), p - 1);
            assert!(homogeneity_report(&h).pass);
        }
        assert!(hasse_polynomial(&example2(), 17, 2).is_err());
        assert!(matches!(hasse_polynomial(&example2(), 5, 3), Err(Error::UnsupportedDegree(3, 2))));
    }

    #[test]
    fn homogeneity_examples() {
        let h = hasse_polynomial(&example2(), 5, 1).unwrap();
        let rep = homogeneity_report(&h);
        assert!(rep.pass);
        let degs: Vec<u64> = rep.blocks.iter().map(|b| b.expected_degree).collect();
        assert_eq!(degs, vec![4, 4, 8]);
        assert!(homogeneity_report(&hasse_polynomial(&linear(), 5, 1).unwrap()).pass);

        let mut broken = h.clone();
        broken.poly = SparsePolynomialModP::zero(5, h.poly.labels().to_vec());
        for b in &mut broken.blocks {
            b.poly = broken.poly.clone();
        }
        let rep = homogeneity_report(&broken);
        assert!(!rep.pass);
        assert!(!rep.nonzero);
    }

    #[test]
    fn evaluation_requires_assignment() {
        let h = hasse_polynomial(&example2(), 5, 1).unwrap();
        assert!(matches!(evaluate_hasse(&h.poly, &[Some(1), None]), Err(Error::UnassignedVariable(_))));
    }

    #[test]
    fn conditional_value_for_units() {
        // H_p(a) ≡ -1 for every unit coefficient pair
        let s = example2();
        for p in [5u64, 7, 11, 13] {
            let h = hasse_polynomial(&s, p, 1).unwrap();
            for a1 in 1..p {
                for a2 in [1, 2, p - 1] {
                    assert_eq!(h.poly.evaluate(&[Some(a1), Some(a2)]).unwrap(), p - 1);
                }
            }
        }
    }

    #[test]
    fn rejects_composite() {
        assert!(matches!(hasse_polynomial(&example2(), 9, 1), Err(Error::NotPrime(9))));
    }
}
