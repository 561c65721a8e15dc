//! Support systems, varieties and subset pairs.
//!
//! Indices are zero-based internally. Everything user-facing (reports, the
//! canonical polynomial text, `Display` impls) prints them one-based.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, InputErrorKind, Result};

/// Exponent vector `g` of a monomial `x^g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|g|`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Whether every entry outside `c` vanishes.
    pub fn supported_in(&self, c: &[usize]) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, &e)| e == 0 || c.contains(&i))
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// The exponent sets of `r` polynomials in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportSystem {
    n: usize,
    supports: Vec<Vec<ExponentVector>>,
}

impl SupportSystem {
    /// Validates and builds a support system. Vectors inside one support keep
    /// their given order.
    pub fn new(n: usize, supports: Vec<Vec<ExponentVector>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::schema("n", "must be a positive integer"));
        }
        if supports.is_empty() {
            return Err(Error::schema("polynomials", "at least one polynomial is required"));
        }
        for (j, support) in supports.iter().enumerate() {
            if support.is_empty() {
                return Err(Error::schema(
                    format!("polynomials[{j}].support"),
                    "support must be nonempty",
                ));
            }
            let mut seen = BTreeSet::new();
            for (k, g) in support.iter().enumerate() {
                let path = format!("polynomials[{j}].support[{k}]");
                if g.len() != n {
                    return Err(Error::input(
                        path,
                        InputErrorKind::DimensionMismatch { expected: n, found: g.len() },
                    ));
                }
                if !seen.insert(g.clone()) {
                    return Err(Error::input(path, InputErrorKind::DuplicateExponent));
                }
            }
        }
        Ok(SupportSystem { n, supports })
    }

    pub fn from_vecs(n: usize, supports: &[&[&[u32]]]) -> Result<Self> {
        let supports = supports
            .iter()
            .map(|s| s.iter().map(|g| ExponentVector::new(g.to_vec())).collect())
            .collect();
        SupportSystem::new(n, supports)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[Vec<ExponentVector>] {
        &self.supports
    }

    pub fn support(&self, j: usize) -> &[ExponentVector] {
        &self.supports[j]
    }

    /// `deg f_j = max |g|` for every `j`.
    pub fn degrees(&self) -> Vec<u64> {
        self.supports
            .iter()
            .map(|s| s.iter().map(ExponentVector::degree).max().unwrap_or(0))
            .collect()
    }

    pub fn max_coordinate(&self) -> u32 {
        self.supports
            .iter()
            .flatten()
            .flat_map(|g| g.entries().iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Whether some support contains the zero vector.
    pub fn has_constant_term(&self) -> bool {
        self.supports.iter().flatten().any(ExponentVector::is_zero)
    }

    /// Every variable occurs with positive exponent in some monomial.
    pub fn covers_all_variables(&self) -> bool {
        (0..self.n).all(|i| self.supports.iter().flatten().any(|g| g.entries()[i] > 0))
    }

    /// Global index of the coefficient variable `A[j,g]` for every `(j, k)`,
    /// flattened in support order.
    pub fn variable_count(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    pub fn variable_index(&self, j: usize, k: usize) -> usize {
        self.supports[..j].iter().map(Vec::len).sum::<usize>() + k
    }

    /// `(j, k)` for a global variable index.
    pub fn variable_position(&self, mut index: usize) -> (usize, usize) {
        for (j, s) in self.supports.iter().enumerate() {
            if index < s.len() {
                return (j, index);
            }
            index -= s.len();
        }
        panic!("variable index out of range");
    }

    /// Label `j,g` (one-based `j`) of a global variable.
    pub fn variable_label(&self, index: usize) -> String {
        let (j, k) = self.variable_position(index);
        format!("{},{}", j + 1, self.supports[j][k])
    }
}

/// Returns all `g` in support `j` whose entries outside `c` are zero.
pub fn restrict_support<'a>(system: &'a SupportSystem, j: usize, c: &[usize]) -> Vec<&'a ExponentVector> {
    system.support(j).iter().filter(|g| g.supported_in(c)).collect()
}

/// A pair of nonempty index subsets `B ⊆ {0..r}`, `C ⊆ {0..n}`, both sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetPair {
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

impl SubsetPair {
    pub fn new(mut b: Vec<usize>, mut c: Vec<usize>) -> Self {
        b.sort_unstable();
        b.dedup();
        c.sort_unstable();
        c.dedup();
        debug_assert!(!b.is_empty(), "B must be nonempty");
        SubsetPair { b, c }
    }

    /// Builds a pair from one-based index lists.
    pub fn one_based(b: &[usize], c: &[usize]) -> Self {
        SubsetPair::new(b.iter().map(|i| i - 1).collect(), c.iter().map(|i| i - 1).collect())
    }

    pub fn full(n: usize, r: usize) -> Self {
        SubsetPair::new((0..r).collect(), (0..n).collect())
    }

    pub fn size(&self) -> usize {
        self.b.len() + self.c.len()
    }
}

impl fmt::Display for SubsetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |v: &[usize]| {
            v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "({{{}}},{{{}}})", set(&self.b), set(&self.c))
    }
}

/// Nonempty subsets of `{0..m}` ordered by cardinality, then lexicographically.
pub(crate) fn nonempty_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity((1usize << m).saturating_sub(1));
    for k in 1..=m {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            out.push(combo.clone());
            // advance to the next k-combination in lexicographic order
            let mut i = k;
            while i > 0 && combo[i - 1] == m - k + i - 1 {
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
    }
    out
}

/// All `(2^r - 1)(2^n - 1)` subset pairs, `B` outer and `C` inner.
pub fn enumerate_subset_pairs(n: usize, r: usize) -> Vec<SubsetPair> {
    let bs = nonempty_subsets(r);
    let cs = nonempty_subsets(n);
    let mut out = Vec::with_capacity(bs.len() * cs.len());
    for b in &bs {
        for c in &cs {
            out.push(SubsetPair { b: b.clone(), c: c.clone() });
        }
    }
    out
}

/// A support system together with nonzero rational coefficients, i.e. the
/// variety cut out by `f_j = Σ_g a_{j,g} x^g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    system: SupportSystem,
    coefficients: Vec<Vec<BigRational>>,
}

impl VarietySpec {
    pub fn new(system: SupportSystem, coefficients: Vec<Vec<BigRational>>) -> Result<Self> {
        if coefficients.len() != system.r() {
            return Err(Error::schema(
                "polynomials",
                format!("expected {} coefficient lists, found {}", system.r(), coefficients.len()),
            ));
        }
        for (j, (cs, support)) in coefficients.iter().zip(system.supports()).enumerate() {
            if cs.len() != support.len() {
                return Err(Error::schema(
                    format!("polynomials[{j}].coefficients"),
                    format!("expected {} coefficients, found {}", support.len(), cs.len()),
                ));
            }
            if let Some(k) = cs.iter().position(Zero::is_zero) {
                return Err(Error::input(
                    format!("polynomials[{j}].coefficients[{k}]"),
                    InputErrorKind::ZeroCoefficient,
                ));
            }
        }
        Ok(VarietySpec { system, coefficients })
    }

    /// Convenience constructor with integer coefficients.
    pub fn with_integers(system: SupportSystem, coefficients: &[&[i64]]) -> Result<Self> {
        let cs = coefficients
            .iter()
            .map(|row| row.iter().map(|&a| BigRational::from_integer(BigInt::from(a))).collect())
            .collect();
        VarietySpec::new(system, cs)
    }

    /// Same supports, every coefficient equal to one.
    pub fn unit_coefficients(system: SupportSystem) -> Self {
        let cs = system
            .supports()
            .iter()
            .map(|s| vec![BigRational::one(); s.len()])
            .collect();
        VarietySpec { system, coefficients: cs }
    }

    pub fn system(&self) -> &SupportSystem {
        &self.system
    }

    pub fn coefficients(&self) -> &[Vec<BigRational>] {
        &self.coefficients
    }

    pub fn coefficient(&self, j: usize, k: usize) -> &BigRational {
        &self.coefficients[j][k]
    }

    /// Coefficients flattened in global variable order.
    pub fn flat_coefficients(&self) -> Vec<BigRational> {
        self.coefficients.iter().flatten().cloned().collect()
    }

    /// Whether `p` divides neither numerator nor denominator of any coefficient.
    pub fn coprime_to(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.coefficients.iter().flatten().all(|a| {
            !(a.numer() % &p).is_zero() && !(a.denom() % &p).is_zero()
        })
    }

    /// Parses the JSON document format.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
        VarietySpec::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        parse_variety_spec(value)
    }

    pub fn to_json(&self) -> Value {
        let polys: Vec<Value> = self
            .system
            .supports()
            .iter()
            .zip(&self.coefficients)
            .map(|(support, cs)| {
                json!({
                    "support": support.iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>(),
                    "coefficients": cs.iter().map(format_rational).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "n": self.system.n(), "polynomials": polys })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("spec serializes")
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses a coefficient string of the form `-?[0-9]+(/[1-9][0-9]*)?`.
pub fn parse_coefficient(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (s, None),
    };
    let digits = num.strip_prefix('-').unwrap_or(num);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = num.parse().ok()?;
    let denom = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.is_empty() || d.starts_with('0') || !d.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            d.parse().ok()?
        }
    };
    Some(BigRational::new(numer, denom))
}

fn expect_object<'a>(value: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))?;
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::schema(format!("{path}.{key}"), "unknown field"));
        }
    }
    Ok(obj)
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::schema(path, format!("missing field \"{key}\"")))
}

fn parse_variety_spec(value: &Value) -> Result<VarietySpec> {
    let root = expect_object(value, "$", &["n", "polynomials"])?;
    let n = required(root, "$", "n")?
        .as_u64()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::schema("n", "expected a positive integer"))? as usize;
    let polys = required(root, "$", "polynomials")?
        .as_array()
        .ok_or_else(|| Error::schema("polynomials", "expected an array"))?;
    if polys.is_empty() {
        return Err(Error::schema("polynomials", "at least one polynomial is required"));
    }

    let mut supports = Vec::with_capacity(polys.len());
    let mut coefficients = Vec::with_capacity(polys.len());
    for (j, poly) in polys.iter().enumerate() {
        let ppath = format!("polynomials[{j}]");
        let obj = expect_object(poly, &ppath, &["support", "coefficients"])?;
        let spath = format!("{ppath}.support");
        let support = required(obj, &ppath, "support")?
            .as_array()
            .ok_or_else(|| Error::schema(&spath, "expected an array"))?;
        let mut vectors = Vec::with_capacity(support.len());
        for (k, g) in support.iter().enumerate() {
            let gpath = format!("{spath}[{k}]");
            let entries = g
                .as_array()
                .ok_or_else(|| Error::schema(&gpath, "expected an array of nonnegative integers"))?;
            let mut exps = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let e = e
                    .as_u64()
                    .and_then(|e| u32::try_from(e).ok())
                    .ok_or_else(|| Error::schema(format!("{gpath}[{i}]"), "expected a nonnegative integer"))?;
                exps.push(e);
            }
            vectors.push(ExponentVector::new(exps));
        }

        let cpath = format!("{ppath}.coefficients");
        let cs = required(obj, &ppath, "coefficients")?
            .as_array()
            .ok_or_else(|| Error::schema(&cpath, "expected an array of strings"))?;
        let mut row = Vec::with_capacity(cs.len());
        for (k, c) in cs.iter().enumerate() {
            let kpath = format!("{cpath}[{k}]");
            let s = c
                .as_str()
                .ok_or_else(|| Error::schema(&kpath, "expected a string"))?;
            let q = parse_coefficient(s)
                .ok_or_else(|| Error::schema(&kpath, format!("malformed coefficient \"{s}\"")))?;
            row.push(q);
        }
        supports.push(vectors);
        coefficients.push(row);
    }

    let system = SupportSystem::new(n, supports)?;
    VarietySpec::new(system, coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example2() -> SupportSystem {
        SupportSystem::from_vecs(3, &[&[&[3, 3, 0], &[0, 2, 2]]]).unwrap()
    }

    #[test]
    fn parses_example_two() {
        let doc = r#"{"n":3,"polynomials":[{"support":[[3,3,0],[0,2,2]],"coefficients":["1","1"]}]}"#;
        let spec = VarietySpec::from_json_str(doc).unwrap();
        assert_eq!(spec.system().r(), 1);
        assert_eq!(spec.system().n(), 3);
        assert_eq!(spec.system(), &example2());
    }

    #[test]
    fn rejects_zero_coefficient() {
        let doc = r#"{"n":3,"polynomials":[{"support":[[3,3,0],[0,2,2]],"coefficients":["1","0"]}]}"#;
        let err = VarietySpec::from_json_str(doc).unwrap_err();
        assert!(err.to_string().contains("zero coefficient"), "{err}");
        assert!(err.to_string().starts_with("polynomials[0].coefficients[1]"), "{err}");
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let doc = r#"{"n":3,"polynomials":[{"support":[[2,1]],"coefficients":["1"]}]}"#;
        let err = VarietySpec::from_json_str(doc).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"), "{err}");
    }

    #[test]
    fn rejects_duplicates_unknown_fields_and_bad_strings() {
        let dup = r#"{"n":1,"polynomials":[{"support":[[1],[1]],"coefficients":["1","2"]}]}"#;
        assert!(VarietySpec::from_json_str(dup).unwrap_err().to_string().contains("duplicate"));
        let unknown = r#"{"n":1,"extra":0,"polynomials":[{"support":[[1]],"coefficients":["1"]}]}"#;
        assert!(VarietySpec::from_json_str(unknown).unwrap_err().to_string().contains("unknown field"));
        for bad in ["1.5", "1/0", "+3", "1/-2", "", "1/02"] {
            assert!(parse_coefficient(bad).is_none(), "{bad}");
        }
        assert_eq!(parse_coefficient("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn restrict_support_examples() {
        let s = example2();
        let restricted: Vec<_> = restrict_support(&s, 0, &[1, 2]).into_iter().cloned().collect();
        assert_eq!(restricted, vec![ExponentVector::new(vec![0, 2, 2])]);
        assert_eq!(restrict_support(&s, 0, &[0, 1, 2]).len(), 2);
        assert!(restrict_support(&s, 0, &[2]).is_empty());
    }

    #[test]
    fn subset_pair_enumeration() {
        assert_eq!(enumerate_subset_pairs(1, 1), vec![SubsetPair::one_based(&[1], &[1])]);
        assert_eq!(
            enumerate_subset_pairs(2, 1),
            vec![
                SubsetPair::one_based(&[1], &[1]),
                SubsetPair::one_based(&[1], &[2]),
                SubsetPair::one_based(&[1], &[1, 2]),
            ]
        );
        assert_eq!(enumerate_subset_pairs(3, 1).len(), 7);
        let pairs = enumerate_subset_pairs(4, 2);
        assert_eq!(pairs.len(), 3 * 15);
        let unique: BTreeSet<_> = pairs.iter().collect();
        assert_eq!(unique.len(), pairs.len());
        assert_eq!(SubsetPair::one_based(&[1], &[2, 3]).to_string(), "({1},{2,3})");
    }
}
