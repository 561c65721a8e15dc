//! Sparse multivariate polynomials over `F_p`.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Polynomial in variables `A_0, …, A_{k-1}` with residues mod `p`.
/// Zero coefficients are never stored; terms iterate in ascending exponent order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePolynomialModP {
    p: u64,
    labels: Vec<String>,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl SparsePolynomialModP {
    pub fn zero(p: u64, labels: Vec<String>) -> Self {
        SparsePolynomialModP { p, labels, terms: BTreeMap::new() }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> u64 {
        self.terms.get(exponents).copied().unwrap_or(0)
    }

    /// Adds `c·A^e`.
    pub fn add_term(&mut self, exponents: Vec<u32>, c: u64) {
        assert_eq!(exponents.len(), self.labels.len(), "exponent length");
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let sum = (self.coefficient(&exponents) + c) % self.p;
        if sum == 0 {
            self.terms.remove(&exponents);
        } else {
            self.terms.insert(exponents, sum);
        }
    }

    pub fn add_assign(&mut self, other: &SparsePolynomialModP) {
        for (e, c) in other.terms() {
            self.add_term(e.clone(), c);
        }
    }

    pub fn scale(&self, c: u64) -> SparsePolynomialModP {
        let mut out = SparsePolynomialModP::zero(self.p, self.labels.clone());
        for (e, v) in self.terms() {
            out.add_term(e.clone(), mul_mod(v, c, self.p));
        }
        out
    }

    pub fn mul(&self, other: &SparsePolynomialModP) -> SparsePolynomialModP {
        let mut out = SparsePolynomialModP::zero(self.p, self.labels.clone());
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, mul_mod(c1, c2, self.p));
            }
        }
        out
    }

    /// `A ↦ A^k` on every variable.
    pub fn twist(&self, k: u32) -> SparsePolynomialModP {
        let mut out = SparsePolynomialModP::zero(self.p, self.labels.clone());
        for (e, c) in self.terms() {
            out.add_term(e.iter().map(|x| x * k).collect(), c);
        }
        out
    }

    /// Total degrees of all terms.
    pub fn total_degrees(&self) -> Vec<u64> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u64).sum()).collect()
    }

    pub fn max_variable_degree(&self) -> u32 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }

    /// Variables occurring with positive exponent.
    pub fn used_variables(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    /// Value at residues; `None` entries must not occur in the polynomial.
    pub fn evaluate(&self, values: &[Option<u64>]) -> Result<u64> {
        assert_eq!(values.len(), self.labels.len(), "one value per variable");
        for i in self.used_variables() {
            if values[i].is_none() {
                return Err(Error::UnassignedVariable(self.labels[i].clone()));
            }
        }
        let mut acc = 0u64;
        for (e, c) in self.terms() {
            let mut term = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = mul_mod(term, pow_mod(values[i].unwrap(), k as u64, self.p), self.p);
                }
            }
            acc = (acc + term) % self.p;
        }
        Ok(acc)
    }

    /// Whether two polynomials share a monomial.
    pub fn shares_monomial_with(&self, other: &SparsePolynomialModP) -> bool {
        self.terms.keys().any(|e| other.terms.contains_key(e))
    }

    /// `coeff*A[j,g]^e*…` joined by ` + `; `0` for the zero polynomial.
    pub fn to_canonical_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (e, c) in self.terms() {
            let mut s = c.to_string();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    s.push_str(&format!("*A[{}]^{}", self.labels[i], k));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for SparsePolynomialModP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}
