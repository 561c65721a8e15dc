//! Finite fields `F_{p^a}` for `a <= 3` and brute-force point counting.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, rational_mod};
use crate::error::{Error, Result};
use crate::geometry::Q;
use crate::support::{format_rational, VarietySpec};

/// Largest `q^n` scanned exhaustively.
pub const COUNT_GUARD: u128 = 100_000_000;

/// Largest supported extension degree.
pub const MAX_EXTENSION_DEGREE: u32 = 3;

/// `F_p[x]/(m(x))` with `m` monic of degree `a`. Elements are encoded as
/// integers `Σ c_i p^i` in `0..q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    a: u32,
    /// `m_0..m_{a-1}`; the leading coefficient is implicit.
    modulus: Vec<u64>,
    q: u64,
}

impl FiniteField {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Coefficients of the monic modulus, constant term first, leading one included.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    fn digits(&self, x: u64) -> [u64; 3] {
        let mut d = [0u64; 3];
        let mut x = x;
        for slot in d.iter_mut().take(self.a as usize) {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn encode(&self, d: &[u64]) -> u64 {
        d.iter().take(self.a as usize).rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        if self.a == 1 {
            return (x + y) % self.p;
        }
        let (dx, dy) = (self.digits(x), self.digits(y));
        let s: Vec<u64> = (0..self.a as usize).map(|i| (dx[i] + dy[i]) % self.p).collect();
        self.encode(&s)
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        if self.a == 1 {
            return x * y % p;
        }
        let a = self.a as usize;
        let (dx, dy) = (self.digits(x), self.digits(y));
        let mut prod = [0u64; 5];
        for i in 0..a {
            for k in 0..a {
                prod[i + k] = (prod[i + k] + dx[i] * dy[k]) % p;
            }
        }
        // reduce with x^a = -Σ m_i x^i
        for top in (a..2 * a - 1).rev() {
            let c = prod[top];
            if c != 0 {
                prod[top] = 0;
                for (i, &m) in self.modulus.iter().enumerate() {
                    prod[top - a + i] = (prod[top - a + i] + (p - m) * c) % p;
                }
            }
        }
        self.encode(&prod[..a])
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut base = x;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Image of an element of the prime field.
    pub fn from_prime_field(&self, c: u64) -> u64 {
        c % self.p
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a == 1 {
            return write!(f, "F_{}", self.p);
        }
        let m = self.modulus();
        let mut parts = Vec::new();
        for (i, &c) in m.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        write!(f, "F_{}^{} = F_{}[x]/({})", self.p, self.a, self.p, parts.join(" + "))
    }
}

fn has_root(p: u64, coeffs: &[u64]) -> bool {
    (0..p).any(|x| coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0)
}

/// `F_{p^a}` with the smallest monic irreducible modulus, ordered by
/// `Σ m_i p^i`. A polynomial of degree at most 3 without roots is irreducible.
pub fn build_field(p: u64, a: u32) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a == 0 || a > MAX_EXTENSION_DEGREE {
        return Err(Error::UnsupportedDegree(a, MAX_EXTENSION_DEGREE));
    }
    let q = p.pow(a);
    if a == 1 {
        return Ok(FiniteField { p, a, modulus: vec![0], q });
    }
    for code in 0..q {
        let mut m: Vec<u64> = (0..a).map(|i| code / p.pow(i) % p).collect();
        m.push(1);
        if !has_root(p, &m) {
            m.pop();
            return Ok(FiniteField { p, a, modulus: m, q });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Number of common zeros in `F_q^n`.
pub fn count_points(spec: &VarietySpec, field: &FiniteField) -> Result<u64> {
    let prepared = Prepared::new(spec, field)?;
    let q = field.q();
    Ok((0..q).into_par_iter().map(|x0| prepared.count_slice(x0)).sum())
}

/// Same as [`count_points`] on the current thread.
pub fn count_points_serial(spec: &VarietySpec, field: &FiniteField) -> Result<u64> {
    let prepared = Prepared::new(spec, field)?;
    Ok((0..field.q()).map(|x0| prepared.count_slice(x0)).sum())
}

struct Prepared<'a> {
    field: &'a FiniteField,
    n: usize,
    /// Per polynomial: (coefficient, exponent vector).
    polys: Vec<Vec<(u64, Vec<u32>)>>,
    /// `powers[x][e] = x^e`; empty for large fields.
    powers: Vec<Vec<u64>>,
}

impl<'a> Prepared<'a> {
    fn new(spec: &VarietySpec, field: &'a FiniteField) -> Result<Self> {
        let system = spec.system();
        let n = system.n();
        let size = (field.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > COUNT_GUARD {
            return Err(Error::GuardExceeded { size, limit: COUNT_GUARD });
        }
        let mut polys = Vec::with_capacity(system.r());
        for (j, gs) in system.supports().iter().enumerate() {
            let mut terms = Vec::with_capacity(gs.len());
            for (k, g) in gs.iter().enumerate() {
                let c = reduce_coefficient(spec.coefficient(j, k), field.p())?;
                if c != 0 {
                    terms.push((field.from_prime_field(c), g.entries().to_vec()));
                }
            }
            polys.push(terms);
        }
        let max_e = system.max_coordinate() as usize;
        // large fields (only reachable with small n) compute powers on the fly
        let table_size = if field.q() <= 1 << 16 { field.q() } else { 0 };
        let powers = (0..table_size)
            .map(|x| {
                let mut row = Vec::with_capacity(max_e + 1);
                let mut acc = 1u64;
                for _ in 0..=max_e {
                    row.push(acc);
                    acc = field.mul(acc, x);
                }
                row
            })
            .collect();
        Ok(Prepared { field, n, polys, powers })
    }

    fn vanishes(&self, x: &[u64]) -> bool {
        self.polys.iter().all(|terms| {
            let mut acc = 0u64;
            for (c, g) in terms {
                let mut m = *c;
                for (i, &e) in g.iter().enumerate() {
                    if e > 0 {
                        let xe = match self.powers.get(x[i] as usize) {
                            Some(row) => row[e as usize],
                            None => self.field.pow(x[i], e as u64),
                        };
                        m = self.field.mul(m, xe);
                    }
                }
                acc = self.field.add(acc, m);
            }
            acc == 0
        })
    }

    fn count_slice(&self, x0: u64) -> u64 {
        let q = self.field.q();
        let mut x = vec![0u64; self.n];
        x[0] = x0;
        let mut count = 0;
        loop {
            if self.vanishes(&x) {
                count += 1;
            }
            let mut i = self.n;
            loop {
                if i <= 1 {
                    return count;
                }
                i -= 1;
                x[i] += 1;
                if x[i] < q {
                    break;
                }
                x[i] = 0;
            }
        }
    }
}

/// Residue of a coefficient; fails when `p` divides its denominator.
fn reduce_coefficient(c: &Q, p: u64) -> Result<u64> {
    if (c.denom() % BigInt::from(p)) == BigInt::from(0) {
        return Err(Error::NonUnitCoefficient { coefficient: format_rational(c), p });
    }
    Ok(rational_mod(c, p).expect("denominator is a unit"))
}

/// `ord_q` of a count: `ord_p(count)/a`, infinite at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdQ {
    Finite(Q),
    Infinite,
}

impl OrdQ {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            OrdQ::Finite(x) => Some(x),
            OrdQ::Infinite => None,
        }
    }

    /// `ord_q >= mu`.
    pub fn at_least(&self, mu: i64) -> bool {
        match self {
            OrdQ::Finite(x) => *x >= Q::from_integer(BigInt::from(mu)),
            OrdQ::Infinite => true,
        }
    }

    pub fn equals(&self, mu: i64) -> bool {
        matches!(self, OrdQ::Finite(x) if *x == Q::from_integer(BigInt::from(mu)))
    }
}

impl fmt::Display for OrdQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdQ::Finite(x) => f.write_str(&format_rational(x)),
            OrdQ::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for OrdQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for OrdQ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(OrdQ::Infinite);
        }
        crate::support::parse_coefficient(&s)
            .map(OrdQ::Finite)
            .ok_or_else(|| serde::de::Error::custom(format!("bad valuation {s:?}")))
    }
}

/// `p`-adic valuation of a nonnegative integer; `None` at zero.
pub fn ord_p(count: u64, p: u64) -> Option<u32> {
    if count == 0 {
        return None;
    }
    let mut c = count;
    let mut k = 0;
    while c % p == 0 {
        c /= p;
        k += 1;
    }
    Some(k)
}

pub fn ord_q(count: u64, p: u64, a: u32) -> OrdQ {
    match ord_p(count, p) {
        Some(k) => OrdQ::Finite(Q::new(BigInt::from(k), BigInt::from(a))),
        None => OrdQ::Infinite,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u64,
    pub a: u32,
    pub q: u64,
    pub count: u64,
    pub ord_q: OrdQ,
    pub mu: i64,
    pub sharp: bool,
}

pub fn count_report(spec: &VarietySpec, p: u64, a: u32, mu: i64) -> Result<CountReport> {
    let field = build_field(p, a)?;
    let count = count_points(spec, &field)?;
    let ord = ord_q(count, p, a);
    Ok(CountReport { p, a, q: field.q(), count, sharp: ord.equals(mu), ord_q: ord, mu })
}
