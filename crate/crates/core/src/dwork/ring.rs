//! `Z_p[π]/(π^{p-1} + p)` modulo `p^m`.

use std::fmt;

use crate::arith::mul_mod;
use crate::error::{Error, Result};

/// Largest modulus `p^m` handled with 64-bit residues.
const MODULUS_LIMIT: u128 = 1 << 62;

/// `Σ c_i π^i` with `0 <= i < p-1` and every `c_i` taken modulo `p^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedPadicElement {
    p: u64,
    m: u32,
    c: Vec<u64>,
}

/// `p^m`, or an error when it does not fit.
pub fn modulus(p: u64, m: u32) -> Result<u64> {
    let value = (p as u128).checked_pow(m).filter(|&v| v < MODULUS_LIMIT);
    value
        .map(|v| v as u64)
        .ok_or_else(|| Error::Precision(format!("{p}^{m} exceeds 2^62")))
}

impl RamifiedPadicElement {
    pub fn zero(p: u64, m: u32) -> Result<Self> {
        modulus(p, m)?;
        if p < 3 {
            return Err(Error::InvalidArgument("the ramified ring needs p >= 3".into()));
        }
        Ok(RamifiedPadicElement { p, m, c: vec![0; (p - 1) as usize] })
    }

    pub fn from_int(x: i64, p: u64, m: u32) -> Result<Self> {
        let mut e = RamifiedPadicElement::zero(p, m)?;
        e.c[0] = (x as i128).rem_euclid(e.modulus() as i128) as u64;
        Ok(e)
    }

    /// Residue `x mod p^m` placed in the constant coefficient.
    pub fn from_residue(x: u64, p: u64, m: u32) -> Result<Self> {
        let mut e = RamifiedPadicElement::zero(p, m)?;
        e.c[0] = x % e.modulus();
        Ok(e)
    }

    pub fn from_coefficients(coeffs: &[u64], p: u64, m: u32) -> Result<Self> {
        let mut e = RamifiedPadicElement::zero(p, m)?;
        if coeffs.len() > e.c.len() {
            return Err(Error::InvalidArgument("too many coefficients".into()));
        }
        let md = e.modulus();
        for (slot, &x) in e.c.iter_mut().zip(coeffs) {
            *slot = x % md;
        }
        Ok(e)
    }

    pub fn pi(p: u64, m: u32) -> Result<Self> {
        let mut e = RamifiedPadicElement::zero(p, m)?;
        if e.c.len() > 1 {
            e.c[1] = 1;
        } else {
            // p = 2 is excluded, so this is unreachable
            unreachable!();
        }
        Ok(e)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.c
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// Same element known modulo a smaller power of `p`.
    pub fn reduce_precision(&self, m: u32) -> Self {
        let m = m.min(self.m);
        let md = self.p.pow(m);
        RamifiedPadicElement { p: self.p, m, c: self.c.iter().map(|&x| x % md).collect() }
    }

    /// The same residues read at a higher precision.
    pub fn lift_representative(&self, m: u32) -> Result<Self> {
        modulus(self.p, m)?;
        Ok(RamifiedPadicElement { p: self.p, m: m.max(self.m), c: self.c.clone() })
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixed primes");
        let m = self.m.min(other.m);
        (self.reduce_precision(m), other.reduce_precision(m))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let md = a.modulus();
        let c = a.c.iter().zip(&b.c).map(|(&x, &y)| ((x as u128 + y as u128) % md as u128) as u64).collect();
        RamifiedPadicElement { p: a.p, m: a.m, c }
    }

    pub fn neg(&self) -> Self {
        let md = self.modulus();
        RamifiedPadicElement { p: self.p, m: self.m, c: self.c.iter().map(|&x| (md - x) % md).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let md = a.modulus();
        let k = a.c.len();
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, md)) % md;
            }
        }
        // π^{k+i} = -p·π^i
        let mut c = prod[..k].to_vec();
        for i in 0..k - 1 {
            let hi = prod[k + i];
            if hi != 0 {
                let t = mul_mod(hi, a.p % md, md);
                c[i] = (c[i] + md - t) % md;
            }
        }
        RamifiedPadicElement { p: a.p, m: a.m, c }
    }

    pub fn scale(&self, s: u64) -> Self {
        let md = self.modulus();
        let s = s % md;
        RamifiedPadicElement { p: self.p, m: self.m, c: self.c.iter().map(|&x| mul_mod(x, s, md)).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = RamifiedPadicElement::from_int(1, self.p, self.m).expect("valid precision");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// `min_i ((p-1)·ord_p(c_i) + i)`; `None` for zero at this precision.
    pub fn valuation(&self) -> Option<u64> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| {
                let mut k = 0u64;
                let mut x = x;
                while x % self.p == 0 {
                    x /= self.p;
                    k += 1;
                }
                (self.p - 1) * k + i as u64
            })
            .min()
    }

    /// Whether `self - other` has π-valuation at least `k` (as far as the
    /// common precision can tell).
    pub fn congruent_mod_pi_power(&self, other: &Self, k: u64) -> bool {
        self.sub(other).valuation().is_none_or(|v| v >= k)
    }

    /// Exact division by `p`; precision drops by one.
    pub fn div_p(&self) -> Result<Self> {
        if self.m == 0 {
            return Err(Error::Precision("no precision left to divide by p".into()));
        }
        if self.c.iter().any(|&x| x % self.p != 0) {
            return Err(Error::Precision("element is not divisible by p".into()));
        }
        let md = self.p.pow(self.m - 1);
        Ok(RamifiedPadicElement { p: self.p, m: self.m - 1, c: self.c.iter().map(|&x| (x / self.p) % md).collect() })
    }

    /// Inverse of an element congruent to a unit of `Z_p` modulo π.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.c[0] % self.p;
        if c0 == 0 {
            return Err(Error::Precision("element is not a unit".into()));
        }
        let md = self.modulus();
        let inv0 = crate::arith::inv_mod(self.c[0] % md, md).ok_or_else(|| Error::Internal("unit inverse".into()))?;
        // z ← z(2 - u z); the π-adic error squares each round
        let mut z = RamifiedPadicElement::from_residue(inv0, self.p, self.m)?;
        let two = RamifiedPadicElement::from_int(2, self.p, self.m)?;
        let target = (self.p - 1) * self.m as u64;
        let one = RamifiedPadicElement::from_int(1, self.p, self.m)?;
        for _ in 0..64 {
            if self.mul(&z) == one {
                return Ok(z);
            }
            z = z.mul(&two.sub(&self.mul(&z)));
        }
        if self.mul(&z).congruent_mod_pi_power(&one, target) {
            Ok(z)
        } else {
            Err(Error::NonConvergence("unit inverse".into()))
        }
    }

    /// `Σ_{i>=1} c_i π^i` is zero, i.e. the element lies in `Z_p`.
    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|&x| x == 0)
    }
}

impl fmt::Display for RamifiedPadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| match i {
                0 => x.to_string(),
                1 => format!("{x}*pi"),
                _ => format!("{x}*pi^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0 (mod {}^{})", self.p, self.m)
        } else {
            write!(f, "{} (mod {}^{})", parts.join(" + "), self.p, self.m)
        }
    }
}
