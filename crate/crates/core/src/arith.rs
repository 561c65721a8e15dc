//! Small modular arithmetic helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `lo..=hi`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&p| is_prime(p)).collect()
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Reduces a rational modulo `m`; `None` when the denominator is not invertible.
pub fn rational_mod(q: &BigRational, m: u64) -> Option<u64> {
    let mb = BigInt::from(m);
    let num = q.numer().mod_floor(&mb).to_u64()?;
    let den = q.denom().mod_floor(&mb).to_u64()?;
    if den.is_zero() {
        return None;
    }
    Some(mul_mod(num, inv_mod(den, m)?, m))
}

/// `p`-adic valuation of a nonzero rational.
pub fn valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |x: &BigInt| {
        let mut x = x.abs();
        let mut k = 0i64;
        while (&x % &pb).is_zero() {
            x /= &pb;
            k += 1;
        }
        k
    };
    Some(count(q.numer()) - count(q.denom()))
}

pub fn lcm_all(xs: impl IntoIterator<Item = u64>) -> u64 {
    xs.into_iter().fold(1, |acc, x| acc.lcm(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn primes() {
        assert_eq!(primes_in(1, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(!is_prime(1));
        assert!(is_prime(97));
        assert!(!is_prime(91));
    }

    #[test]
    fn modular_ops() {
        assert_eq!(pow_mod(2, 5, 25), 7);
        assert_eq!(inv_mod(24, 5), Some(4));
        assert_eq!(inv_mod(10, 5), None);
        let q = BigRational::new(BigInt::from(-1), BigInt::from(24));
        assert_eq!(rational_mod(&q, 5), Some(1));
        assert_eq!(rational_mod(&BigRational::new(BigInt::one(), BigInt::from(5)), 5), None);
    }

    #[test]
    fn valuations() {
        let q = BigRational::new(BigInt::from(45), BigInt::from(2));
        assert_eq!(valuation(&q, 5), Some(1));
        assert_eq!(valuation(&q, 2), Some(-1));
        assert_eq!(valuation(&BigRational::zero(), 3), None);
    }
}
