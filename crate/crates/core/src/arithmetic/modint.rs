//! Residues modulo a prime power `p^m`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest modulus accepted for a sort. Products of two residues are formed
/// in `u128`, so this only bounds table sizes in the enumerators.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization in ascending prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A prime power descriptor `(p, m)` with `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "(u64, u32)", try_from = "(u64, u32)")]
pub struct PrimePower {
    pub p: u64,
    pub m: u32,
}

impl From<PrimePower> for (u64, u32) {
    fn from(s: PrimePower) -> Self {
        (s.p, s.m)
    }
}

impl TryFrom<(u64, u32)> for PrimePower {
    type Error = Error;
    fn try_from((p, m): (u64, u32)) -> Result<Self> {
        PrimePower::new(p, m)
    }
}

impl PrimePower {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return invalid(format!("{p} is not prime"));
        }
        if m == 0 {
            return invalid("prime power exponent must be at least 1");
        }
        match p.checked_pow(m) {
            Some(q) if q <= MAX_MODULUS => Ok(PrimePower { p, m }),
            _ => invalid(format!("{p}^{m} exceeds the supported modulus range")),
        }
    }

    /// Splits `q` into `(p, m)` if it is a prime power.
    pub fn from_modulus(q: u64) -> Result<Self> {
        match factorize(q).as_slice() {
            [(p, m)] => PrimePower::new(*p, *m),
            _ => invalid(format!("{q} is not a prime power")),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// `p^k` for `k <= m`.
    pub fn p_pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }

    /// Euler's totient `p^m - p^(m-1)`, the degree of the cyclotomic modulus.
    pub fn totient(&self) -> u64 {
        self.modulus() - self.p_pow(self.m - 1)
    }

    pub fn reduce(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus() as i128) as u64
    }

    /// p-adic valuation of a residue; `0` has valuation `m`.
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.modulus();
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus() as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let q = self.modulus();
        ((a % q) + q - (b % q)) % q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus() as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    /// Inverse of a unit (valuation 0).
    pub fn inverse(&self, a: u64) -> Option<u64> {
        let q = self.modulus() as i128;
        let (mut r0, mut r1) = (q, (a as i128).rem_euclid(q));
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        (r0 == 1).then(|| s0.rem_euclid(q) as u64)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}", self.modulus())
    }
}

/// An element of `Z_{p^m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModInt {
    value: u64,
    modulus: PrimePower,
}

impl ModInt {
    pub fn new(value: i128, modulus: PrimePower) -> Self {
        ModInt { value: modulus.reduce(value), modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn valuation(&self) -> u32 {
        self.modulus.valuation(self.value)
    }

    pub fn inverse(&self) -> Result<ModInt> {
        self.modulus
            .inverse(self.value)
            .map(|v| ModInt { value: v, modulus: self.modulus })
            .ok_or(Error::DivisionByZero)
    }

    fn check(&self, other: &ModInt) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli in ModInt arithmetic");
    }
}

impl Add for ModInt {
    type Output = ModInt;
    fn add(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        ModInt { value: self.modulus.add(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Sub for ModInt {
    type Output = ModInt;
    fn sub(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        ModInt { value: self.modulus.sub(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Mul for ModInt {
    type Output = ModInt;
    fn mul(self, rhs: ModInt) -> ModInt {
        self.check(&rhs);
        ModInt { value: self.modulus.mul(self.value, rhs.value), modulus: self.modulus }
    }
}

impl Neg for ModInt {
    type Output = ModInt;
    fn neg(self) -> ModInt {
        ModInt { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus.modulus())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factorization() {
        assert!(is_prime(2) && is_prime(3) && is_prime(97));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(0));
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(9), vec![(3, 2)]);
    }

    #[test]
    fn prime_power_validation() {
        assert!(PrimePower::new(4, 1).is_err());
        assert!(PrimePower::new(2, 0).is_err());
        assert_eq!(PrimePower::from_modulus(8).unwrap(), PrimePower { p: 2, m: 3 });
        assert!(PrimePower::from_modulus(6).is_err());
        assert_eq!(PrimePower::new(3, 2).unwrap().totient(), 6);
    }

    #[test]
    fn residue_arithmetic() {
        let z4 = PrimePower::new(2, 2).unwrap();
        let three = ModInt::new(3, z4);
        assert_eq!((three * three).value(), 1);
        assert_eq!(three.inverse().unwrap().value(), 3);
        assert_eq!(ModInt::new(2, z4).inverse(), Err(Error::DivisionByZero));
        assert_eq!((-ModInt::new(1, z4)).value(), 3);
        assert_eq!(ModInt::new(-5, z4).value(), 3);
        assert_eq!(z4.valuation(0), 2);
        assert_eq!(z4.valuation(2), 1);
        assert_eq!(z4.valuation(3), 0);
    }

    #[test]
    fn serde_shape() {
        let s = PrimePower::new(3, 2).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[3,2]");
        let back: PrimePower = serde_json::from_str("[3,2]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PrimePower>("[4,1]").is_err());
    }
}
