//! Elements of Q_p with tracked absolute precision.
//!
//! An element is `p^val * unit + O(p^prec)` where `unit` is prime to `p`
//! and reduced modulo `p^(prec - val)`. An element indistinguishable from
//! zero has `unit == 0` and `val == prec`. The exact zero uses `prec == INF`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub(crate) const INF: i64 = 1 << 60;

fn is_inf(x: i64) -> bool {
    x >= INF / 2
}

/// Prime, cap and a cache of prime powers.
#[derive(Debug)]
pub(crate) struct Base {
    pub p: u64,
    pub p_big: BigInt,
    pub cap: i64,
    powers: Vec<BigInt>,
}

impl Base {
    pub fn new(p: u64, cap: i64) -> Self {
        let p_big = BigInt::from(p);
        let mut powers = Vec::with_capacity((4 * cap + 8) as usize);
        let mut acc = BigInt::one();
        for _ in 0..(4 * cap + 8) {
            powers.push(acc.clone());
            acc *= &p_big;
        }
        Base { p, p_big, cap, powers }
    }

    pub fn pow(&self, k: i64) -> BigInt {
        debug_assert!(k >= 0);
        match self.powers.get(k as usize) {
            Some(x) => x.clone(),
            None => num_traits::pow(self.p_big.clone(), k as usize),
        }
    }

    fn pow_ref(&self, k: i64) -> std::borrow::Cow<'_, BigInt> {
        match self.powers.get(k as usize) {
            Some(x) => std::borrow::Cow::Borrowed(x),
            None => std::borrow::Cow::Owned(num_traits::pow(self.p_big.clone(), k as usize)),
        }
    }

    /// p-adic valuation of a nonzero integer.
    pub fn int_val(&self, n: &BigInt) -> (i64, BigInt) {
        let mut v = 0;
        let mut n = n.clone();
        loop {
            let (q, r) = n.div_rem(&self.p_big);
            if !r.is_zero() {
                return (v, n);
            }
            n = q;
            v += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PAdic {
    pub val: i64,
    pub unit: BigInt,
    pub prec: i64,
}

impl PAdic {
    pub fn exact_zero() -> Self {
        PAdic { val: INF, unit: BigInt::zero(), prec: INF }
    }

    pub fn zero_with_prec(prec: i64) -> Self {
        if is_inf(prec) {
            return Self::exact_zero();
        }
        PAdic { val: prec, unit: BigInt::zero(), prec }
    }

    pub fn from_int(b: &Base, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::exact_zero();
        }
        let (v, u) = b.int_val(n);
        Self::normalized(b, v, u, v + b.cap)
    }

    pub fn from_i64(b: &Base, n: i64) -> Self {
        Self::from_int(b, &BigInt::from(n))
    }

    /// Builds `p^val * raw + O(p^prec)` for an arbitrary integer `raw`.
    pub fn normalized(b: &Base, val: i64, raw: BigInt, prec: i64) -> Self {
        if is_inf(prec) {
            if raw.is_zero() {
                return Self::exact_zero();
            }
            // Only exact zeros carry infinite precision.
            let (v, u) = b.int_val(&raw);
            return Self::normalized(b, val + v, u, val + v + b.cap);
        }
        if prec <= val {
            return Self::zero_with_prec(prec);
        }
        let m = b.pow_ref(prec - val);
        let mut u = raw.mod_floor(&m);
        drop(m);
        if u.is_zero() {
            return Self::zero_with_prec(prec);
        }
        let mut val = val;
        loop {
            let (q, r) = u.div_rem(&b.p_big);
            if !r.is_zero() {
                break;
            }
            u = q;
            val += 1;
        }
        let prec = prec.min(val + b.cap);
        if prec - val < 1 {
            return Self::zero_with_prec(prec);
        }
        let m = b.pow_ref(prec - val);
        if u >= *m {
            u = u.mod_floor(&m);
        }
        PAdic { val, unit: u, prec }
    }

    pub fn is_exact_zero(&self) -> bool {
        is_inf(self.prec)
    }

    /// True when the element cannot be told apart from zero.
    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation; for indistinguishable zeros this is the precision.
    pub fn ord(&self) -> i64 {
        self.val
    }

    pub fn add(&self, other: &Self, b: &Base) -> Self {
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let prec = self.prec.min(other.prec);
        let m = self.val.min(other.val);
        let mut raw = BigInt::zero();
        for x in [self, other] {
            if !x.unit.is_zero() && x.val < prec {
                raw += &x.unit * &*b.pow_ref(x.val - m);
            }
        }
        Self::normalized(b, m, raw, prec)
    }

    pub fn neg(&self, b: &Base) -> Self {
        if self.unit.is_zero() {
            return self.clone();
        }
        Self::normalized(b, self.val, -&self.unit, self.prec)
    }

    pub fn sub(&self, other: &Self, b: &Base) -> Self {
        self.add(&other.neg(b), b)
    }

    pub fn mul(&self, other: &Self, b: &Base) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::exact_zero();
        }
        let prec = (self.prec + other.val).min(other.prec + self.val);
        if self.unit.is_zero() || other.unit.is_zero() {
            return Self::zero_with_prec(prec);
        }
        Self::normalized(b, self.val + other.val, &self.unit * &other.unit, prec)
    }

    pub fn inv(&self, b: &Base) -> Result<Self> {
        if self.unit.is_zero() {
            return Err(Error::DivisionByIndistinguishableZero);
        }
        let rel = self.prec - self.val;
        let m = b.pow(rel);
        let inv = mod_inverse(&self.unit, &m);
        Ok(Self::normalized(b, -self.val, inv, self.prec - 2 * self.val))
    }

    /// Digits of the unit part, least significant first.
    pub fn digits(&self, b: &Base) -> Vec<u64> {
        let mut out = Vec::new();
        let mut u = self.unit.clone();
        let n = self.prec - self.val;
        for _ in 0..n.max(0) {
            let (q, r) = u.div_rem(&b.p_big);
            out.push(r.to_string().parse().unwrap_or(0));
            u = q;
        }
        out
    }

    /// Balanced integer representative when the element is integral.
    pub fn to_balanced_int(&self, b: &Base) -> Option<BigInt> {
        if self.unit.is_zero() {
            return Some(BigInt::zero());
        }
        if self.val < 0 || self.is_exact_zero() {
            return None;
        }
        let m = b.pow(self.prec);
        let n = (&self.unit * b.pow(self.val)).mod_floor(&m);
        let half = &m >> 1;
        Some(if n > half { n - m } else { n })
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.abs().is_one());
    g.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b5() -> Base {
        Base::new(5, 20)
    }

    #[test]
    fn normalization_strips_prime_factors() {
        let b = b5();
        let x = PAdic::from_i64(&b, 50);
        assert_eq!(x.val, 2);
        assert_eq!(x.unit, BigInt::from(2));
        assert_eq!(x.prec, 22);
    }

    #[test]
    fn inverse_tracks_precision() {
        let b = b5();
        let p = PAdic::from_i64(&b, 5);
        let q = p.inv(&b).unwrap();
        assert_eq!(q.val, -1);
        assert_eq!(q.prec, 19);
        let one = p.mul(&q, &b);
        assert_eq!(one.val, 0);
        assert_eq!(one.unit, BigInt::one());
        assert_eq!(one.prec, 20);
    }

    #[test]
    fn exact_zero_absorbs_products() {
        let b = b5();
        let x = PAdic::from_i64(&b, 7).inv(&b).unwrap();
        assert!(PAdic::exact_zero().mul(&x, &b).is_exact_zero());
        assert_eq!(PAdic::exact_zero().add(&x, &b), x);
    }

    #[test]
    fn inexact_zero_has_no_inverse() {
        let b = b5();
        assert_eq!(PAdic::zero_with_prec(3).inv(&b), Err(Error::DivisionByIndistinguishableZero));
    }

    #[test]
    fn balanced_representative() {
        let b = b5();
        let x = PAdic::from_i64(&b, -3);
        assert_eq!(x.to_balanced_int(&b), Some(BigInt::from(-3)));
    }
}
