use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Rational64;

use super::padic::{PAdic, INF};
use super::{ExtFieldSpec, Field};
use crate::error::{Error, Result};

/// An element of E, stored as Q_p-coordinates in the basis `1, w, ..., w^(f-1)`
/// (unramified) or `1, s` with `s^2 = p`. Each coordinate tracks its own precision.
#[derive(Clone)]
pub struct Elem {
    field: Field,
    c: Vec<PAdic>,
}

impl Elem {
    pub(crate) fn from_coords(field: &Field, c: Vec<PAdic>) -> Self {
        debug_assert_eq!(c.len(), field.degree());
        Elem { field: field.clone(), c }
    }

    pub(crate) fn from_padic(field: &Field, x: PAdic) -> Self {
        let mut c = vec![PAdic::exact_zero(); field.degree()];
        c[0] = x;
        Elem { field: field.clone(), c }
    }

    pub(crate) fn coords(&self) -> &[PAdic] {
        &self.c
    }

    /// The exact zero.
    pub fn zero(field: &Field) -> Self {
        Elem { field: field.clone(), c: vec![PAdic::exact_zero(); field.degree()] }
    }

    pub fn from_int(field: &Field, n: &BigInt) -> Self {
        Self::from_padic(field, PAdic::from_int(field.base(), n))
    }

    pub fn from_i64(field: &Field, n: i64) -> Self {
        Self::from_padic(field, PAdic::from_i64(field.base(), n))
    }

    pub fn from_rational(field: &Field, num: i64, den: i64) -> Result<Self> {
        let n = Self::from_i64(field, num);
        let d = Self::from_i64(field, den);
        n.div(&d)
    }

    pub fn from_ratio(field: &Field, r: Rational64) -> Result<Self> {
        Self::from_rational(field, *r.numer(), *r.denom())
    }

    /// `0 + O(pi^n)` where `pi` is a uniformizer and `n` is measured in units of `1/e`.
    pub fn zero_with_ord_prec(field: &Field, n: i64) -> Self {
        let c = match field.ext() {
            ExtFieldSpec::SqrtP => vec![PAdic::zero_with_prec(div_ceil(n, 2)), PAdic::zero_with_prec(div_ceil(n - 1, 2))],
            _ => vec![PAdic::zero_with_prec(n); field.degree()],
        };
        Elem { field: field.clone(), c }
    }

    /// The generator `w` (unramified) or `s = sqrt(p)`; `None` over Q_p.
    pub fn generator(field: &Field) -> Option<Self> {
        if field.degree() < 2 {
            return None;
        }
        let mut c = vec![PAdic::exact_zero(); field.degree()];
        c[1] = PAdic::from_i64(field.base(), 1);
        Some(Elem { field: field.clone(), c })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "arithmetic between elements of different fields");
    }

    /// Indistinguishable from zero at the current precision.
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_exact_zero())
    }

    fn basis_ord(&self, i: usize) -> i64 {
        match self.field.ext() {
            ExtFieldSpec::SqrtP => i as i64,
            _ => 0,
        }
    }

    /// Absolute precision in units of `1/e` (the uniformizer valuation).
    pub fn prec_ord(&self) -> i64 {
        let e = self.field.e();
        let m = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| if x.is_exact_zero() { INF } else { e * x.prec + self.basis_ord(i) })
            .min()
            .unwrap_or(INF);
        m.min(INF)
    }

    /// Valuation in units of `1/e`; an indistinguishable zero reports its precision.
    pub fn ord(&self) -> i64 {
        let e = self.field.e();
        let m = self.c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| e * x.val + self.basis_ord(i)).min();
        m.unwrap_or(INF).min(self.prec_ord())
    }

    /// Valuation normalized so that `val(p) = 1`.
    pub fn valuation(&self) -> Rational64 {
        Rational64::new(self.ord().min(INF), self.field.e())
    }

    /// Absolute precision: the element is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> Rational64 {
        Rational64::new(self.prec_ord(), self.field.e())
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.ord() == 0
    }

    /// True when every non-constant coordinate is an exact zero or
    /// indistinguishable from zero.
    pub fn is_in_base(&self) -> bool {
        self.c.iter().skip(1).all(|x| x.is_zero())
    }

    pub(crate) fn to_base(&self) -> Result<PAdic> {
        if !self.is_in_base() {
            return Err(Error::NotInBaseField);
        }
        Ok(self.c[0].clone())
    }

    /// Balanced integer representative if the element is an integral element of Q_p.
    pub fn to_balanced_int(&self) -> Option<BigInt> {
        let b = self.to_base().ok()?;
        b.to_balanced_int(self.field.base())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_balanced_int().and_then(|n| i64::try_from(n).ok())
    }

    pub fn neg(&self) -> Self {
        let b = self.field.base();
        Elem { field: self.field.clone(), c: self.c.iter().map(|x| x.neg(b)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let b = self.field.base();
        Elem { field: self.field.clone(), c: self.c.iter().zip(&other.c).map(|(x, y)| x.add(y, b)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_field(other);
        let b = self.field.base();
        Elem { field: self.field.clone(), c: self.c.iter().zip(&other.c).map(|(x, y)| x.sub(y, b)).collect() }
    }

    pub(crate) fn scale_padic(&self, k: &PAdic) -> Self {
        let b = self.field.base();
        Elem { field: self.field.clone(), c: self.c.iter().map(|x| x.mul(k, b)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let b = self.field.base();
        let c = match self.field.ext() {
            ExtFieldSpec::Base => vec![self.c[0].mul(&other.c[0], b)],
            ExtFieldSpec::SqrtP => {
                let (a0, a1) = (&self.c[0], &self.c[1]);
                let (b0, b1) = (&other.c[0], &other.c[1]);
                let p = PAdic::from_i64(b, b.p as i64);
                let c0 = a0.mul(b0, b).add(&a1.mul(b1, b).mul(&p, b), b);
                let c1 = a0.mul(b1, b).add(&a1.mul(b0, b), b);
                vec![c0, c1]
            }
            ExtFieldSpec::Unramified { f, .. } => {
                let f = *f;
                let mut r = vec![PAdic::exact_zero(); 2 * f - 1];
                for (i, x) in self.c.iter().enumerate() {
                    if x.is_exact_zero() {
                        continue;
                    }
                    for (j, y) in other.c.iter().enumerate() {
                        if y.is_exact_zero() {
                            continue;
                        }
                        r[i + j] = r[i + j].add(&x.mul(y, b), b);
                    }
                }
                let modulus = &self.field.0.modulus;
                for k in (f..2 * f - 1).rev() {
                    let top = std::mem::replace(&mut r[k], PAdic::exact_zero());
                    if top.is_exact_zero() {
                        continue;
                    }
                    for (i, m) in modulus.iter().enumerate() {
                        r[k - f + i] = r[k - f + i].sub(&top.mul(m, b), b);
                    }
                }
                r.truncate(f);
                r
            }
        };
        Elem { field: self.field.clone(), c }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByIndistinguishableZero);
        }
        let b = self.field.base();
        match self.field.ext() {
            ExtFieldSpec::Base => Ok(Elem::from_padic(&self.field, self.c[0].inv(b)?)),
            ExtFieldSpec::SqrtP => {
                let conj = Elem { field: self.field.clone(), c: vec![self.c[0].clone(), self.c[1].neg(b)] };
                let norm = self.mul(&conj).to_base()?;
                Ok(conj.scale_padic(&norm.inv(b)?))
            }
            ExtFieldSpec::Unramified { f, .. } => {
                // Solve (multiplication by self) * y = 1 over Q_p.
                let f = *f;
                let mut cols = Vec::with_capacity(f);
                let mut basis = Elem::from_i64(&self.field, 1);
                let w = Elem::generator(&self.field).expect("degree >= 2");
                for _ in 0..f {
                    cols.push(self.mul(&basis).c);
                    basis = basis.mul(&w);
                }
                let mut a: Vec<Vec<PAdic>> = (0..f).map(|i| (0..f).map(|j| cols[j][i].clone()).collect()).collect();
                let mut rhs: Vec<PAdic> = (0..f).map(|i| if i == 0 { PAdic::from_i64(b, 1) } else { PAdic::exact_zero() }).collect();
                let y = solve_padic(&mut a, &mut rhs, b)?;
                Ok(Elem { field: self.field.clone(), c: y })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut acc = Elem::from_i64(&self.field, 1);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Congruence modulo `p^digits` (valuation scale). An indistinguishable
    /// difference only counts up to its own precision.
    pub fn congruent(&self, other: &Self, digits: i64) -> bool {
        self.sub(other).ord() >= digits * self.field.e()
    }

    /// Equality up to `slack` digits below the smaller of the two precisions.
    pub fn approx_eq(&self, other: &Self, slack: i64) -> bool {
        let target = self.prec_ord().min(other.prec_ord()) - slack * self.field.e();
        self.sub(other).ord() >= target
    }

    /// Drops the precision to at most `ord` (units of `1/e`).
    pub fn truncate_ord(&self, n: i64) -> Self {
        self.add(&Elem::zero_with_ord_prec(&self.field, n))
    }

    /// Reinterprets the element in another field with the same prime and extension.
    pub fn to_field(&self, field: &Field) -> Result<Self> {
        if field.p() != self.field.p() || field.ext() != self.field.ext() {
            return Err(Error::FieldMismatch);
        }
        let b = field.base();
        let c = self
            .c
            .iter()
            .map(|x| if x.is_exact_zero() { PAdic::exact_zero() } else { PAdic::normalized(b, x.val, x.unit.clone(), x.prec) })
            .collect();
        Ok(Elem { field: field.clone(), c })
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Gaussian elimination over Q_p with minimal-valuation pivots.
pub(crate) fn solve_padic(a: &mut [Vec<PAdic>], rhs: &mut [PAdic], b: &super::padic::Base) -> Result<Vec<PAdic>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].ord())
            .ok_or_else(|| Error::PrecisionLoss("pivot indistinguishable from zero".into()))?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = a[col][col].inv(b)?;
        for r in 0..n {
            if r == col || a[r][col].is_exact_zero() {
                continue;
            }
            let factor = a[r][col].mul(&inv, b);
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = x.sub(&factor.mul(y, b), b);
            }
            let t = factor.mul(&rhs[col], b);
            rhs[r] = rhs[r].sub(&t, b);
        }
    }
    Ok((0..n).map(|i| rhs[i].mul(&a[i][i].inv(b).expect("pivot"), b)).collect())
}

impl PartialEq for Elem {
    /// Equality of the represented residues (same field, same digits, same precision).
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.c == other.c
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::literal::format_elem(self))
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::literal::format_elem(self))
    }
}

impl<'a> Add<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn add(self, rhs: &'a Elem) -> Elem {
        Elem::add(self, rhs)
    }
}

impl<'a> Sub<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn sub(self, rhs: &'a Elem) -> Elem {
        Elem::sub(self, rhs)
    }
}

impl<'a> Mul<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn mul(self, rhs: &'a Elem) -> Elem {
        Elem::mul(self, rhs)
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeConfig;

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    #[test]
    fn additive_inverse_is_zero_at_full_precision() {
        let f = q5();
        let z = f.one().add(&f.int(-1));
        assert!(z.is_zero());
        assert!(z.prec_ord() >= 20);
    }

    #[test]
    fn p_times_inverse_is_one() {
        let f = q5();
        let p = f.int(5);
        let one = p.mul(&p.inv().unwrap());
        assert!(one.approx_eq(&f.one(), 0));
        assert_eq!(one.ord(), 0);
    }

    #[test]
    fn one_plus_p_times_one_minus_p_matches_integer_arithmetic() {
        let f = q5();
        let x = f.int(6).mul(&f.int(-4));
        // oracle: (1+5)(1-5) = -24 = 1 - 25 computed in integers mod 5^N
        let modulus = BigInt::from(5).pow(f.working_cap() as u32);
        let expected = (BigInt::from(1) - BigInt::from(25) + &modulus) % &modulus;
        let digits_x = x.coords()[0].digits(f.base());
        let mut e = expected;
        for d in digits_x {
            let r: u64 = (&e % 5u32).try_into().unwrap();
            assert_eq!(d, r);
            e /= 5u32;
        }
    }

    #[test]
    fn sqrt_p_squares_to_p() {
        let f = Field::new(PrimeConfig::new(3, 12).unwrap(), ExtFieldSpec::SqrtP).unwrap();
        let s = Elem::generator(&f).unwrap();
        assert_eq!(s.ord(), 1);
        assert_eq!(s.valuation(), Rational64::new(1, 2));
        assert!(s.mul(&s).approx_eq(&f.int(3), 0));
        let x = f.int(2).add(&s);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).approx_eq(&f.one(), 1));
    }

    #[test]
    fn unramified_inverse_and_valuation() {
        let ext = ExtFieldSpec::unramified(5, 2).unwrap();
        let f = Field::new(PrimeConfig::new(5, 12).unwrap(), ext).unwrap();
        let w = Elem::generator(&f).unwrap();
        assert!(w.mul(&w).approx_eq(&f.int(-2), 0));
        let x = f.int(5).mul(&f.int(1).add(&w));
        assert_eq!(x.ord(), 1);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).approx_eq(&f.one(), 1));
        assert_eq!(y.ord(), -1);
    }

    #[test]
    fn valuation_is_additive() {
        let f = q5();
        let x = f.int(50);
        let y = f.rational(3, 125).unwrap();
        assert_eq!(x.mul(&y).ord(), x.ord() + y.ord());
    }
}
