//! Teichmüller lifts, the Iwasawa-branch logarithm and the exponential series.

use num_rational::Rational64;

use super::padic::{Base, PAdic, INF};
use super::Elem;
use crate::error::{Error, Result};

/// Floor of log_p(n) for n >= 1.
fn floor_log(p: u64, n: u64) -> i64 {
    let mut k = 0;
    let mut acc = p;
    while acc <= n {
        k += 1;
        acc = match acc.checked_mul(p) {
            Some(a) => a,
            None => break,
        };
    }
    k
}

/// The root of unity of order prime to p congruent to a unit `x` modulo the
/// maximal ideal, computed as the fixed point of `y -> y^q` with `q` the size
/// of the residue field. The result is known to the full cap because it only
/// depends on the residue of `x`.
pub fn teichmuller(x: &Elem) -> Result<Elem> {
    if !x.is_unit() {
        return Err(Error::NotAUnit);
    }
    let field = x.field();
    let b = field.base();
    // Residue representative: the lowest digit of each unramified coordinate;
    // for sqrt(p) the residue field is F_p and only the constant term matters.
    let residue: Vec<PAdic> = x
        .coords()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if field.has_sqrt_p() && i > 0 {
                return PAdic::exact_zero();
            }
            if c.is_zero() || c.val > 0 {
                PAdic::exact_zero()
            } else {
                let d = c.digits(b).first().copied().unwrap_or(0);
                PAdic::from_i64(b, d as i64)
            }
        })
        .collect();
    let mut y = Elem::from_coords(field, residue);
    let q = (field.p() as i64).pow(field.ext().residue_degree() as u32);
    for _ in 0..=field.working_cap() + 1 {
        let next = y.pow(q)?;
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Ok(y)
}

/// `log(u)` for `u` in `1 + p Z_p` by the alternating series, truncated once
/// every remaining term has valuation at or above the target precision.
pub fn log_unit_series(u: &Elem) -> Result<Elem> {
    let field = u.field();
    let x = u.to_base()?;
    let b = field.base();
    let z = x.sub(&PAdic::from_i64(b, 1), b);
    Ok(Elem::from_padic(field, log_one_plus(&z, b)?))
}

fn log_one_plus(z: &PAdic, b: &Base) -> Result<PAdic> {
    if z.is_exact_zero() {
        return Ok(PAdic::exact_zero());
    }
    if z.is_zero() {
        return Ok(PAdic::zero_with_prec(z.prec));
    }
    let vz = z.val;
    if vz < 1 {
        return Err(Error::OutsideConvergenceDomain { valuation: vz.to_string() });
    }
    let target = z.prec.min(vz + b.cap);
    let mut sum = PAdic::exact_zero();
    let mut power = z.clone();
    let mut n: i64 = 1;
    loop {
        let bound = n * vz - floor_log(b.p, n as u64);
        if bound >= target {
            break;
        }
        let inv_n = PAdic::from_i64(b, if n % 2 == 1 { n } else { -n }).inv(b)?;
        sum = sum.add(&power.mul(&inv_n, b), b);
        power = power.mul(z, b);
        n += 1;
    }
    Ok(sum.add(&PAdic::zero_with_prec(target), b))
}

/// Iwasawa-type logarithm on Q_p^x with `log(p) = branch`: writing
/// `x = p^v * zeta * u` with `zeta` a root of unity of order prime to p and
/// `u` in `1 + p Z_p`, returns `v * branch + log(u)`.
pub fn iwasawa_log(x: &Elem, branch: &Elem) -> Result<Elem> {
    let field = x.field();
    let b = field.base();
    let xb = x.to_base()?;
    if xb.is_zero() {
        return Err(Error::DivisionByIndistinguishableZero);
    }
    let v = xb.val;
    let unit = PAdic::normalized(b, 0, xb.unit.clone(), xb.prec - v);
    let unit_e = Elem::from_padic(field, unit.clone());
    let omega = teichmuller(&unit_e)?.to_base()?;
    let u = unit.mul(&omega.inv(b)?, b);
    let z = u.sub(&PAdic::from_i64(b, 1), b);
    let series = Elem::from_padic(field, log_one_plus(&z, b)?);
    if v == 0 {
        return Ok(series);
    }
    Ok(series.add(&branch.mul(&Elem::from_i64(field, v))))
}

/// The exponential series, defined when `val(x) > 1/(p-1)`.
pub fn exp_padic(x: &Elem) -> Result<Elem> {
    let field = x.field();
    let b = field.base();
    let e = field.e();
    let p = field.p() as i64;
    let one = Elem::from_i64(field, 1);
    if x.is_exact_zero() {
        return Ok(one);
    }
    let target = x.prec_ord().min(e * field.working_cap());
    if x.is_zero() {
        return Ok(one.truncate_ord(target));
    }
    let ord = x.ord();
    // val(x) = ord / e > 1 / (p - 1)
    if ord * (p - 1) <= e {
        return Err(Error::OutsideConvergenceDomain { valuation: Rational64::new(ord, e).to_string() });
    }
    let mut sum = one.clone();
    let mut term = one;
    let mut n: i64 = 1;
    loop {
        // ord(x^n / n!) >= n*ord - e*(n-1)/(p-1), compared without rounding
        if (n * ord) * (p - 1) - e * (n - 1) >= target * (p - 1) {
            break;
        }
        let inv_n = PAdic::from_i64(b, n).inv(b)?;
        term = term.mul(x).scale_padic(&inv_n);
        sum = sum.add(&term);
        n += 1;
        if n > 4 * (target.min(INF / 4) + 8) {
            break;
        }
    }
    Ok(sum.truncate_ord(target))
}

#[cfg(test)]
fn factorial_val(p: u64, n: u64) -> i64 {
    let mut v = 0;
    let mut q = p;
    while q <= n {
        v += (n / q) as i64;
        q *= p;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtFieldSpec, Field, PrimeConfig};
    use num_bigint::BigInt;

    #[test]
    fn log_of_one_is_zero() {
        let f = Field::qp(5, 20).unwrap();
        let l = f.int(7);
        assert!(iwasawa_log(&f.one(), &l).unwrap().is_zero());
    }

    #[test]
    fn log_of_p_is_branch() {
        let f = Field::qp(5, 20).unwrap();
        let l = f.parse("2 + 3*5 + O(5^15)").unwrap();
        let got = iwasawa_log(&f.int(5), &l).unwrap();
        assert!(got.approx_eq(&l, 0));
        assert_eq!(got.prec_ord(), 15);
    }

    #[test]
    fn log_one_plus_p_matches_direct_summation() {
        // oracle: sum (-1)^(n-1) 5^n / n over rationals, stopping once the
        // valuation of 5^n/n reaches 10, then reduced mod 5^10.
        let f = Field::qp(5, 10).unwrap();
        let got = iwasawa_log(&f.int(6), &f.zero()).unwrap();
        let modulus = BigInt::from(5).pow(10);
        let mut num = BigInt::from(0);
        let mut den = BigInt::from(1);
        for n in 1..=12i64 {
            let vn = factorial_val(5, n as u64) - factorial_val(5, n as u64 - 1);
            if n - vn >= 10 {
                continue;
            }
            let t_num = BigInt::from(5).pow(n as u32) * if n % 2 == 1 { 1 } else { -1 };
            let t_den = BigInt::from(n);
            num = &num * &t_den + &t_num * &den;
            den *= t_den;
        }
        // strip common factors of 5 from the denominator
        while &den % 5 == BigInt::from(0) {
            assert_eq!(&num % 5, BigInt::from(0));
            num /= 5;
            den /= 5;
        }
        let inv = crate::field::padic::mod_inverse(&den, &modulus);
        let expected = num * inv % &modulus;
        let expected = f.parse(&format!("{expected} + O(5^10)")).unwrap();
        assert!(got.congruent(&expected, 10));
        assert!(got.prec_ord() >= 10);
    }

    #[test]
    fn exp_of_zero_and_divergence() {
        let f = Field::qp(3, 20).unwrap();
        assert_eq!(exp_padic(&f.zero()).unwrap(), f.one());
        assert!(matches!(exp_padic(&f.one()), Err(Error::OutsideConvergenceDomain { .. })));
    }

    #[test]
    fn exp_inverts_log_on_principal_units() {
        let f = Field::qp(5, 20).unwrap();
        let u = f.int(26);
        let back = exp_padic(&iwasawa_log(&u, &f.zero()).unwrap()).unwrap();
        assert!(back.congruent(&u, 19));
    }

    #[test]
    fn teichmuller_is_a_root_of_unity() {
        let f = Field::qp(5, 20).unwrap();
        let t = teichmuller(&f.int(2)).unwrap();
        // oracle: iterate x -> x^5 from 2 in integers mod 5^20
        let m = BigInt::from(5).pow(20);
        let mut y = BigInt::from(2);
        for _ in 0..25 {
            y = y.modpow(&BigInt::from(5), &m);
        }
        assert!(t.congruent(&f.parse(&format!("{y}")).unwrap(), 20));
        assert!(t.pow(4).unwrap().approx_eq(&f.one(), 0));
        assert_eq!(teichmuller(&f.one()).unwrap(), f.one());
    }

    #[test]
    fn teichmuller_in_unramified_extension() {
        let ext = ExtFieldSpec::unramified(3, 2).unwrap();
        let f = Field::new(PrimeConfig::new(3, 10).unwrap(), ext).unwrap();
        let w = Elem::generator(&f).unwrap();
        let t = teichmuller(&w).unwrap();
        assert!(t.pow(8).unwrap().approx_eq(&f.one(), 0));
        assert!(t.sub(&w).ord() >= 1);
    }
}
