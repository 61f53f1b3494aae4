//! Capped-precision arithmetic in Q_p and in the finite extensions the
//! lifting examples need: unramified extensions of degree `f` and `Q_p(sqrt p)`.

mod elem;
mod literal;
pub(crate) mod padic;
mod series;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use elem::Elem;
pub use literal::parse_literal;
pub use series::{exp_padic, iwasawa_log, log_unit_series, teichmuller};

use crate::error::{Error, Result};
use padic::{Base, PAdic};

/// Default absolute precision, in powers of p.
pub const DEFAULT_CAP: i64 = 20;
/// Digits dropped when comparing two computed values.
pub const DEFAULT_SLACK: i64 = 2;
/// Extra relative digits carried by exact inputs beyond the nominal cap.
/// Ill-conditioned steps (eliminations with small pivots, long products of
/// transvections) eat into these first; tracked precision stays honest.
pub const GUARD_DIGITS: i64 = 40;

/// The prime and the default precision cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeConfig {
    pub p: u64,
    pub cap: i64,
}

impl PrimeConfig {
    pub fn new(p: u64, cap: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        if cap < 4 {
            return Err(Error::InvalidCap(cap));
        }
        Ok(PrimeConfig { p, cap })
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Which coefficient field E is in use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtFieldSpec {
    Base,
    /// `Q_p[w]/(w^f + m_{f-1} w^{f-1} + ... + m_0)`; `modulus` lists `m_0..m_{f-1}`.
    Unramified {
        f: usize,
        modulus: Vec<i64>,
    },
    /// `Q_p[s]/(s^2 - p)`.
    SqrtP,
}

impl ExtFieldSpec {
    /// The unramified extension of degree `f` whose modulus is the
    /// lexicographically first monic irreducible polynomial mod p.
    pub fn unramified(p: u64, f: usize) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidExtension("degree must be positive".into()));
        }
        if f == 1 {
            return Ok(ExtFieldSpec::Base);
        }
        let total = (p as u128).pow(f as u32);
        for code in 0..total {
            let mut c = code;
            let mut modulus = Vec::with_capacity(f);
            for _ in 0..f {
                modulus.push((c % p as u128) as i64);
                c /= p as u128;
            }
            if modulus[0] != 0 && irreducible_mod_p(&modulus, p) {
                return Ok(ExtFieldSpec::Unramified { f, modulus });
            }
        }
        Err(Error::InvalidExtension(format!("no irreducible polynomial of degree {f}")))
    }

    pub fn degree(&self) -> usize {
        match self {
            ExtFieldSpec::Base => 1,
            ExtFieldSpec::Unramified { f, .. } => *f,
            ExtFieldSpec::SqrtP => 2,
        }
    }

    pub fn ramification(&self) -> i64 {
        match self {
            ExtFieldSpec::SqrtP => 2,
            _ => 1,
        }
    }

    pub fn residue_degree(&self) -> usize {
        match self {
            ExtFieldSpec::Unramified { f, .. } => *f,
            _ => 1,
        }
    }

    fn validate(&self, p: u64) -> Result<()> {
        if let ExtFieldSpec::Unramified { f, modulus } = self {
            if modulus.len() != *f || *f < 2 {
                return Err(Error::InvalidExtension(format!("modulus needs {f} coefficients, got {}", modulus.len())));
            }
            if !irreducible_mod_p(modulus, p) {
                return Err(Error::InvalidExtension(format!("modulus {modulus:?} is reducible mod {p}")));
            }
        }
        Ok(())
    }
}

/// Irreducibility of the monic polynomial `x^f + sum m_i x^i` over F_p,
/// by checking `gcd(x^(p^i) - x, m) = 1` for `i <= f/2`.
fn irreducible_mod_p(modulus: &[i64], p: u64) -> bool {
    let f = modulus.len();
    let p = p as i128;
    let mut m: Vec<i128> = modulus.iter().map(|&c| (c as i128).rem_euclid(p)).collect();
    m.push(1);
    let mulmod = |a: &[i128], b: &[i128]| -> Vec<i128> {
        let mut r = vec![0i128; 2 * f];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        for k in (f..2 * f).rev() {
            let c = r[k];
            if c != 0 {
                for i in 0..f {
                    r[k - f + i] = (r[k - f + i] - c * m[i]).rem_euclid(p);
                }
                r[k] = 0;
            }
        }
        r.truncate(f);
        r
    };
    let powmod = |a: &[i128], mut e: u128| -> Vec<i128> {
        let mut acc = vec![0i128; f];
        acc[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &base);
            }
            base = mulmod(&base, &base);
            e >>= 1;
        }
        acc
    };
    let mut x = vec![0i128; f];
    x[1 % f] = 1;
    let mut xq = x.clone();
    for _ in 1..=f / 2 {
        xq = powmod(&xq, p as u128);
        let mut d = xq.clone();
        d[1] = (d[1] - 1).rem_euclid(p);
        if poly_gcd_degree(d, m.clone(), p) > 0 {
            return false;
        }
    }
    true
}

fn poly_gcd_degree(mut a: Vec<i128>, mut b: Vec<i128>, p: i128) -> usize {
    let trim = |v: &mut Vec<i128>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let inv = |x: i128| -> i128 {
        let mut r = 1i128;
        let mut base = x.rem_euclid(p);
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        r
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        while a.len() >= b.len() && !a.is_empty() {
            let c = a[a.len() - 1] * inv(b[b.len() - 1]) % p;
            let shift = a.len() - b.len();
            for i in 0..b.len() {
                a[shift + i] = (a[shift + i] - c * b[i]).rem_euclid(p);
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

pub(crate) struct FieldInner {
    pub config: PrimeConfig,
    pub ext: ExtFieldSpec,
    pub base: Base,
    pub modulus: Vec<PAdic>,
}

/// A coefficient field E together with its precision cap. Cheap to clone.
#[derive(Clone)]
pub struct Field(pub(crate) Arc<FieldInner>);

impl Field {
    pub fn new(config: PrimeConfig, ext: ExtFieldSpec) -> Result<Self> {
        PrimeConfig::new(config.p, config.cap)?;
        ext.validate(config.p)?;
        let base = Base::new(config.p, config.cap + GUARD_DIGITS);
        let modulus = match &ext {
            ExtFieldSpec::Unramified { modulus, .. } => modulus.iter().map(|&m| PAdic::from_i64(&base, m)).collect(),
            _ => Vec::new(),
        };
        Ok(Field(Arc::new(FieldInner { config, ext, base, modulus })))
    }

    /// Q_p with the given cap.
    pub fn qp(p: u64, cap: i64) -> Result<Self> {
        Field::new(PrimeConfig::new(p, cap)?, ExtFieldSpec::Base)
    }

    pub fn p(&self) -> u64 {
        self.0.config.p
    }

    pub fn cap(&self) -> i64 {
        self.0.config.cap
    }

    /// Relative precision used internally: `cap + GUARD_DIGITS`.
    pub fn working_cap(&self) -> i64 {
        self.0.base.cap
    }

    pub fn config(&self) -> PrimeConfig {
        self.0.config
    }

    pub fn ext(&self) -> &ExtFieldSpec {
        &self.0.ext
    }

    pub fn degree(&self) -> usize {
        self.0.ext.degree()
    }

    /// Ramification index e; valuations are multiples of 1/e.
    pub fn e(&self) -> i64 {
        self.0.ext.ramification()
    }

    pub fn has_sqrt_p(&self) -> bool {
        matches!(self.0.ext, ExtFieldSpec::SqrtP)
    }

    /// The same field with a different cap.
    pub fn with_cap(&self, cap: i64) -> Result<Self> {
        Field::new(PrimeConfig::new(self.p(), cap)?, self.0.ext.clone())
    }

    pub(crate) fn base(&self) -> &Base {
        &self.0.base
    }

    pub fn zero(&self) -> Elem {
        Elem::zero(self)
    }

    pub fn one(&self) -> Elem {
        Elem::from_i64(self, 1)
    }

    pub fn int(&self, n: i64) -> Elem {
        Elem::from_i64(self, n)
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<Elem> {
        Elem::from_rational(self, num, den)
    }

    pub fn parse(&self, s: &str) -> Result<Elem> {
        parse_literal(self, s)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.config == other.0.config && self.0.ext == other.0.ext)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, cap={}, {:?})", self.p(), self.cap(), self.0.ext)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(5) && is_prime(97));
        assert!(!is_prime(1) && !is_prime(9) && !is_prime(91));
        assert_eq!(PrimeConfig::new(9, 20), Err(Error::InvalidPrime(9)));
        assert_eq!(PrimeConfig::new(5, 3), Err(Error::InvalidCap(3)));
    }

    #[test]
    fn irreducibility() {
        // x^2 + 1 is irreducible mod 3 but not mod 5.
        assert!(irreducible_mod_p(&[1, 0], 3));
        assert!(!irreducible_mod_p(&[1, 0], 5));
        // x^3 + x + 1 is irreducible mod 2.
        assert!(irreducible_mod_p(&[1, 1, 0], 2));
        // x^4 + 1 = (x^2+x+2)(x^2+2x+2) mod 3 has no roots but is reducible.
        assert!(!irreducible_mod_p(&[1, 0, 0, 0], 3));
    }

    #[test]
    fn default_unramified_modulus() {
        let e = ExtFieldSpec::unramified(5, 2).unwrap();
        assert_eq!(e, ExtFieldSpec::Unramified { f: 2, modulus: vec![2, 0] });
        let bad = ExtFieldSpec::Unramified { f: 2, modulus: vec![1, 0] };
        assert!(Field::new(PrimeConfig::new(5, 10).unwrap(), bad).is_err());
    }
}
