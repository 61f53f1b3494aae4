//! Logarithms on the diagonal torus `T = (Q_p^x)^n`.
//!
//! A logarithm is given by an integer character matrix `A` (row `i` holds the
//! exponents of the character `zeta_i`), one branch value `L_i = log(p)` per
//! character, and an optional correction `C` acting on valuation vectors:
//!
//! ```text
//! log(t) = A^-1 (log_{L_i}(zeta_i(t)))_i + C v(t)
//! ```
//!
//! Any such map equals the branch-zero coordinatewise logarithm plus
//! `D v(t)` with `D = A^-1 diag(L) A + C`; that matrix is what differences
//! and restrictions are computed from.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{iwasawa_log, Elem, Field};
use crate::matrix::MatrixE;
use crate::root_data::GroupElement;

#[derive(Debug, Clone, PartialEq)]
pub struct TorusLogarithm {
    field: Field,
    a: Vec<Vec<i64>>,
    a_inv: Vec<Vec<BigRational>>,
    branches: Vec<Elem>,
    correction: Option<MatrixE>,
}

/// The difference of two logarithms: `t -> D v(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDifference {
    pub matrix: MatrixE,
}

impl LogDifference {
    pub fn apply(&self, valuations: &[i64]) -> Vec<Elem> {
        let f = self.matrix.field();
        let v: Vec<Elem> = valuations.iter().map(|&x| f.int(x)).collect();
        self.matrix.mul_vec(&v)
    }

    pub fn evaluate(&self, t: &GroupElement) -> Result<Vec<Elem>> {
        Ok(self.apply(&valuation_vector(t)?))
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

fn rational_inverse(a: &[Vec<i64>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, piv);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let factor = m[r][c].clone();
                let pivot_row = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &factor * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn rational_elem(field: &Field, q: &BigRational) -> Result<Elem> {
    Elem::from_int(field, q.numer()).div(&Elem::from_int(field, q.denom()))
}

/// Valuations of the diagonal entries of a diagonal element with entries in Q_p.
pub fn valuation_vector(t: &GroupElement) -> Result<Vec<i64>> {
    if !t.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    t.diagonal_entries()
        .iter()
        .map(|x| {
            if !x.is_in_base() {
                return Err(Error::NotInBaseField);
            }
            if x.is_zero() {
                return Err(Error::DivisionByIndistinguishableZero);
            }
            Ok(x.ord() / x.field().e())
        })
        .collect()
}

impl TorusLogarithm {
    pub fn new(field: &Field, a: Vec<Vec<i64>>, branches: Vec<Elem>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLog("A must be a nonempty square matrix".into()));
        }
        if branches.len() != n {
            return Err(Error::InvalidLog(format!("expected {n} branch values, got {}", branches.len())));
        }
        if branches.iter().any(|b| b.field() != field) {
            return Err(Error::FieldMismatch);
        }
        let a_inv = rational_inverse(&a).ok_or_else(|| Error::InvalidLog("det(A) = 0".into()))?;
        Ok(TorusLogarithm { field: field.clone(), a, a_inv, branches, correction: None })
    }

    /// `A = I`: coordinatewise `log_{L_i}`.
    pub fn standard(field: &Field, branches: Vec<Elem>) -> Result<Self> {
        let n = branches.len();
        let a = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Self::new(field, a, branches)
    }

    pub fn with_correction(mut self, c: MatrixE) -> Result<Self> {
        let n = self.rank();
        if c.rows() != n || c.cols() != n {
            return Err(Error::InvalidLog(format!("correction must be {n}x{n}")));
        }
        self.correction = if c.is_exact_zero_matrix() { None } else { Some(c) };
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn branches(&self) -> &[Elem] {
        &self.branches
    }

    pub fn correction(&self) -> Option<&MatrixE> {
        self.correction.as_ref()
    }

    pub fn a_inverse(&self) -> Result<MatrixE> {
        let n = self.rank();
        let mut m = MatrixE::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                if !self.a_inv[i][j].is_zero() {
                    m[(i, j)] = rational_elem(&self.field, &self.a_inv[i][j])?;
                }
            }
        }
        Ok(m)
    }

    fn a_matrix(&self) -> MatrixE {
        let n = self.rank();
        MatrixE::from_fn(&self.field, n, n, |i, j| if self.a[i][j] == 0 { self.field.zero() } else { self.field.int(self.a[i][j]) })
    }

    /// `zeta(t)`: the characters given by the rows of `A`.
    pub fn characters(&self, t: &GroupElement) -> Result<Vec<Elem>> {
        if !t.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        let d = t.diagonal_entries();
        if d.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!("torus of rank {} vs element of size {}", self.rank(), d.len())));
        }
        self.a
            .iter()
            .map(|row| row.iter().zip(&d).try_fold(self.field.one(), |acc, (&e, x)| if e == 0 { Ok(acc) } else { Ok(acc.mul(&x.pow(e)?)) }))
            .collect()
    }

    /// The logarithm of a diagonal element, as a vector in `t_E = E^n`.
    pub fn evaluate(&self, t: &GroupElement) -> Result<Vec<Elem>> {
        let zeta = self.characters(t)?;
        let logs = zeta.iter().zip(&self.branches).map(|(z, l)| iwasawa_log(z, l)).collect::<Result<Vec<_>>>()?;
        let n = self.rank();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.field.zero();
            for (j, lj) in logs.iter().enumerate() {
                let q = &self.a_inv[i][j];
                if q.is_zero() {
                    continue;
                }
                let term = if q.denom().is_one() && q.numer().abs() <= BigInt::from(1) {
                    if q.numer().is_positive() {
                        lj.clone()
                    } else {
                        lj.neg()
                    }
                } else {
                    lj.mul(&rational_elem(&self.field, q)?)
                };
                acc = acc.add(&term);
            }
            out.push(acc);
        }
        if let Some(c) = &self.correction {
            let v = valuation_vector(t)?;
            let cv = LogDifference { matrix: c.clone() }.apply(&v);
            out = out.iter().zip(&cv).map(|(x, y)| x.add(y)).collect();
        }
        Ok(out)
    }

    /// `evaluate` as a diagonal matrix.
    pub fn evaluate_matrix(&self, t: &GroupElement) -> Result<MatrixE> {
        Ok(MatrixE::diagonal(&self.field, &self.evaluate(t)?))
    }

    /// `D` with `log(t) = log_0(t) + D v(t)` where `log_0` is the branch-zero coordinatewise log.
    pub fn valuation_part(&self) -> Result<MatrixE> {
        let l = MatrixE::diagonal(&self.field, &self.branches);
        let d = self.a_inverse()?.mul(&l).mul(&self.a_matrix());
        Ok(match &self.correction {
            Some(c) => d.add(c),
            None => d,
        })
    }

    /// Adds a valuation-linear map to the logarithm.
    pub fn add_difference(&self, diff: &LogDifference) -> Result<Self> {
        let c = match &self.correction {
            Some(c) => c.add(&diff.matrix),
            None => diff.matrix.clone(),
        };
        self.clone().with_correction(c)
    }

    /// Restriction along the subtorus `s -> (prod_k s_k^(S_jk))_j`. The
    /// restriction exists exactly when `D S` has columns in the image of `S`.
    pub fn restrict_to_subtorus(&self, embedding: &[Vec<i64>]) -> Result<Self> {
        let n = self.rank();
        if embedding.len() != n {
            return Err(Error::DimensionMismatch(format!("embedding needs {n} rows")));
        }
        let r = embedding.first().map(|row| row.len()).unwrap_or(0);
        if r == 0 || embedding.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch("embedding rows must have equal positive length".into()));
        }
        let f = &self.field;
        let s = MatrixE::from_fn(f, n, r, |i, j| f.int(embedding[i][j]));
        if s.rank()? != r {
            return Err(Error::InvalidLog("embedding is not injective on cocharacters".into()));
        }
        let ds = self.valuation_part()?.mul(&s);
        let rows = s.transpose().column_basis()?;
        let s_sq = MatrixE::from_fn(f, r, r, |i, j| s[(rows[i], j)].clone());
        let ds_sq = MatrixE::from_fn(f, r, r, |i, j| ds[(rows[i], j)].clone());
        let d_s = s_sq.inverse()?.mul(&ds_sq);
        let slack = 2;
        if !s.mul(&d_s).agrees_to(&ds, f.cap() - slack) {
            return Err(Error::NotTangentToSubtorus);
        }
        let branches: Vec<Elem> = (0..r).map(|i| d_s[(i, i)].clone()).collect();
        let off = MatrixE::from_fn(f, r, r, |i, j| if i == j { f.zero() } else { d_s[(i, j)].clone() });
        TorusLogarithm::standard(f, branches)?.with_correction(off)
    }

    pub fn to_field(&self, field: &Field) -> Result<Self> {
        let branches = self.branches.iter().map(|b| b.to_field(field)).collect::<Result<Vec<_>>>()?;
        let mut out = TorusLogarithm::new(field, self.a.clone(), branches)?;
        if let Some(c) = &self.correction {
            out = out.with_correction(c.to_field(field)?)?;
        }
        Ok(out)
    }
}

/// `l2 - l1` as a map on valuation vectors.
pub fn log_difference(l1: &TorusLogarithm, l2: &TorusLogarithm) -> Result<LogDifference> {
    if l1.rank() != l2.rank() {
        return Err(Error::DimensionMismatch("logarithms of different rank".into()));
    }
    Ok(LogDifference { matrix: l2.valuation_part()?.sub(&l1.valuation_part()?) })
}

/// The image of a subtorus element `s` in `T`.
pub fn embed_subtorus_element(embedding: &[Vec<i64>], s: &GroupElement) -> Result<GroupElement> {
    let d = s.diagonal_entries();
    let f = s.field();
    let entries = embedding
        .iter()
        .map(|row| row.iter().zip(&d).try_fold(f.one(), |acc, (&e, x)| Ok::<_, Error>(if e == 0 { acc } else { acc.mul(&x.pow(e)?) })))
        .collect::<Result<Vec<_>>>()?;
    GroupElement::diagonal(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::exp_padic;

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    fn diag(f: &Field, xs: &[i64]) -> GroupElement {
        GroupElement::diagonal(&xs.iter().map(|&x| f.int(x)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn standard_branch_on_units() {
        let f = q5();
        let log = TorusLogarithm::standard(&f, vec![f.zero(), f.zero()]).unwrap();
        let v = log.evaluate(&diag(&f, &[6, 26])).unwrap();
        assert!(v[0].approx_eq(&iwasawa_log(&f.int(6), &f.zero()).unwrap(), 0));
        assert!(v[1].approx_eq(&iwasawa_log(&f.int(26), &f.zero()).unwrap(), 0));
    }

    #[test]
    fn branch_at_p() {
        let f = q5();
        let l = f.parse("3 + 4*5 + O(5^12)").unwrap();
        let log = TorusLogarithm::standard(&f, vec![l.clone(), l.clone()]).unwrap();
        let v = log.evaluate(&diag(&f, &[5, 1])).unwrap();
        assert!(v[0].approx_eq(&l, 0));
        assert!(v[1].is_zero());
    }

    #[test]
    fn schraen_closed_form() {
        let f = q5();
        let (l, lp) = (f.parse("2 + 5 + O(5^15)").unwrap(), f.parse("1 + 3*5^2 + O(5^15)").unwrap());
        let a = vec![vec![-2, 1, 1], vec![-1, -1, 2], vec![0, 0, 1]];
        let log = TorusLogarithm::new(&f, a, vec![lp.clone(), l.clone(), lp.clone()]).unwrap();
        let (x, y, z) = (f.int(50), f.int(3), f.rational(7, 125).unwrap());
        let t = GroupElement::diagonal(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let got = log.evaluate(&t).unwrap();
        // closed form with gamma = -(1/3)(log_L - log_L')(a^-1 b^-1 c^2)
        let w = x.inv().unwrap().mul(&y.inv().unwrap()).mul(&z.mul(&z));
        let gamma = iwasawa_log(&w, &l).unwrap().sub(&iwasawa_log(&w, &lp).unwrap()).mul(&f.rational(-1, 3).unwrap());
        let lg = |u: &Elem| iwasawa_log(u, &lp).unwrap();
        let expected = [lg(&x).add(&gamma), lg(&y).add(&gamma).add(&gamma), lg(&z)];
        for (g, e) in got.iter().zip(&expected) {
            assert!(g.congruent(e, 12), "{g} vs {e}");
        }
    }

    #[test]
    fn difference_of_branches() {
        let f = q5();
        let (l, lp) = (f.int(3), f.int(11));
        let l1 = TorusLogarithm::standard(&f, vec![l.clone(), f.zero()]).unwrap();
        let l2 = TorusLogarithm::standard(&f, vec![lp.clone(), f.zero()]).unwrap();
        assert!(log_difference(&l1, &l1).unwrap().is_zero());
        let d = log_difference(&l1, &l2).unwrap();
        let eps = d.apply(&[2, 5]);
        assert!(eps[0].approx_eq(&lp.sub(&l).mul(&f.int(2)), 0));
        assert!(eps[1].is_zero());
        // units see nothing
        assert!(d.evaluate(&diag(&f, &[7, 3])).unwrap().iter().all(|x| x.is_zero()));
        // torsor reconstruction
        let back = l1.add_difference(&d).unwrap();
        let t = diag(&f, &[250, 3]);
        let (a, b) = (back.evaluate(&t).unwrap(), l2.evaluate(&t).unwrap());
        assert!(a.iter().zip(&b).all(|(x, y)| x.approx_eq(y, 1)));
    }

    #[test]
    fn logarithm_inverts_exp() {
        let f = q5();
        let log = TorusLogarithm::new(&f, vec![vec![1, 2], vec![0, 1]], vec![f.int(4), f.int(9)]).unwrap();
        let x = [f.int(25 * 3), f.int(-25 * 7)];
        let t = GroupElement::diagonal(&[exp_padic(&x[0]).unwrap(), exp_padic(&x[1]).unwrap()]).unwrap();
        let v = log.evaluate(&t).unwrap();
        assert!(v[0].congruent(&x[0], 18));
        assert!(v[1].congruent(&x[1], 18));
    }

    #[test]
    fn restriction_to_coordinate_subtorus() {
        let f = q5();
        let (l1, l2) = (f.int(3), f.int(8));
        let log = TorusLogarithm::standard(&f, vec![l1.clone(), l2]).unwrap();
        let r = log.restrict_to_subtorus(&[vec![1], vec![0]]).unwrap();
        assert_eq!(r.rank(), 1);
        assert!(r.branches()[0].approx_eq(&l1, 0));
        let ident = log.restrict_to_subtorus(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(ident.valuation_part().unwrap().agrees_to(&log.valuation_part().unwrap(), 18));
    }

    #[test]
    fn diagonal_subtorus_needs_equal_branches() {
        let f = q5();
        let s = [vec![1], vec![1]];
        let unequal = TorusLogarithm::standard(&f, vec![f.int(3), f.int(8)]).unwrap();
        assert_eq!(unequal.restrict_to_subtorus(&s), Err(Error::NotTangentToSubtorus));
        let equal = TorusLogarithm::standard(&f, vec![f.int(3), f.int(3)]).unwrap();
        let r = equal.restrict_to_subtorus(&s).unwrap();
        let x = GroupElement::diagonal(&[f.int(50)]).unwrap();
        let img = embed_subtorus_element(&s, &x).unwrap();
        let (small, big) = (r.evaluate(&x).unwrap(), equal.evaluate(&img).unwrap());
        assert!(big[0].approx_eq(&small[0], 1) && big[1].approx_eq(&small[0], 1));
    }
}
