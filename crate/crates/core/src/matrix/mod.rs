//! Dense matrices over E with precision-aware elimination, the nilpotent
//! exponential and the unipotent logarithm.

mod primary;

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

pub use primary::{primary_decomposition, ss_nilpotent_parts, Component, PrimaryDecomposition};

#[derive(Clone, PartialEq)]
pub struct MatrixE {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl MatrixE {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        MatrixE { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatrixE { field: field.clone(), rows, cols, data }
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Elem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<Elem> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| x.field() != field) {
            return Err(Error::FieldMismatch);
        }
        Ok(MatrixE { field: field.clone(), rows: r, cols: c, data })
    }

    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        Self::from_fn(field, r, c, |i, j| field.int(rows[i][j]))
    }

    pub fn diagonal(field: &Field, entries: &[Elem]) -> Self {
        let mut m = Self::zeros(field, entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// The matrix unit `E_ij`.
    pub fn unit(field: &Field, n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        m[(i, j)] = field.one();
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn from_columns(field: &Field, rows: usize, cols: &[Vec<Elem>]) -> Self {
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> Self {
        MatrixE { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn same_shape(&self, other: &Self) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        MatrixE {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_shape(other);
        MatrixE {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, k: &Elem) -> Self {
        if k.is_exact_zero() {
            return Self::zeros(&self.field, self.rows, self.cols);
        }
        self.map(|x| x.mul(k))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_exact_zero() {
                        continue;
                    }
                    let t = a.mul(b);
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = slot.add(&t);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (k, x) in v.iter().enumerate() {
                    let a = &self[(i, k)];
                    if a.is_exact_zero() || x.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(x));
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(&self.field, self.rows);
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
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Kronecker product; index `(i*q + k, j*s + l)` holds `a_ij * b_kl`.
    pub fn kron(&self, other: &Self) -> Self {
        let (q, s) = (other.rows, other.cols);
        Self::from_fn(&self.field, self.rows * q, self.cols * s, |r, c| {
            let a = &self[(r / q, c / s)];
            let b = &other[(r % q, c % s)];
            if a.is_exact_zero() || b.is_exact_zero() {
                self.field.zero()
            } else {
                a.mul(b)
            }
        })
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Elem {
        (0..self.rows.min(self.cols)).fold(self.field.zero(), |acc, i| acc.add(&self[(i, i)]))
    }

    /// All entries indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Smallest valuation among entries distinguishable from zero.
    pub fn norm_ord(&self) -> Option<i64> {
        self.data.iter().filter(|x| !x.is_zero()).map(|x| x.ord()).min()
    }

    /// Smallest absolute precision among the entries (units of `1/e`).
    pub fn prec_ord(&self) -> i64 {
        self.data.iter().map(|x| x.prec_ord()).min().unwrap_or(i64::MAX)
    }

    /// Entrywise equality up to `slack` digits below each pair's precision.
    pub fn approx_eq(&self, other: &Self, slack: i64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, slack))
    }

    /// Agreement to `digits` p-adic digits relative to the size of the larger
    /// matrix: `ord(A - B) >= min(ord A, ord B, 0) + digits` entrywise. A
    /// difference that is zero only to low precision does not count as agreement.
    pub fn agrees_to(&self, other: &Self, digits: i64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        let e = self.field.e();
        let scale = [self.norm_ord(), other.norm_ord(), Some(0)].into_iter().flatten().min().unwrap();
        let need = scale + digits * e;
        self.data.iter().zip(&other.data).all(|(a, b)| a.sub(b).ord() >= need)
    }

    /// Row-reduced echelon form with minimal-valuation partial pivoting.
    /// Entries indistinguishable from zero count as zero when deciding rank.
    pub fn rref(&self) -> Result<(MatrixE, Vec<usize>)> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let piv = (r..m.rows).filter(|&i| !m[(i, c)].is_zero()).min_by_key(|&i| m[(i, c)].ord());
            let Some(piv) = piv else { continue };
            m.swap_rows(r, piv);
            let inv = m[(r, c)].inv()?;
            for j in c..m.cols {
                let x = m[(r, j)].mul(&inv);
                m[(r, j)] = x;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_exact_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_exact_zero() {
                        continue;
                    }
                    let t = factor.mul(&m[(r, j)]);
                    let x = m[(i, j)].sub(&t);
                    m[(i, j)] = x;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Ok((m, pivots))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.1.len())
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Result<Vec<Vec<Elem>>> {
        let (m, pivots) = self.rref()?;
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m[(row, free)].neg();
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Indices of columns forming a basis of the column space.
    pub fn column_basis(&self) -> Result<Vec<usize>> {
        Ok(self.rref()?.1)
    }

    /// Inverse by Gauss-Jordan elimination with minimal-valuation pivots.
    pub fn inverse(&self) -> Result<MatrixE> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(&self.field, n);
        for c in 0..n {
            let candidates: Vec<usize> = (c..n).filter(|&i| !a[(i, c)].is_zero()).collect();
            let Some(&piv) = candidates.iter().min_by_key(|&&i| a[(i, c)].ord()) else {
                if (c..n).all(|i| a[(i, c)].is_exact_zero()) {
                    return Err(Error::Singular);
                }
                return Err(Error::PrecisionLoss("pivot indistinguishable from zero".into()));
            };
            a.swap_rows(c, piv);
            inv.swap_rows(c, piv);
            let pinv = a[(c, c)].inv()?;
            for j in 0..n {
                let x = a[(c, j)].mul(&pinv);
                a[(c, j)] = x;
                let y = inv[(c, j)].mul(&pinv);
                inv[(c, j)] = y;
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_exact_zero() {
                    continue;
                }
                let factor = a[(i, c)].clone();
                for j in 0..n {
                    if !a[(c, j)].is_exact_zero() {
                        let x = a[(i, j)].sub(&factor.mul(&a[(c, j)]));
                        a[(i, j)] = x;
                    }
                    if !inv[(c, j)].is_exact_zero() {
                        let y = inv[(i, j)].sub(&factor.mul(&inv[(c, j)]));
                        inv[(i, j)] = y;
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with minimal-valuation pivots.
    pub fn det(&self) -> Result<Elem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.field.one();
        for c in 0..n {
            let piv = (c..n).filter(|&i| !a[(i, c)].is_zero()).min_by_key(|&i| a[(i, c)].ord());
            let Some(piv) = piv else {
                let col_prec = (c..n).map(|i| a[(i, c)].prec_ord()).min().unwrap_or(0);
                return Ok(det.mul(&Elem::zero_with_ord_prec(&self.field, col_prec)));
            };
            if piv != c {
                a.swap_rows(c, piv);
                det = det.neg();
            }
            let pivot = a[(c, c)].clone();
            det = det.mul(&pivot);
            let pinv = pivot.inv()?;
            for i in c + 1..n {
                if a[(i, c)].is_exact_zero() {
                    continue;
                }
                let factor = a[(i, c)].mul(&pinv);
                for j in c..n {
                    if !a[(c, j)].is_exact_zero() {
                        let x = a[(i, j)].sub(&factor.mul(&a[(c, j)]));
                        a[(i, j)] = x;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Reinterprets all entries in another field with the same prime and extension.
    pub fn to_field(&self, field: &Field) -> Result<MatrixE> {
        let data = self.data.iter().map(|x| x.to_field(field)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixE { field: field.clone(), rows: self.rows, cols: self.cols, data })
    }
}

impl Index<(usize, usize)> for MatrixE {
    type Output = Elem;
    fn index(&self, (i, j): (usize, usize)) -> &Elem {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixE {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Elem {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for MatrixE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for MatrixE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Powers `N^0, N^1, ...` up to the last nonzero one; errors if `N^dim` is not zero.
fn nilpotent_powers(n: &MatrixE) -> Result<Vec<MatrixE>> {
    let dim = n.rows();
    let mut powers = vec![MatrixE::identity(n.field(), dim)];
    let mut cur = n.clone();
    for _ in 0..dim {
        if cur.is_zero() {
            return Ok(powers);
        }
        powers.push(cur.clone());
        cur = cur.mul(n);
    }
    if cur.is_zero() {
        Ok(powers)
    } else {
        Err(Error::NotNilpotent)
    }
}

/// `exp(N) = sum_{k < dim} N^k / k!` for nilpotent `N`; a finite sum.
pub fn nilpotent_exp(n: &MatrixE) -> Result<MatrixE> {
    if !n.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    let field = n.field();
    let powers = nilpotent_powers(n)?;
    let mut acc = MatrixE::identity(field, n.rows());
    let mut fact = field.one();
    for (k, pk) in powers.iter().enumerate().skip(1) {
        fact = fact.mul(&field.int(k as i64));
        acc = acc.add(&pk.scale(&fact.inv()?));
    }
    Ok(acc)
}

/// `log(U) = sum_{k>=1} (-1)^(k-1) (U - I)^k / k` for unipotent `U`.
pub fn unipotent_log(u: &MatrixE) -> Result<MatrixE> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch("logarithm of a non-square matrix".into()));
    }
    let field = u.field();
    let x = u.sub(&MatrixE::identity(field, u.rows()));
    let powers = nilpotent_powers(&x).map_err(|_| Error::NotUnipotent)?;
    let mut acc = MatrixE::zeros(field, u.rows(), u.rows());
    for (k, pk) in powers.iter().enumerate().skip(1) {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&pk.scale(&field.rational(sign, k as i64)?));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let f = q5();
        let z = MatrixE::zeros(&f, 3, 3);
        assert_eq!(nilpotent_exp(&z).unwrap(), MatrixE::identity(&f, 3));
    }

    #[test]
    fn exp_of_single_entry() {
        let f = q5();
        let c = f.parse("3 + 2*5 + O(5^12)").unwrap();
        let mut n = MatrixE::zeros(&f, 2, 2);
        n[(0, 1)] = c.clone();
        let e = nilpotent_exp(&n).unwrap();
        // oracle: I + N, since N^2 = 0
        let mut expected = MatrixE::identity(&f, 2);
        expected[(0, 1)] = c;
        assert!(e.approx_eq(&expected, 0));
    }

    #[test]
    fn exp_rejects_non_nilpotent() {
        let f = q5();
        let m = MatrixE::from_ints(&f, &[&[0, 1], &[1, 0]]);
        assert_eq!(nilpotent_exp(&m), Err(Error::NotNilpotent));
        assert_eq!(unipotent_log(&m), Err(Error::NotUnipotent));
    }

    #[test]
    fn exp_times_exp_of_negative() {
        let f = q5();
        let n = MatrixE::from_ints(&f, &[&[0, 2, 7, 1], &[0, 0, 3, 4], &[0, 0, 0, 9], &[0, 0, 0, 0]]);
        let prod = nilpotent_exp(&n).unwrap().mul(&nilpotent_exp(&n.neg()).unwrap());
        assert!(prod.agrees_to(&MatrixE::identity(&f, 4), 18));
    }

    #[test]
    fn log_of_identity_is_zero() {
        let f = q5();
        assert!(unipotent_log(&MatrixE::identity(&f, 3)).unwrap().is_zero());
    }

    #[test]
    fn log_of_three_by_three_unipotent() {
        let f = q5();
        let (a, b, c) = (f.int(2), f.int(11), f.int(7));
        let u = MatrixE::from_rows(
            &f,
            vec![vec![f.one(), a.clone(), b.clone()], vec![f.zero(), f.one(), c.clone()], vec![f.zero(), f.zero(), f.one()]],
        )
        .unwrap();
        // oracle: log(I + X) = X - X^2/2 with X^2 = a c E_13
        let half = f.rational(1, 2).unwrap();
        let mut expected = MatrixE::zeros(&f, 3, 3);
        expected[(0, 1)] = a.clone();
        expected[(0, 2)] = b.sub(&a.mul(&c).mul(&half));
        expected[(1, 2)] = c;
        assert!(unipotent_log(&u).unwrap().agrees_to(&expected, 19));
    }

    #[test]
    fn inverse_and_determinant() {
        let f = q5();
        let m = MatrixE::from_ints(&f, &[&[5, 1], &[0, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).agrees_to(&MatrixE::identity(&f, 2), 18));
        assert!(m.det().unwrap().approx_eq(&f.int(5), 0));
        let s = MatrixE::from_ints(&f, &[&[1, 2], &[2, 4]]);
        assert!(s.det().unwrap().is_zero());
        assert!(s.inverse().is_err());
    }

    #[test]
    fn kernel_of_rank_one() {
        let f = q5();
        let m = MatrixE::from_ints(&f, &[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel().unwrap();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn kron_indexing() {
        let f = q5();
        let a = MatrixE::from_ints(&f, &[&[1, 2], &[3, 4]]);
        let b = MatrixE::from_ints(&f, &[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)].to_i64(), Some(1));
        assert_eq!(k[(2, 1)].to_i64(), Some(3));
        assert_eq!(k[(3, 2)].to_i64(), Some(4));
        assert_eq!(k[(1, 1)].to_i64(), Some(0));
    }
}
