//! GL_n with a block-upper parabolic: root spaces, the adjoint action and
//! constructive factorizations `g = u * t * h` with `h` a product of
//! transvections inside the Levi blocks.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::MatrixE;

/// `GL_n` together with the composition `(n_1, ..., n_k)` of the standard
/// parabolic `P` of block-upper-triangular matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GLnContext {
    pub n: usize,
    pub composition: Vec<usize>,
}

impl GLnContext {
    pub fn new(composition: Vec<usize>) -> Result<Self> {
        if composition.is_empty() || composition.contains(&0) {
            return Err(Error::schema("composition", "block sizes must be positive"));
        }
        let n = composition.iter().sum();
        Ok(GLnContext { n, composition })
    }

    /// The Borel subgroup: composition `(1, ..., 1)`.
    pub fn borel(n: usize) -> Self {
        GLnContext { n, composition: vec![1; n] }
    }

    /// All of GL_n as a single block.
    pub fn full(n: usize) -> Self {
        GLnContext { n, composition: vec![n] }
    }

    pub fn validate(&self) -> Result<()> {
        let fresh = GLnContext::new(self.composition.clone())?;
        if fresh.n != self.n {
            return Err(Error::schema("composition", format!("sums to {} but n = {}", fresh.n, self.n)));
        }
        Ok(())
    }

    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.composition
            .iter()
            .map(|&b| {
                let r = start..start + b;
                start += b;
                r
            })
            .collect()
    }

    pub fn block_of(&self, i: usize) -> usize {
        let mut acc = 0;
        for (k, &b) in self.composition.iter().enumerate() {
            acc += b;
            if i < acc {
                return k;
            }
        }
        panic!("index {i} out of range for n = {}", self.n)
    }

    /// `e_ij` lies in the parabolic subalgebra.
    pub fn in_p(&self, i: usize, j: usize) -> bool {
        self.block_of(i) <= self.block_of(j)
    }

    /// `e_ij` lies in the nilradical `u`.
    pub fn in_u(&self, i: usize, j: usize) -> bool {
        self.block_of(i) < self.block_of(j)
    }

    pub fn torus_generators(&self) -> Vec<(usize, usize)> {
        (0..self.n).map(|i| (i, i)).collect()
    }

    /// All `e_ij` in `p`, row-major.
    pub fn p_generators(&self) -> Vec<(usize, usize)> {
        self.pairs(|i, j| self.in_p(i, j))
    }

    pub fn u_generators(&self) -> Vec<(usize, usize)> {
        self.pairs(|i, j| self.in_u(i, j))
    }

    /// Off-diagonal root vectors inside the Levi blocks.
    pub fn levi_root_generators(&self) -> Vec<(usize, usize)> {
        self.pairs(|i, j| i != j && self.block_of(i) == self.block_of(j))
    }

    /// `e_ij` with `i` in a later block than `j`, sorted by height `i - j` then lexicographically.
    pub fn negative_roots(&self) -> Vec<(usize, usize)> {
        let mut v = self.pairs(|i, j| self.block_of(i) > self.block_of(j));
        v.sort_by_key(|&(i, j)| (i - j, i, j));
        v
    }

    pub fn all_generators(&self) -> Vec<(usize, usize)> {
        self.pairs(|_, _| true)
    }

    fn pairs(&self, keep: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if keep(i, j) {
                    v.push((i, j));
                }
            }
        }
        v
    }

    /// Whether a matrix lies in `P` (strictly lower blocks vanish at precision).
    pub fn contains(&self, m: &MatrixE) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.in_p(i, j) || m[(i, j)].is_zero()))
    }
}

/// An invertible `n x n` matrix.
#[derive(Clone, PartialEq)]
pub struct GroupElement {
    matrix: MatrixE,
}

impl GroupElement {
    pub fn new(matrix: MatrixE) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("group elements must be square".into()));
        }
        if matrix.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(GroupElement { matrix })
    }

    /// Wraps a matrix already known to be invertible.
    pub(crate) fn new_unchecked(matrix: MatrixE) -> Self {
        GroupElement { matrix }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        GroupElement { matrix: MatrixE::identity(field, n) }
    }

    pub fn diagonal(entries: &[Elem]) -> Result<Self> {
        let field = entries.first().ok_or(Error::Singular)?.field().clone();
        if entries.iter().any(|x| x.is_zero()) {
            return Err(Error::Singular);
        }
        Ok(GroupElement { matrix: MatrixE::diagonal(&field, entries) })
    }

    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Result<Self> {
        Self::new(MatrixE::from_ints(field, rows))
    }

    pub fn matrix(&self) -> &MatrixE {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatrixE {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn field(&self) -> &Field {
        self.matrix.field()
    }

    pub fn mul(&self, other: &Self) -> Self {
        GroupElement { matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(GroupElement { matrix: self.matrix.inverse()? })
    }

    pub fn det(&self) -> Result<Elem> {
        self.matrix.det()
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrix.is_diagonal()
    }

    pub fn diagonal_entries(&self) -> Vec<Elem> {
        (0..self.n()).map(|i| self.matrix[(i, i)].clone()).collect()
    }

    pub fn to_field(&self, field: &Field) -> Result<Self> {
        Ok(GroupElement { matrix: self.matrix.to_field(field)? })
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.matrix, f)
    }
}

/// `g x g^-1`.
pub fn ad_action(g: &GroupElement, x: &MatrixE) -> Result<MatrixE> {
    Ok(g.matrix.mul(x).mul(&g.matrix.inverse()?))
}

/// `g = u * l` with `l` the block-diagonal part of `g` and `u` in the unipotent radical.
pub fn factor_parabolic(g: &GroupElement, ctx: &GLnContext) -> Result<(GroupElement, GroupElement)> {
    let m = g.matrix();
    let n = ctx.n;
    if m.rows() != n {
        return Err(Error::DimensionMismatch(format!("expected {n}x{n}, got {}x{}", m.rows(), m.cols())));
    }
    let field = m.field();
    for i in 0..n {
        for j in 0..n {
            if !ctx.in_p(i, j) && !m[(i, j)].is_zero() {
                return Err(Error::NotInParabolic(format!("entry ({}, {}) is nonzero", i + 1, j + 1)));
            }
        }
    }
    let l = MatrixE::from_fn(field, n, n, |i, j| if ctx.block_of(i) == ctx.block_of(j) { m[(i, j)].clone() } else { field.zero() });
    let u_raw = m.mul(&l.inverse()?);
    // Fix the known structure exactly: identity on the Levi blocks, zero below.
    let u = MatrixE::from_fn(field, n, n, |i, j| {
        if ctx.in_u(i, j) {
            u_raw[(i, j)].clone()
        } else if i == j {
            field.one()
        } else {
            field.zero()
        }
    });
    Ok((GroupElement::new_unchecked(u), GroupElement::new_unchecked(l)))
}

/// `l = t * h` with `t` diagonal carrying each block determinant in the
/// block's first slot and `h` block-diagonal with determinant-one blocks.
pub fn factor_levi(l: &GroupElement, ctx: &GLnContext) -> Result<(GroupElement, GroupElement)> {
    let m = l.matrix();
    let field = m.field();
    let n = ctx.n;
    for i in 0..n {
        for j in 0..n {
            if ctx.block_of(i) != ctx.block_of(j) && !m[(i, j)].is_zero() {
                return Err(Error::NotInParabolic(format!("Levi factor has entry ({}, {}) outside the diagonal blocks", i + 1, j + 1)));
            }
        }
    }
    let mut t = MatrixE::identity(field, n);
    let mut h = MatrixE::zeros(field, n, n);
    for block in ctx.blocks() {
        let sub = MatrixE::from_fn(field, block.len(), block.len(), |i, j| m[(block.start + i, block.start + j)].clone());
        let d = sub.det()?;
        let dinv = d.inv().map_err(|_| Error::Singular)?;
        t[(block.start, block.start)] = d;
        for i in block.clone() {
            for j in block.clone() {
                h[(i, j)] = if i == block.start { m[(i, j)].mul(&dinv) } else { m[(i, j)].clone() };
            }
        }
        if block.len() == 1 {
            h[(block.start, block.start)] = field.one();
        }
    }
    Ok((GroupElement::new_unchecked(t), GroupElement::new_unchecked(h)))
}

/// Row choice when clearing a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotStrategy {
    /// The entry of smallest valuation.
    #[default]
    MinValuation,
    /// The lowest nonzero entry.
    LastNonzero,
}

/// `I + a * e_ij` with `i != j` (0-based indices).
#[derive(Debug, Clone, PartialEq)]
pub struct Transvection {
    pub i: usize,
    pub j: usize,
    pub a: Elem,
}

impl Transvection {
    pub fn matrix(&self, n: usize) -> MatrixE {
        let mut m = MatrixE::identity(self.a.field(), n);
        m[(self.i, self.j)] = self.a.clone();
        m
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransvectionWord {
    pub letters: Vec<Transvection>,
}

impl TransvectionWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn product(&self, field: &Field, n: usize) -> MatrixE {
        self.letters.iter().fold(MatrixE::identity(field, n), |acc, t| acc.mul(&t.matrix(n)))
    }
}

impl fmt::Display for TransvectionWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.letters {
            write!(f, "({},{},{})", t.i + 1, t.j + 1, t.a)?;
        }
        Ok(())
    }
}

/// Writes a determinant-one matrix as a product of transvections by row
/// reduction. Each step is "add `a` times row `r` to row `k`"; the word
/// lists the inverse steps in order, so its product is the input.
pub fn transvection_factor(h: &MatrixE, strategy: PivotStrategy) -> Result<TransvectionWord> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("transvection factorization needs a square matrix".into()));
    }
    let field = h.field().clone();
    let n = h.rows();
    let one = field.one();
    if !h.det()?.approx_eq(&one, 0) {
        return Err(Error::NotDeterminantOne);
    }
    let mut m = h.clone();
    let mut word = Vec::new();
    let mut row_op = |m: &mut MatrixE, k: usize, r: usize, a: Elem| {
        for j in 0..n {
            if !m[(r, j)].is_exact_zero() {
                let x = m[(k, j)].add(&a.mul(&m[(r, j)]));
                m[(k, j)] = x;
            }
        }
        word.push(Transvection { i: k, j: r, a: a.neg() });
    };
    for k in 0..n {
        let gap = one.sub(&m[(k, k)]);
        if !gap.is_zero() && k + 1 < n {
            let below = |m: &MatrixE| (k + 1..n).filter(|&r| !m[(r, k)].is_zero()).collect::<Vec<_>>();
            if below(&m).is_empty() {
                row_op(&mut m, k + 1, k, one.clone());
            }
            let rows = below(&m);
            let r = match strategy {
                PivotStrategy::MinValuation => *rows.iter().min_by_key(|&&r| m[(r, k)].ord()).expect("nonempty"),
                PivotStrategy::LastNonzero => *rows.last().expect("nonempty"),
            };
            let gap = one.sub(&m[(k, k)]);
            let a = gap.div(&m[(r, k)]).map_err(|_| Error::PrecisionLoss("pivot lost".into()))?;
            row_op(&mut m, k, r, a);
            m[(k, k)] = one.clone().truncate_ord(m[(k, k)].prec_ord());
        } else if !gap.is_zero() {
            return Err(Error::PrecisionLoss(format!("diagonal entry {} is not 1 after elimination", k + 1)));
        }
        for r in k + 1..n {
            if m[(r, k)].is_zero() {
                continue;
            }
            let a = m[(r, k)].neg();
            row_op(&mut m, r, k, a);
            m[(r, k)] = field.zero();
        }
    }
    for k in (1..n).rev() {
        for i in 0..k {
            if m[(i, k)].is_zero() {
                continue;
            }
            let a = m[(i, k)].neg();
            row_op(&mut m, i, k, a);
            m[(i, k)] = field.zero();
        }
    }
    Ok(TransvectionWord { letters: word })
}

/// Transvection words for each Levi block of a block-diagonal `h`, with
/// indices shifted to the ambient matrix; each letter lies in the Levi.
pub fn levi_transvections(h: &GroupElement, ctx: &GLnContext, strategy: PivotStrategy) -> Result<TransvectionWord> {
    let m = h.matrix();
    let field = m.field();
    let mut letters = Vec::new();
    for block in ctx.blocks() {
        if block.len() == 1 {
            if !m[(block.start, block.start)].approx_eq(&field.one(), 0) {
                return Err(Error::NotDeterminantOne);
            }
            continue;
        }
        let sub = MatrixE::from_fn(field, block.len(), block.len(), |i, j| m[(block.start + i, block.start + j)].clone());
        for t in transvection_factor(&sub, strategy)?.letters {
            letters.push(Transvection { i: t.i + block.start, j: t.j + block.start, a: t.a });
        }
    }
    Ok(TransvectionWord { letters })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    #[test]
    fn context_generators() {
        let ctx = GLnContext::new(vec![2, 1]).unwrap();
        assert_eq!(ctx.n, 3);
        assert_eq!(ctx.u_generators(), vec![(0, 2), (1, 2)]);
        assert_eq!(ctx.levi_root_generators(), vec![(0, 1), (1, 0)]);
        assert_eq!(ctx.negative_roots(), vec![(2, 1), (2, 0)]);
        assert_eq!(GLnContext::borel(3).negative_roots(), vec![(1, 0), (2, 1), (2, 0)]);
        assert!(GLnContext::new(vec![2, 0]).is_err());
    }

    #[test]
    fn ad_action_on_root_vector() {
        let f = q5();
        let (a, d) = (f.int(7), f.int(10));
        let g = GroupElement::diagonal(&[a.clone(), d.clone()]).unwrap();
        let x = MatrixE::unit(&f, 2, 0, 1);
        // oracle: diag(a,d) e12 diag(a,d)^-1 = (a/d) e12
        let expected = x.scale(&a.div(&d).unwrap());
        assert!(ad_action(&g, &x).unwrap().agrees_to(&expected, 18));
        assert!(ad_action(&GroupElement::identity(&f, 2), &x).unwrap().agrees_to(&x, 20));
    }

    #[test]
    fn parabolic_factorization_of_borel_element() {
        let f = q5();
        let g = GroupElement::from_ints(&f, &[&[5, 1], &[0, 1]]).unwrap();
        let (u, l) = factor_parabolic(&g, &GLnContext::borel(2)).unwrap();
        assert!(u.matrix().agrees_to(&MatrixE::from_ints(&f, &[&[1, 1], &[0, 1]]), 18));
        assert!(l.matrix().agrees_to(&MatrixE::from_ints(&f, &[&[5, 0], &[0, 1]]), 18));
        let lower = GroupElement::from_ints(&f, &[&[1, 0], &[1, 1]]).unwrap();
        assert!(matches!(factor_parabolic(&lower, &GLnContext::borel(2)), Err(Error::NotInParabolic(_))));
    }

    #[test]
    fn levi_factorization_of_scalar_block() {
        let f = q5();
        let ctx = GLnContext::full(2);
        let l = GroupElement::from_ints(&f, &[&[3, 0], &[0, 3]]).unwrap();
        let (t, h) = factor_levi(&l, &ctx).unwrap();
        // oracle: det = 9, t = diag(9, 1), h = diag(1/3, 3)
        assert!(t.matrix().agrees_to(&MatrixE::from_ints(&f, &[&[9, 0], &[0, 1]]), 18));
        let third = f.rational(1, 3).unwrap();
        let expected = MatrixE::diagonal(&f, &[third, f.int(3)]);
        assert!(h.matrix().agrees_to(&expected, 18));
        let p1 = GroupElement::from_ints(&f, &[&[5, 0], &[0, 1]]).unwrap();
        let (t, h) = factor_levi(&p1, &ctx).unwrap();
        assert!(t.matrix().agrees_to(p1.matrix(), 18));
        assert!(h.matrix().agrees_to(&MatrixE::identity(&f, 2), 18));
    }

    #[test]
    fn rotation_word() {
        let f = q5();
        let h = MatrixE::from_ints(&f, &[&[0, -1], &[1, 0]]);
        let w = transvection_factor(&h, PivotStrategy::MinValuation).unwrap();
        let coords: Vec<_> = w.letters.iter().map(|t| (t.i, t.j, t.a.to_i64().unwrap())).collect();
        assert_eq!(coords, vec![(0, 1, -1), (1, 0, 1), (0, 1, -1)]);
        assert!(w.product(&f, 2).agrees_to(&h, 20));
    }

    #[test]
    fn trivial_words() {
        let f = q5();
        assert!(transvection_factor(&MatrixE::identity(&f, 3), PivotStrategy::MinValuation).unwrap().is_empty());
        let a = f.int(7);
        let mut h = MatrixE::identity(&f, 2);
        h[(0, 1)] = a.clone();
        let w = transvection_factor(&h, PivotStrategy::MinValuation).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!((w.letters[0].i, w.letters[0].j), (0, 1));
        assert!(w.letters[0].a.approx_eq(&a, 0));
    }

    #[test]
    fn three_by_three_both_strategies() {
        let f = q5();
        // det = 1
        let h = MatrixE::from_ints(&f, &[&[5, 1, 2], &[4, 1, 3], &[0, 0, 1]]);
        assert!(h.det().unwrap().approx_eq(&f.one(), 0));
        for s in [PivotStrategy::MinValuation, PivotStrategy::LastNonzero] {
            let w = transvection_factor(&h, s).unwrap();
            assert!(w.len() <= 9 + 3);
            assert!(w.product(&f, 3).agrees_to(&h, 18));
        }
        assert_eq!(
            transvection_factor(&MatrixE::from_ints(&f, &[&[2, 0], &[0, 1]]), PivotStrategy::MinValuation),
            Err(Error::NotDeterminantOne)
        );
    }
}
