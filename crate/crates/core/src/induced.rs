//! Degree-truncated generalized Verma modules `U(g) (x)_{U(p)} M`.
//!
//! A basis is `f_(b_1) ... f_(b_r) (x) m_v` with `b_1 <= ... <= b_r` indices
//! into the negative roots (sorted by height, then lexicographically) and
//! `r <= depth`. The `p`-action never raises the degree, so the truncation is
//! a `p`-module; negative generators raise it and only act partially.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::lift::{lift_parabolic_eval, LiftedRep};
use crate::matrix::MatrixE;
use crate::modules::{bracket_units, FdPModule, Generator};
use crate::root_data::{GLnContext, GroupElement};
use crate::torus_log::TorusLogarithm;

/// Default bound on the number of basis vectors.
pub const DEFAULT_MAX_BASIS: usize = 5000;

/// A vector in the induced module: PBW monomial -> coefficient vector in `M`.
type Sparse = BTreeMap<Vec<usize>, Vec<Elem>>;

#[derive(Debug, Clone)]
pub struct TruncatedInduced {
    base: FdPModule,
    depth: usize,
    negative_roots: Vec<Generator>,
    monomials: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

/// `binom(n + k, k)`: monomials of degree `<= k` in `n` variables.
fn count_monomials(vars: usize, depth: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..=depth as u128 {
        acc = acc * (vars as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    usize::try_from(acc).ok()
}

fn enumerate_monomials(vars: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for m in &layer {
            let start = m.last().copied().unwrap_or(0);
            for b in start..vars {
                let mut w = m.clone();
                w.push(b);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

impl TruncatedInduced {
    pub fn build(base: &FdPModule, depth: usize) -> Result<Self> {
        Self::build_with_limit(base, depth, DEFAULT_MAX_BASIS)
    }

    pub fn build_with_limit(base: &FdPModule, depth: usize, limit: usize) -> Result<Self> {
        let negative_roots = base.ctx().negative_roots();
        let count = count_monomials(negative_roots.len(), depth).unwrap_or(usize::MAX);
        let size = count.saturating_mul(base.dim());
        if size > limit {
            return Err(Error::DepthOverflow { size, limit });
        }
        let monomials = enumerate_monomials(negative_roots.len(), depth);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(TruncatedInduced { base: base.clone(), depth, negative_roots, monomials, index })
    }

    pub fn base(&self) -> &FdPModule {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn ctx(&self) -> &GLnContext {
        self.base.ctx()
    }

    fn field(&self) -> &Field {
        self.base.field()
    }

    pub fn dim(&self) -> usize {
        self.monomials.len() * self.base.dim()
    }

    pub fn negative_roots(&self) -> &[Generator] {
        &self.negative_roots
    }

    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    /// Basis index of `monomial (x) m_v`.
    pub fn basis_index(&self, monomial: &[usize], v: usize) -> Option<usize> {
        self.index.get(monomial).map(|&k| k * self.base.dim() + v)
    }

    /// `sum (eps_i - eps_j)` over the roots of a monomial.
    pub fn monomial_weight(&self, monomial: &[usize]) -> Vec<i64> {
        let mut w = vec![0i64; self.ctx().n];
        for &b in monomial {
            let (i, j) = self.negative_roots[b];
            w[i] += 1;
            w[j] -= 1;
        }
        w
    }

    fn root_index(&self, g: Generator) -> Option<usize> {
        self.negative_roots.iter().position(|&r| r == g)
    }

    fn add_into(&self, acc: &mut Sparse, key: Vec<usize>, v: Vec<Elem>, scale: i64) {
        let f = self.field();
        let v: Vec<Elem> = if scale == 1 { v } else { v.iter().map(|x| x.mul(&f.int(scale))).collect() };
        match acc.get_mut(&key) {
            Some(cur) => {
                for (c, x) in cur.iter_mut().zip(v) {
                    *c = c.add(&x);
                }
            }
            None => {
                acc.insert(key, v);
            }
        }
    }

    /// `f_b * (monomial (x) w)` brought into PBW order.
    fn lmul_f(&self, b: usize, mono: &[usize], w: &[Elem]) -> Sparse {
        let mut out = Sparse::new();
        if mono.first().is_none_or(|&s| b <= s) {
            let mut key = Vec::with_capacity(mono.len() + 1);
            key.push(b);
            key.extend_from_slice(mono);
            out.insert(key, w.to_vec());
            return out;
        }
        let s1 = mono[0];
        let rest = &mono[1..];
        // f_b f_s1 rest = f_s1 (f_b rest) + [f_b, f_s1] rest
        for (key, v) in self.lmul_f(b, rest, w) {
            for (k2, v2) in self.lmul_f(s1, &key, &v) {
                self.add_into(&mut out, k2, v2, 1);
            }
        }
        for (sign, g) in bracket_units(self.negative_roots[b], self.negative_roots[s1]) {
            let idx = self.root_index(g).expect("bracket of negative roots is negative");
            for (k2, v2) in self.lmul_f(idx, rest, w) {
                self.add_into(&mut out, k2, v2, sign);
            }
        }
        out
    }

    /// `e_ij * (monomial (x) w)` for `e_ij` in `p`.
    fn lmul_p(&self, x: Generator, mono: &[usize], w: &[Elem]) -> Sparse {
        let mut out = Sparse::new();
        if mono.is_empty() {
            let img = self.base.phi(x.0, x.1).mul_vec(w);
            if img.iter().any(|c| !c.is_exact_zero()) {
                out.insert(Vec::new(), img);
            }
            return out;
        }
        let f1 = mono[0];
        let rest = &mono[1..];
        // x f1 rest = f1 (x rest) + [x, f1] rest
        for (key, v) in self.lmul_p(x, rest, w) {
            for (k2, v2) in self.lmul_f(f1, &key, &v) {
                self.add_into(&mut out, k2, v2, 1);
            }
        }
        for (sign, g) in bracket_units(x, self.negative_roots[f1]) {
            let part = match self.root_index(g) {
                Some(idx) => self.lmul_f(idx, rest, w),
                None => self.lmul_p(g, rest, w),
            };
            for (k2, v2) in part {
                self.add_into(&mut out, k2, v2, sign);
            }
        }
        out
    }

    fn unit_vector(&self, v: usize) -> Vec<Elem> {
        let f = self.field();
        (0..self.base.dim()).map(|i| if i == v { f.one() } else { f.zero() }).collect()
    }

    /// Writes a sparse vector into column `col`; returns whether any term fell outside the truncation.
    fn store(&self, m: &mut MatrixE, col: usize, s: Sparse) -> bool {
        let mut overflow = false;
        for (key, v) in s {
            match self.index.get(&key) {
                Some(&k) => {
                    for (i, c) in v.into_iter().enumerate() {
                        let row = k * self.base.dim() + i;
                        let cur = m[(row, col)].add(&c);
                        m[(row, col)] = cur;
                    }
                }
                None => {
                    if v.iter().any(|c| !c.is_zero()) {
                        overflow = true;
                    }
                }
            }
        }
        overflow
    }

    /// Matrix of `e_ij` in `p` on the truncation.
    pub fn p_action(&self, x: Generator) -> Result<MatrixE> {
        if !self.ctx().in_p(x.0, x.1) {
            return Err(Error::NotInParabolic(format!("e_{}_{} is not in p", x.0 + 1, x.1 + 1)));
        }
        let d = self.dim();
        let mut m = MatrixE::zeros(self.field(), d, d);
        for mono in &self.monomials {
            for v in 0..self.base.dim() {
                let col = self.basis_index(mono, v).expect("basis");
                let overflow = self.store(&mut m, col, self.lmul_p(x, mono, &self.unit_vector(v)));
                debug_assert!(!overflow, "p-action left the truncation");
            }
        }
        Ok(m)
    }

    /// Matrix of any `e_ij` on the truncation, and whether some image
    /// needed a monomial above the depth (those terms are dropped).
    pub fn g_action_partial(&self, x: Generator) -> Result<(MatrixE, bool)> {
        if self.ctx().in_p(x.0, x.1) {
            return Ok((self.p_action(x)?, false));
        }
        let b = self.root_index(x).ok_or_else(|| Error::DimensionMismatch("generator out of range".into()))?;
        let d = self.dim();
        let mut m = MatrixE::zeros(self.field(), d, d);
        let mut overflow = false;
        for mono in &self.monomials {
            for v in 0..self.base.dim() {
                let col = self.basis_index(mono, v).expect("basis");
                overflow |= self.store(&mut m, col, self.lmul_f(b, mono, &self.unit_vector(v)));
            }
        }
        Ok((m, overflow))
    }

    /// The truncation as a `p`-module.
    pub fn as_module(&self) -> Result<FdPModule> {
        let mut action = BTreeMap::new();
        for g in self.ctx().p_generators() {
            action.insert(g, self.p_action(g)?);
        }
        FdPModule::new(self.ctx().clone(), self.field().clone(), self.dim(), action)
    }

    /// Weight multiplicities: each generalized weight `lambda` of the base
    /// contributes `dim M_lambda` at `lambda + wt(monomial)`.
    pub fn weight_multiplicities(&self) -> Result<BTreeMap<Vec<i64>, usize>> {
        let dec = self.base.weight_decomposition(None)?;
        let mut out = BTreeMap::new();
        for mono in &self.monomials {
            let mw = self.monomial_weight(mono);
            for c in &dec.components {
                let w: Vec<i64> = c.weight.iter().zip(&mw).map(|(a, b)| a + b).collect();
                *out.entry(w).or_insert(0) += c.dim;
            }
        }
        Ok(out)
    }

    pub fn lifted(&self, log: &TorusLogarithm) -> Result<LiftedRep> {
        LiftedRep::new(self.as_module()?, log.clone())
    }

    pub fn lift_on_truncation(&self, log: &TorusLogarithm, g: &GroupElement) -> Result<MatrixE> {
        lift_parabolic_eval(&self.lifted(log)?, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modules::{breuil_module, det_power};

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    #[test]
    fn dimensions() {
        let f = q5();
        let m2 = FdPModule::trivial(&GLnContext::borel(2), &f, 1);
        assert_eq!(TruncatedInduced::build(&m2, 0).unwrap().dim(), 1);
        assert_eq!(TruncatedInduced::build(&m2, 3).unwrap().dim(), 4);
        let m3 = FdPModule::trivial(&GLnContext::borel(3), &f, 1);
        // oracle: 1 + 3 + 6 monomials of degree <= 2 in three variables
        assert_eq!(TruncatedInduced::build(&m3, 2).unwrap().dim(), 10);
        assert!(matches!(TruncatedInduced::build_with_limit(&m3, 30, 100), Err(Error::DepthOverflow { limit: 100, .. })));
    }

    #[test]
    fn raising_operator_on_first_level() {
        let f = q5();
        let ctx = GLnContext::borel(2);
        let base = crate::modules::direct_sum(&det_power(&ctx, &f, 0), &det_power(&ctx, &f, 0)).unwrap();
        // weight (a, b) = (3, -1): e_11 -> 3, e_22 -> -1
        let mut action = BTreeMap::new();
        action.insert((0, 0), MatrixE::from_ints(&f, &[&[3]]));
        action.insert((1, 1), MatrixE::from_ints(&f, &[&[-1]]));
        let m = FdPModule::new(ctx, f.clone(), 1, action).unwrap();
        let t = TruncatedInduced::build(&m, 2).unwrap();
        let e = t.p_action((0, 1)).unwrap();
        // e (f (x) m) = [e, f] m = (a - b) m = 4 m
        let col = t.basis_index(&[0], 0).unwrap();
        let row = t.basis_index(&[], 0).unwrap();
        assert_eq!(e[(row, col)].to_i64(), Some(4));
        // e (f^2 (x) m) = (2(a - b) - 2) f m = 6 f m
        let col2 = t.basis_index(&[0, 0], 0).unwrap();
        assert_eq!(e[(col, col2)].to_i64(), Some(6));
        drop(base);
    }

    #[test]
    fn torus_acts_by_shifted_weight() {
        let f = q5();
        let mut action = BTreeMap::new();
        action.insert((0, 0), MatrixE::from_ints(&f, &[&[2]]));
        let m = FdPModule::new(GLnContext::borel(3), f.clone(), 1, action).unwrap();
        let t = TruncatedInduced::build(&m, 2).unwrap();
        for (k, mono) in t.monomials().iter().enumerate() {
            let w = t.monomial_weight(mono);
            for (i, wi) in w.iter().enumerate() {
                let h = t.p_action((i, i)).unwrap();
                let expected = if i == 0 { 2 } else { 0 } + wi;
                assert_eq!(h[(k, k)].to_i64(), Some(expected));
            }
        }
    }

    #[test]
    fn truncation_is_a_p_module() {
        let f = q5();
        let t = TruncatedInduced::build(&breuil_module(&f), 3).unwrap();
        let m = t.as_module().unwrap();
        assert!(m.check_lie_hom().is_valid());
        assert!(m.category_membership().is_alun_fd);
        let m3 = FdPModule::trivial(&GLnContext::new(vec![1, 2]).unwrap(), &f, 1);
        let t3 = TruncatedInduced::build(&m3, 2).unwrap().as_module().unwrap();
        assert!(t3.check_lie_hom().is_valid());
    }

    #[test]
    fn gl3_multiplicity_two() {
        let f = q5();
        let m = FdPModule::trivial(&GLnContext::borel(3), &f, 1);
        let t = TruncatedInduced::build(&m, 3).unwrap();
        let mult = t.weight_multiplicities().unwrap();
        // lambda - alpha - beta = (-1, 0, 1): f_21 f_32 and f_31
        assert_eq!(mult[&vec![-1, 0, 1]], 2);
        assert_eq!(mult[&vec![0, 0, 0]], 1);
    }

    #[test]
    fn lowering_overflows_at_top_degree() {
        let f = q5();
        let m = FdPModule::trivial(&GLnContext::borel(2), &f, 1);
        let t = TruncatedInduced::build(&m, 2).unwrap();
        let (_, overflow) = t.g_action_partial((1, 0)).unwrap();
        assert!(overflow);
        let (_, none) = t.g_action_partial((0, 1)).unwrap();
        assert!(!none);
    }
}
