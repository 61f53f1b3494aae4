//! Seeded random objects for property checks.
//!
//! Everything is built from small exact integers and powers of `p`, so a
//! given seed yields the same mathematical objects at every precision cap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::{Elem, Field};
use crate::matrix::MatrixE;
use crate::modules::{det_power, direct_sum, dual, standard, sym_power, tensor, torus_inflation, FdPModule, Generator};
use crate::root_data::{GLnContext, GroupElement};
use crate::torus_log::TorusLogarithm;

pub struct Sampler {
    rng: ChaCha8Rng,
    field: Field,
}

/// A commuting family with known generalized eigenstructure.
#[derive(Debug, Clone)]
pub struct PlantedFamily {
    pub operators: Vec<MatrixE>,
    /// `(joint weight, multiplicity)`, sorted by weight.
    pub weights: Vec<(Vec<i64>, usize)>,
}

impl Sampler {
    pub fn new(field: &Field, seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), field: field.clone() }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// An integer prime to `p`.
    pub fn unit_int(&mut self, bound: i64) -> i64 {
        let p = self.field.p() as i64;
        loop {
            let k = self.rng.gen_range(-bound..=bound);
            if k % p != 0 {
                return k;
            }
        }
    }

    fn p_power(&self, k: i64) -> Elem {
        self.field.int(self.field.p() as i64).pow(k).expect("p is invertible")
    }

    /// `u * p^k` with `u` a small unit and `|k| <= spread`.
    pub fn nonzero(&mut self, spread: i64) -> Elem {
        let u = self.unit_int(30);
        let k = self.rng.gen_range(-spread..=spread);
        self.field.int(u).mul(&self.p_power(k))
    }

    /// A small integer, occasionally divided by `p`.
    pub fn scalar(&mut self) -> Elem {
        let a = self.field.int(self.rng.gen_range(-9..=9));
        if self.rng.gen_bool(0.25) {
            a.mul(&self.p_power(-1))
        } else {
            a
        }
    }

    pub fn torus_element(&mut self, n: usize) -> GroupElement {
        let d: Vec<Elem> = (0..n).map(|_| self.nonzero(2)).collect();
        GroupElement::diagonal(&d).expect("nonzero diagonal")
    }

    pub fn unit_torus_element(&mut self, n: usize) -> GroupElement {
        let d: Vec<Elem> = (0..n)
            .map(|_| {
                let u = self.unit_int(60);
                self.field.int(u)
            })
            .collect();
        GroupElement::diagonal(&d).expect("unit diagonal")
    }

    fn invertible_int_block(&mut self, s: usize, unit_det: bool) -> MatrixE {
        loop {
            let mut m = MatrixE::zeros(&self.field, s, s);
            for i in 0..s {
                for j in 0..s {
                    m[(i, j)] = self.field.int(self.rng.gen_range(-6..=6));
                }
            }
            let det = m.det().expect("exact integers");
            if det.is_zero() || (unit_det && !det.is_unit()) {
                continue;
            }
            return m;
        }
    }

    /// A matrix in `GL_d(Z_p)`.
    pub fn gl_zp(&mut self, d: usize) -> MatrixE {
        self.invertible_int_block(d, true)
    }

    /// A random element of `P`: invertible Levi blocks with scattered
    /// powers of `p`, and integer (sometimes `1/p`) unipotent entries.
    pub fn parabolic_element(&mut self, ctx: &GLnContext) -> GroupElement {
        let n = ctx.n;
        let mut m = MatrixE::zeros(&self.field, n, n);
        for block in ctx.blocks() {
            let s = block.len();
            let b = self.invertible_int_block(s, false);
            for i in 0..s {
                let k = self.rng.gen_range(-1..=1);
                let scale = self.p_power(k);
                for j in 0..s {
                    m[(block.start + i, block.start + j)] = b[(i, j)].mul(&scale);
                }
            }
        }
        for (i, j) in ctx.u_generators() {
            m[(i, j)] = self.scalar();
        }
        GroupElement::new(m).expect("invertible")
    }

    /// A product of random transvections and `diag(.., p^k, p^-k, ..)`
    /// factors inside each Levi block, so every block has determinant one.
    pub fn levi_sl_element(&mut self, ctx: &GLnContext) -> GroupElement {
        let n = ctx.n;
        let mut m = MatrixE::identity(&self.field, n);
        for block in ctx.blocks() {
            if block.len() < 2 {
                continue;
            }
            for _ in 0..(2 * block.len() + 2) {
                let i = self.rng.gen_range(block.clone());
                let mut j = self.rng.gen_range(block.clone());
                while j == i {
                    j = self.rng.gen_range(block.clone());
                }
                let step = if self.rng.gen_bool(0.2) {
                    let k = self.rng.gen_range(-1..=1);
                    let mut d = MatrixE::identity(&self.field, n);
                    d[(i, i)] = self.p_power(k);
                    d[(j, j)] = self.p_power(-k);
                    d
                } else {
                    let mut t = MatrixE::identity(&self.field, n);
                    t[(i, j)] = self.scalar();
                    t
                };
                m = m.mul(&step);
            }
        }
        GroupElement::new(m).expect("determinant one")
    }

    pub fn context(&mut self) -> GLnContext {
        let options: [&[usize]; 6] = [&[1, 1], &[2], &[1, 1, 1], &[2, 1], &[1, 2], &[3]];
        GLnContext::new(options.choose(&mut self.rng).expect("nonempty").to_vec()).expect("valid")
    }

    /// A context whose Levi has a block of size at least two.
    pub fn nonabelian_context(&mut self) -> GLnContext {
        let options: [&[usize]; 4] = [&[2], &[2, 1], &[1, 2], &[3]];
        GLnContext::new(options.choose(&mut self.rng).expect("nonempty").to_vec()).expect("valid")
    }

    /// A strictly upper triangular integer matrix.
    fn strict_upper(&mut self, d: usize) -> MatrixE {
        let mut m = MatrixE::zeros(&self.field, d, d);
        for i in 0..d {
            for j in i + 1..d {
                m[(i, j)] = self.field.int(self.rng.gen_range(-3..=3));
            }
        }
        m
    }

    /// Polynomials without constant term in one nilpotent, hence commuting.
    fn commuting_nilpotents(&mut self, d: usize, k: usize) -> Vec<MatrixE> {
        let n = self.strict_upper(d);
        let n2 = n.mul(&n);
        (0..k)
            .map(|_| {
                let a = self.field.int(self.rng.gen_range(-2..=2));
                let b = self.field.int(self.rng.gen_range(-2..=2));
                n.scale(&a).add(&n2.scale(&b))
            })
            .collect()
    }

    fn building_block(&mut self, ctx: &GLnContext) -> Result<FdPModule> {
        let f = self.field.clone();
        Ok(match self.rng.gen_range(0..6) {
            0 => standard(ctx, &f),
            1 => dual(&standard(ctx, &f)),
            2 => det_power(ctx, &f, self.rng.gen_range(-2..=2)),
            3 if ctx.n == 2 => sym_power(ctx, &f, 2),
            _ => {
                let d = self.rng.gen_range(1..=3);
                let k = ctx.composition.len();
                let lambdas: Vec<i64> = (0..k).map(|_| self.rng.gen_range(-2..=2)).collect();
                let nil = self.commuting_nilpotents(d, k);
                torus_inflation(ctx, &f, &lambdas, &nil)?
            }
        })
    }

    /// Sums and products of standard pieces, conjugated by `GL_d(Z_p)`; dimension at most 6.
    pub fn module(&mut self, ctx: &GLnContext) -> Result<FdPModule> {
        let mut m = self.building_block(ctx)?;
        for _ in 0..2 {
            let b = self.building_block(ctx)?;
            let combined = if self.rng.gen_bool(0.5) { tensor(&m, &b)? } else { direct_sum(&m, &b)? };
            if combined.dim() <= 6 {
                m = combined;
            }
        }
        let q = self.gl_zp(m.dim());
        m.conjugate(&q)
    }

    /// A branch value `a + p b` with small integers.
    pub fn branch(&mut self) -> Elem {
        let a = self.rng.gen_range(-20..=20);
        let b = self.rng.gen_range(-20..=20);
        self.field.int(a).add(&self.field.int(b * self.field.p() as i64))
    }

    /// A logarithm with unimodular-or-not integer `A` and random branches.
    pub fn torus_log(&mut self, n: usize, with_correction: bool) -> Result<TorusLogarithm> {
        let a = loop {
            let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| self.rng.gen_range(-2..=2)).collect()).collect();
            let m = MatrixE::from_fn(&self.field, n, n, |i, j| self.field.int(a[i][j]));
            if !m.det()?.is_zero() {
                break a;
            }
        };
        let branches: Vec<Elem> = (0..n).map(|_| self.branch()).collect();
        let log = TorusLogarithm::new(&self.field, a, branches)?;
        if with_correction {
            let mut c = MatrixE::zeros(&self.field, n, n);
            for i in 0..n {
                for j in 0..n {
                    c[(i, j)] = self.field.int(self.rng.gen_range(-3..=3));
                }
            }
            log.with_correction(c)
        } else {
            Ok(log)
        }
    }

    /// A commuting family with planted joint weights, conjugated by `GL_d(Z_p)`.
    pub fn planted_family(&mut self, dim: usize, operators: usize) -> PlantedFamily {
        let mut sizes = Vec::new();
        let mut left = dim;
        while left > 0 {
            let s = self.rng.gen_range(1..=left.min(3));
            sizes.push(s);
            left -= s;
        }
        let mut weights: Vec<Vec<i64>> = Vec::new();
        while weights.len() < sizes.len() {
            let w: Vec<i64> = (0..operators).map(|_| self.rng.gen_range(-4..=4)).collect();
            if !weights.contains(&w) {
                weights.push(w);
            }
        }
        let mut ops = vec![MatrixE::zeros(&self.field, dim, dim); operators];
        let mut offset = 0;
        for (s, w) in sizes.iter().zip(&weights) {
            let nil = self.commuting_nilpotents(*s, operators);
            for (k, op) in ops.iter_mut().enumerate() {
                for i in 0..*s {
                    for j in 0..*s {
                        let mut v = nil[k][(i, j)].clone();
                        if i == j {
                            v = v.add(&self.field.int(w[k]));
                        }
                        op[(offset + i, offset + j)] = v;
                    }
                }
            }
            offset += s;
        }
        let q = self.gl_zp(dim);
        let qi = q.inverse().expect("unit determinant");
        let operators = ops.iter().map(|a| q.mul(a).mul(&qi)).collect();
        let mut expected: Vec<(Vec<i64>, usize)> = weights.into_iter().zip(sizes).collect();
        expected.sort();
        PlantedFamily { operators, weights: expected }
    }

    pub fn choose_generator(&mut self, gens: &[Generator]) -> Generator {
        *gens.choose(&mut self.rng).expect("nonempty generator list")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_across_caps() {
        let f20 = Field::qp(5, 20).unwrap();
        let f40 = Field::qp(5, 40).unwrap();
        let ctx = GLnContext::borel(3);
        let g20 = Sampler::new(&f20, 9).parabolic_element(&ctx);
        let g40 = Sampler::new(&f40, 9).parabolic_element(&ctx);
        assert!(g40.to_field(&f20).unwrap().matrix().approx_eq(g20.matrix(), 0));
    }

    #[test]
    fn samples_are_well_formed() {
        let f = Field::qp(5, 20).unwrap();
        let mut s = Sampler::new(&f, 1);
        for _ in 0..10 {
            let ctx = s.context();
            let g = s.parabolic_element(&ctx);
            assert!(ctx.contains(g.matrix()));
            let h = s.levi_sl_element(&ctx);
            assert!(h.det().unwrap().approx_eq(&f.one(), 0));
            let m = s.module(&ctx).unwrap();
            assert!(m.dim() <= 6);
            assert!(m.check_lie_hom().is_valid());
            assert!(m.category_membership().is_alun_fd);
        }
        let fam = s.planted_family(5, 2);
        assert_eq!(fam.weights.iter().map(|w| w.1).sum::<usize>(), 5);
        assert!(fam.operators[0].mul(&fam.operators[1]).approx_eq(&fam.operators[1].mul(&fam.operators[0]), 0));
    }
}
