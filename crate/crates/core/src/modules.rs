//! Finite-dimensional modules over a parabolic subalgebra `p` of `gl_n`,
//! given by the images of the matrix units `e_ij`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{primary_decomposition, MatrixE, PrimaryDecomposition};
use crate::root_data::GLnContext;

pub type Generator = (usize, usize);

/// A representation `phi: p -> End(E^dim)`. Generators without an entry act
/// by zero. If any generator outside `p` is given the module is treated as a
/// `gl_n`-module.
#[derive(Debug, Clone, PartialEq)]
pub struct FdPModule {
    ctx: GLnContext,
    field: Field,
    dim: usize,
    action: BTreeMap<Generator, MatrixE>,
    full: bool,
}

impl FdPModule {
    pub fn new(ctx: GLnContext, field: Field, dim: usize, action: BTreeMap<Generator, MatrixE>) -> Result<Self> {
        ctx.validate()?;
        if dim == 0 {
            return Err(Error::InvalidModule("dimension must be positive".into()));
        }
        for (&(i, j), m) in &action {
            if i >= ctx.n || j >= ctx.n {
                return Err(Error::InvalidModule(format!("generator e_{}_{} out of range", i + 1, j + 1)));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvalidModule(format!(
                    "image of e_{}_{} is {}x{}, expected {dim}x{dim}",
                    i + 1,
                    j + 1,
                    m.rows(),
                    m.cols()
                )));
            }
            if m.field() != &field {
                return Err(Error::FieldMismatch);
            }
        }
        let full = action.keys().any(|&(i, j)| !ctx.in_p(i, j));
        let action = action.into_iter().filter(|(_, m)| !m.is_exact_zero_matrix()).collect();
        Ok(FdPModule { ctx, field, dim, action, full })
    }

    /// The zero action on `E^dim`.
    pub fn trivial(ctx: &GLnContext, field: &Field, dim: usize) -> Self {
        FdPModule { ctx: ctx.clone(), field: field.clone(), dim, action: BTreeMap::new(), full: true }
    }

    pub fn ctx(&self) -> &GLnContext {
        &self.ctx
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether the action is given on all of `gl_n`.
    pub fn is_g_module(&self) -> bool {
        self.full
    }

    /// Marks a module built from `gl_n`-equivariant data as a `gl_n`-module.
    pub fn as_g_module(mut self) -> Self {
        self.full = true;
        self
    }

    /// Generators the action is defined on.
    pub fn scope(&self) -> Vec<Generator> {
        if self.full {
            self.ctx.all_generators()
        } else {
            self.ctx.p_generators()
        }
    }

    pub fn in_scope(&self, i: usize, j: usize) -> bool {
        self.full || self.ctx.in_p(i, j)
    }

    pub fn explicit_action(&self) -> &BTreeMap<Generator, MatrixE> {
        &self.action
    }

    /// `phi(e_ij)`.
    pub fn phi(&self, i: usize, j: usize) -> MatrixE {
        self.action.get(&(i, j)).cloned().unwrap_or_else(|| MatrixE::zeros(&self.field, self.dim, self.dim))
    }

    /// `phi(x) = sum x_ij phi(e_ij)` for `x` in the domain of the action.
    pub fn phi_of(&self, x: &MatrixE) -> Result<MatrixE> {
        let n = self.ctx.n;
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch(format!("expected a {n}x{n} Lie algebra element")));
        }
        let mut acc = MatrixE::zeros(&self.field, self.dim, self.dim);
        for i in 0..n {
            for j in 0..n {
                let c = &x[(i, j)];
                if c.is_zero() {
                    continue;
                }
                if !self.in_scope(i, j) {
                    return Err(Error::NotInParabolic(format!("e_{}_{} is outside p", i + 1, j + 1)));
                }
                if let Some(m) = self.action.get(&(i, j)) {
                    acc = acc.add(&m.scale(c));
                }
            }
        }
        Ok(acc)
    }

    /// Torus images `phi(e_11), ..., phi(e_nn)`.
    pub fn torus_operators(&self) -> Vec<MatrixE> {
        (0..self.ctx.n).map(|i| self.phi(i, i)).collect()
    }

    /// The same module with every operator replaced by `Q phi Q^-1`.
    pub fn conjugate(&self, q: &MatrixE) -> Result<Self> {
        let qinv = q.inverse()?;
        let action = self.action.iter().map(|(&k, m)| (k, q.mul(m).mul(&qinv))).collect();
        Ok(FdPModule { action, ..self.clone() })
    }

    pub fn to_field(&self, field: &Field) -> Result<Self> {
        let action = self.action.iter().map(|(&k, m)| Ok((k, m.to_field(field)?))).collect::<Result<BTreeMap<_, _>>>()?;
        Ok(FdPModule { field: field.clone(), action, ..self.clone() })
    }

    pub fn weight_decomposition(&self, bound: Option<i64>) -> Result<PrimaryDecomposition> {
        primary_decomposition(&self.torus_operators(), bound)
    }

    pub fn check_lie_hom(&self) -> LieHomReport {
        check_lie_hom(self)
    }

    pub fn category_membership(&self) -> CategoryReport {
        category_membership(self)
    }
}

impl MatrixE {
    pub(crate) fn is_exact_zero_matrix(&self) -> bool {
        self.entries().iter().all(|x| x.is_exact_zero())
    }
}

/// `[e_ij, e_kl] = delta_jk e_il - delta_li e_kj` as a list of signed units.
pub fn bracket_units(a: Generator, b: Generator) -> Vec<(i64, Generator)> {
    let (i, j) = a;
    let (k, l) = b;
    let mut out = Vec::new();
    if j == k {
        out.push((1, (i, l)));
    }
    if l == i {
        out.push((-1, (k, j)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieHomReport {
    /// Generator pairs (0-based) where `phi([a, b]) != [phi(a), phi(b)]`.
    pub violations: Vec<(Generator, Generator)>,
}

impl LieHomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_lie_hom(m: &FdPModule) -> LieHomReport {
    let gens = m.scope();
    let mut violations = Vec::new();
    let images: BTreeMap<Generator, MatrixE> = gens.iter().map(|&g| (g, m.phi(g.0, g.1))).collect();
    for (a_idx, &a) in gens.iter().enumerate() {
        for &b in &gens[a_idx + 1..] {
            let lhs = images[&a].commutator(&images[&b]);
            let mut rhs = MatrixE::zeros(m.field(), m.dim(), m.dim());
            for (s, g) in bracket_units(a, b) {
                let img = &images[&g];
                rhs = if s > 0 { rhs.add(img) } else { rhs.sub(img) };
            }
            if !lhs.sub(&rhs).is_zero() {
                violations.push((a, b));
            }
        }
    }
    LieHomReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryReport {
    pub is_lie_hom: bool,
    pub is_split: bool,
    pub has_algebraic_weights: bool,
    pub u_acts_nilpotently: bool,
    pub is_alun_fd: bool,
    /// Weights with the dimension of their generalized weight space.
    pub weights: Vec<(Vec<i64>, usize)>,
    /// For each generator of `u`, the least `k` with `phi(e)^k = 0` (`None` if not nilpotent).
    pub nilpotency_indices: Vec<(Generator, Option<usize>)>,
    /// Least `k` with `u^k M = 0`, if any.
    pub u_power_index: Option<usize>,
    pub notes: Vec<String>,
}

fn nilpotency_index(a: &MatrixE) -> Option<usize> {
    let d = a.rows();
    let mut p = MatrixE::identity(a.field(), d);
    for k in 0..=d {
        if p.is_zero() {
            return Some(k);
        }
        p = p.mul(a);
    }
    None
}

/// Columns spanning the image of a `d x r` matrix, reduced to a basis.
fn column_span(m: &MatrixE) -> Result<MatrixE> {
    let cols = m.column_basis()?;
    let vecs: Vec<_> = cols.iter().map(|&c| m.column(c)).collect();
    Ok(MatrixE::from_columns(m.field(), m.rows(), &vecs))
}

fn hstack(parts: &[MatrixE], field: &Field, rows: usize) -> MatrixE {
    let cols: Vec<_> = parts.iter().flat_map(|p| (0..p.cols()).map(|j| p.column(j))).collect();
    MatrixE::from_columns(field, rows, &cols)
}

/// Least `k` with `u^k M = 0`, computing `u^(i+1) M = span(phi(e) u^i M)`.
fn u_power_index(m: &FdPModule) -> Result<Option<usize>> {
    let gens: Vec<MatrixE> = m.ctx().u_generators().iter().map(|&(i, j)| m.phi(i, j)).collect();
    let mut w = MatrixE::identity(m.field(), m.dim());
    for k in 0..=m.dim() {
        if w.cols() == 0 {
            return Ok(Some(k));
        }
        let images: Vec<MatrixE> = gens.iter().map(|g| g.mul(&w)).collect();
        if images.is_empty() {
            return Ok(Some(k + 1));
        }
        w = column_span(&hstack(&images, m.field(), m.dim()))?;
    }
    Ok(None)
}

pub fn category_membership(m: &FdPModule) -> CategoryReport {
    let mut notes = Vec::new();
    let lie = check_lie_hom(m);
    let is_lie_hom = lie.is_valid();
    if !is_lie_hom {
        notes.push(format!("{} bracket violations", lie.violations.len()));
    }
    let (is_split, weights) = match m.weight_decomposition(None) {
        Ok(dec) => (true, dec.components.iter().map(|c| (c.weight.clone(), c.dim)).collect()),
        Err(e) => {
            notes.push(format!("weight decomposition: {e}"));
            (false, Vec::new())
        }
    };
    let nilpotency_indices: Vec<_> = m.ctx().u_generators().into_iter().map(|(i, j)| ((i, j), nilpotency_index(&m.phi(i, j)))).collect();
    let u_power = u_power_index(m).unwrap_or_else(|e| {
        notes.push(format!("u-power filtration: {e}"));
        None
    });
    let u_acts_nilpotently = nilpotency_indices.iter().all(|(_, k)| k.is_some()) && u_power.is_some();
    let has_algebraic_weights = is_split;
    CategoryReport {
        is_lie_hom,
        is_split,
        has_algebraic_weights,
        u_acts_nilpotently,
        is_alun_fd: is_lie_hom && is_split && has_algebraic_weights && u_acts_nilpotently,
        weights,
        nilpotency_indices,
        u_power_index: u_power,
        notes,
    }
}

/// Operators of `a` and `b` combined blockwise.
pub fn direct_sum(a: &FdPModule, b: &FdPModule) -> Result<FdPModule> {
    same_context(a, b)?;
    let d = a.dim + b.dim;
    let mut action = BTreeMap::new();
    for g in a.action.keys().chain(b.action.keys()) {
        let (x, y) = (a.phi(g.0, g.1), b.phi(g.0, g.1));
        let m = MatrixE::from_fn(&a.field, d, d, |i, j| {
            if i < a.dim && j < a.dim {
                x[(i, j)].clone()
            } else if i >= a.dim && j >= a.dim {
                y[(i - a.dim, j - a.dim)].clone()
            } else {
                a.field.zero()
            }
        });
        action.insert(*g, m);
    }
    Ok(FdPModule { ctx: a.ctx.clone(), field: a.field.clone(), dim: d, action, full: a.full && b.full })
}

/// `phi(x) = phi_a(x) (x) 1 + 1 (x) phi_b(x)` on `a (x) b`, basis index `i * dim_b + k`.
pub fn tensor(a: &FdPModule, b: &FdPModule) -> Result<FdPModule> {
    same_context(a, b)?;
    let ia = MatrixE::identity(&a.field, a.dim);
    let ib = MatrixE::identity(&a.field, b.dim);
    let mut action = BTreeMap::new();
    for g in a.action.keys().chain(b.action.keys()) {
        let m = a.phi(g.0, g.1).kron(&ib).add(&ia.kron(&b.phi(g.0, g.1)));
        action.insert(*g, m);
    }
    Ok(FdPModule { ctx: a.ctx.clone(), field: a.field.clone(), dim: a.dim * b.dim, action, full: a.full && b.full })
}

/// The contragredient: `phi*(x) = -phi(x)^T`.
pub fn dual(m: &FdPModule) -> FdPModule {
    let action = m.action.iter().map(|(&g, a)| (g, a.transpose().neg())).collect();
    FdPModule { action, ..m.clone() }
}

fn same_context(a: &FdPModule, b: &FdPModule) -> Result<()> {
    if a.ctx != b.ctx {
        return Err(Error::InvalidModule("modules live over different parabolics".into()));
    }
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// The standard representation `E^n` of `gl_n`.
pub fn standard(ctx: &GLnContext, field: &Field) -> FdPModule {
    let n = ctx.n;
    let action = ctx.all_generators().into_iter().map(|(i, j)| ((i, j), MatrixE::unit(field, n, i, j))).collect();
    FdPModule { ctx: ctx.clone(), field: field.clone(), dim: n, action, full: true }
}

/// `det^k`: one-dimensional, `e_ii` acting by `k`.
pub fn det_power(ctx: &GLnContext, field: &Field, k: i64) -> FdPModule {
    let action = (0..ctx.n).map(|i| ((i, i), MatrixE::from_ints(field, &[&[k]]))).collect();
    FdPModule { ctx: ctx.clone(), field: field.clone(), dim: 1, action, full: true }
}

/// Exponent vectors of degree `k` in `n` variables, lexicographically descending.
pub fn monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == n {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=k).rev() {
            prefix.push(a);
            go(n, k - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// `Sym^k` of the standard representation: `e_ij` acts as `x_i d/dx_j`.
pub fn sym_power(ctx: &GLnContext, field: &Field, k: usize) -> FdPModule {
    let n = ctx.n;
    let basis = monomials(n, k);
    let index: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let d = basis.len();
    let mut action = BTreeMap::new();
    for (i, j) in ctx.all_generators() {
        let mut m = MatrixE::zeros(field, d, d);
        for (col, mono) in basis.iter().enumerate() {
            if mono[j] == 0 {
                continue;
            }
            let mut target = mono.clone();
            target[j] -= 1;
            target[i] += 1;
            m[(index[&target], col)] = field.int(mono[j] as i64);
        }
        action.insert((i, j), m);
    }
    FdPModule { ctx: ctx.clone(), field: field.clone(), dim: d, action, full: true }
}

/// Inflation of a torus representation constant on Levi blocks: every
/// `e_ii` in block `b` acts by `lambda_b + N_b`, everything else by zero.
/// The `N_b` must commute and be nilpotent.
pub fn torus_inflation(ctx: &GLnContext, field: &Field, lambdas: &[i64], nilpotents: &[MatrixE]) -> Result<FdPModule> {
    let k = ctx.composition.len();
    if lambdas.len() != k || nilpotents.len() != k {
        return Err(Error::InvalidModule(format!("need one weight and one nilpotent per block ({k})")));
    }
    let dim = nilpotents[0].rows();
    let id = MatrixE::identity(field, dim);
    let mut action = BTreeMap::new();
    for (b, block) in ctx.blocks().into_iter().enumerate() {
        let op = id.scale(&field.int(lambdas[b])).add(&nilpotents[b]);
        for i in block {
            action.insert((i, i), op.clone());
        }
    }
    FdPModule::new(ctx.clone(), field.clone(), dim, action)
}

/// The two-dimensional Borel module of `gl_2` where `diag(x, y)` sends
/// `m_2` to `(x - y) m_1` and the nilradical acts by zero.
pub fn breuil_module(field: &Field) -> FdPModule {
    let n = MatrixE::from_ints(field, &[&[0, 1], &[0, 0]]);
    let mut action = BTreeMap::new();
    action.insert((0, 0), n.clone());
    action.insert((1, 1), n.neg());
    FdPModule::new(GLnContext::borel(2), field.clone(), 2, action).expect("valid")
}

/// One-dimensional Borel module of `gl_2` with `diag(x, y)` acting by `(k - 2) y`.
pub fn twist_module(field: &Field, k: i64) -> FdPModule {
    let mut action = BTreeMap::new();
    action.insert((1, 1), MatrixE::from_ints(field, &[&[k - 2]]));
    FdPModule::new(GLnContext::borel(2), field.clone(), 1, action).expect("valid")
}

/// The three-dimensional Borel module of `gl_3` where `diag(x, y, z)` acts by
/// `(-2x + y + z) E_12 + (-x - y + 2z) E_13`.
pub fn schraen_module(field: &Field) -> FdPModule {
    let e12 = MatrixE::unit(field, 3, 0, 1);
    let e13 = MatrixE::unit(field, 3, 0, 2);
    let comb = |a: i64, b: i64| e12.scale(&field.int(a)).add(&e13.scale(&field.int(b)));
    let mut action = BTreeMap::new();
    action.insert((0, 0), comb(-2, -1));
    action.insert((1, 1), comb(1, -1));
    action.insert((2, 2), comb(1, 2));
    FdPModule::new(GLnContext::borel(3), field.clone(), 3, action).expect("valid")
}

/// Whether the column span of `w` is stable under every operator of `m`.
pub fn is_invariant_subspace(m: &FdPModule, w: &MatrixE) -> Result<bool> {
    let r = w.rank()?;
    for g in m.scope() {
        let img = m.phi(g.0, g.1).mul(w);
        if hstack(&[w.clone(), img], m.field(), m.dim()).rank()? != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Submodule on the columns of `w` (assumed invariant, full column rank) and
/// the quotient by it, both in bases adapted to `w`.
pub fn sub_and_quotient(m: &FdPModule, w: &MatrixE) -> Result<(Option<FdPModule>, Option<FdPModule>)> {
    let d = m.dim();
    let r = w.cols();
    let field = m.field();
    let aug = hstack(&[w.clone(), MatrixE::identity(field, d)], field, d);
    let pivots = aug.column_basis()?;
    if pivots.len() != d || pivots[..r] != (0..r).collect::<Vec<_>>()[..] {
        return Err(Error::InvalidModule("subspace basis is not of full column rank".into()));
    }
    let cols: Vec<_> = pivots.iter().map(|&c| aug.column(c)).collect();
    let q = MatrixE::from_columns(field, d, &cols);
    let qinv = q.inverse()?;
    let mut sub = BTreeMap::new();
    let mut quo = BTreeMap::new();
    for g in m.scope() {
        let a = qinv.mul(&m.phi(g.0, g.1)).mul(&q);
        for i in r..d {
            for j in 0..r {
                if !a[(i, j)].is_zero() {
                    return Err(Error::InvalidModule("subspace is not invariant".into()));
                }
            }
        }
        sub.insert(g, MatrixE::from_fn(field, r, r, |i, j| a[(i, j)].clone()));
        quo.insert(g, MatrixE::from_fn(field, d - r, d - r, |i, j| a[(r + i, r + j)].clone()));
    }
    let mk = |dim: usize, action: BTreeMap<Generator, MatrixE>| -> Result<Option<FdPModule>> {
        if dim == 0 {
            return Ok(None);
        }
        let mut out = FdPModule::new(m.ctx.clone(), field.clone(), dim, action)?;
        out.full = m.full;
        Ok(Some(out))
    };
    Ok((mk(r, sub)?, mk(d - r, quo)?))
}

/// The filtration `M_k = sum_lambda M_(lambda, k)` where `M_(lambda, k)` is
/// killed by `(phi(e_ii) - lambda_i)^k` for all `i`. Returns bases of
/// `M_1 ⊆ M_2 ⊆ ... ⊆ M_top = M`.
pub fn nilpotency_filtration(m: &FdPModule) -> Result<Vec<MatrixE>> {
    let dec = m.weight_decomposition(None)?;
    let field = m.field();
    let d = m.dim();
    let id = MatrixE::identity(field, d);
    let ops = m.torus_operators();
    let mut out = Vec::new();
    for k in 1..=d {
        let mut pieces = Vec::new();
        for comp in &dec.components {
            // M_(lambda,k) = P_lambda M ∩ ker of all (A_i - lambda_i)^k
            let mut stacked_rows = Vec::new();
            for (a, &l) in ops.iter().zip(&comp.weight) {
                let b = a.sub(&id.scale(&field.int(l))).pow(k as u32);
                stacked_rows.extend(b.to_rows());
            }
            let complement = id.sub(&comp.projector);
            stacked_rows.extend(complement.to_rows());
            let stacked = MatrixE::from_rows(field, stacked_rows)?;
            let ker = stacked.kernel()?;
            if !ker.is_empty() {
                pieces.push(MatrixE::from_columns(field, d, &ker));
            }
        }
        let span = if pieces.is_empty() { MatrixE::zeros(field, d, 0) } else { hstack(&pieces, field, d) };
        let done = span.cols() == d;
        out.push(span);
        if done {
            break;
        }
    }
    Ok(out)
}
