//! Evaluation of `Lift(M, log)` on the parabolic `P`.
//!
//! For `g = u * t * h` (unipotent radical, diagonal, determinant-one Levi
//! blocks written as transvections):
//!
//! ```text
//! lift(g) = exp(phi(log u)) * sum_lambda chi_lambda(t) P_lambda exp(phi_n(log t)) * prod exp(a phi(e_ij))
//! ```

use num_integer::Integer;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{nilpotent_exp, ss_nilpotent_parts, unipotent_log, MatrixE, PrimaryDecomposition};
use crate::modules::FdPModule;
use crate::root_data::{factor_levi, factor_parabolic, levi_transvections, GLnContext, GroupElement, PivotStrategy};
use crate::torus_log::{log_difference, valuation_vector, TorusLogarithm};

/// A module in the liftable class together with a torus logarithm.
#[derive(Debug, Clone)]
pub struct LiftedRep {
    module: FdPModule,
    log: TorusLogarithm,
    decomposition: PrimaryDecomposition,
    semisimple: Vec<MatrixE>,
    nilpotent: Vec<MatrixE>,
    strategy: PivotStrategy,
}

impl LiftedRep {
    pub fn new(module: FdPModule, log: TorusLogarithm) -> Result<Self> {
        let n = module.ctx().n;
        if log.rank() != n {
            return Err(Error::DimensionMismatch(format!("logarithm of rank {} on GL_{n}", log.rank())));
        }
        if log.field() != module.field() {
            return Err(Error::FieldMismatch);
        }
        let report = module.category_membership();
        if !report.is_alun_fd {
            let mut why = Vec::new();
            if !report.is_lie_hom {
                why.push("not a Lie algebra homomorphism".to_string());
            }
            if !report.is_split {
                why.push("torus action not split with integer weights".to_string());
            }
            if !report.u_acts_nilpotently {
                why.push("nilradical does not act nilpotently".to_string());
            }
            why.extend(report.notes);
            return Err(Error::NotLiftable(why.join("; ")));
        }
        let ops = module.torus_operators();
        let decomposition = module.weight_decomposition(None)?;
        let parts = ss_nilpotent_parts(&ops, Some(decomposition.bound))?;
        let (semisimple, nilpotent) = parts.into_iter().unzip();
        Ok(LiftedRep { module, log, decomposition, semisimple, nilpotent, strategy: PivotStrategy::default() })
    }

    /// Absolute digits to which the inputs (branches, correction, module
    /// entries) are known. Exact inputs count as known to the working cap.
    pub fn input_digits(&self) -> i64 {
        let f = self.field();
        let log = &self.log;
        let entries = log
            .branches()
            .iter()
            .chain(log.correction().into_iter().flat_map(|c| c.entries()))
            .chain(self.module.explicit_action().values().flat_map(|m| m.entries()));
        let ord = entries.map(Elem::prec_ord).min().unwrap_or(i64::MAX);
        (ord / f.e()).min(f.working_cap())
    }

    pub fn with_strategy(mut self, strategy: PivotStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn module(&self) -> &FdPModule {
        &self.module
    }

    pub fn log(&self) -> &TorusLogarithm {
        &self.log
    }

    pub fn ctx(&self) -> &GLnContext {
        self.module.ctx()
    }

    pub fn field(&self) -> &Field {
        self.module.field()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn decomposition(&self) -> &PrimaryDecomposition {
        &self.decomposition
    }

    /// Semisimple parts of `phi(e_ii)`.
    pub fn semisimple_parts(&self) -> &[MatrixE] {
        &self.semisimple
    }

    /// Nilpotent parts of `phi(e_ii)`.
    pub fn nilpotent_parts(&self) -> &[MatrixE] {
        &self.nilpotent
    }

    /// `phi_n(x) = sum x_i N_i` for `x` in `t_E`.
    pub fn phi_n(&self, x: &[Elem]) -> MatrixE {
        let d = self.dim();
        x.iter().zip(&self.nilpotent).fold(
            MatrixE::zeros(self.field(), d, d),
            |acc, (c, n)| {
                if c.is_exact_zero() {
                    acc
                } else {
                    acc.add(&n.scale(c))
                }
            },
        )
    }

    /// The same module and logarithm at another precision cap.
    pub fn to_field(&self, field: &Field) -> Result<Self> {
        Ok(LiftedRep::new(self.module.to_field(field)?, self.log.to_field(field)?)?.with_strategy(self.strategy))
    }

    /// A copy with another logarithm.
    pub fn with_log(&self, log: TorusLogarithm) -> Result<Self> {
        if log.rank() != self.log.rank() {
            return Err(Error::DimensionMismatch("logarithm rank".into()));
        }
        Ok(LiftedRep { log, ..self.clone() })
    }

    pub fn lift_unipotent_eval(&self, u: &GroupElement) -> Result<MatrixE> {
        lift_unipotent_eval(self, u)
    }

    pub fn lift_torus_eval(&self, t: &GroupElement) -> Result<MatrixE> {
        lift_torus_eval(self, t)
    }

    pub fn lift_parabolic_eval(&self, g: &GroupElement) -> Result<MatrixE> {
        lift_parabolic_eval(self, g)
    }
}

/// `exp(phi(log u))` for `u` in the unipotent radical.
pub fn lift_unipotent_eval(rep: &LiftedRep, u: &GroupElement) -> Result<MatrixE> {
    let ctx = rep.ctx();
    let m = u.matrix();
    let f = rep.field();
    for i in 0..ctx.n {
        for j in 0..ctx.n {
            let expected_zero = !ctx.in_u(i, j) && i != j;
            if expected_zero && !m[(i, j)].is_zero() {
                return Err(Error::NotInParabolic(format!("entry ({}, {}) of a unipotent radical element is nonzero", i + 1, j + 1)));
            }
            if i == j && !m[(i, j)].approx_eq(&f.one(), 0) {
                return Err(Error::NotUnipotent);
            }
        }
    }
    let x = unipotent_log(m)?;
    let y = rep.module.phi_of(&x)?;
    nilpotent_exp(&y).map_err(|e| match e {
        Error::NotNilpotent => Error::NotNilpotentAction("phi(log u) is not nilpotent".into()),
        other => other,
    })
}

/// `chi_lambda(t) = prod t_i^lambda_i`.
fn character(t: &[Elem], weight: &[i64]) -> Result<Elem> {
    t.iter().zip(weight).try_fold(t[0].field().one(), |acc, (x, &k)| if k == 0 { Ok(acc) } else { Ok(acc.mul(&x.pow(k)?)) })
}

/// `sum_lambda chi_lambda(t) P_lambda * exp(phi_n(log t))` for diagonal `t`.
pub fn lift_torus_eval(rep: &LiftedRep, t: &GroupElement) -> Result<MatrixE> {
    if !t.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let diag = t.diagonal_entries();
    let scalar = semisimple_factor(rep, &diag)?;
    let log_t = rep.log.evaluate(t)?;
    let unip = nilpotent_exp(&rep.phi_n(&log_t))?;
    Ok(scalar.mul(&unip))
}

fn semisimple_factor(rep: &LiftedRep, diag: &[Elem]) -> Result<MatrixE> {
    let d = rep.dim();
    let f = rep.field();
    if rep.decomposition.components.len() == 1 && rep.decomposition.components[0].weight.iter().all(|&w| w == 0) {
        return Ok(MatrixE::identity(f, d));
    }
    rep.decomposition
        .components
        .iter()
        .try_fold(MatrixE::zeros(f, d, d), |acc, c| Ok(acc.add(&c.projector.scale(&character(diag, &c.weight)?))))
}

/// The lift of a block-diagonal element with determinant-one blocks,
/// as a product over a transvection word.
pub fn lift_levi_sl_eval(rep: &LiftedRep, h: &GroupElement, strategy: PivotStrategy) -> Result<MatrixE> {
    let word = levi_transvections(h, rep.ctx(), strategy)?;
    let f = rep.field();
    let mut acc = MatrixE::identity(f, rep.dim());
    for letter in &word.letters {
        let y = rep.module.phi(letter.i, letter.j).scale(&letter.a);
        let step = nilpotent_exp(&y).map_err(|e| match e {
            Error::NotNilpotent => Error::NotNilpotentAction(format!("phi(e_{}_{}) is not nilpotent", letter.i + 1, letter.j + 1)),
            other => other,
        })?;
        acc = acc.mul(&step);
    }
    Ok(acc)
}

/// `lift(g)` for `g` in `P`, using the pivot strategy stored on `rep`.
pub fn lift_parabolic_eval(rep: &LiftedRep, g: &GroupElement) -> Result<MatrixE> {
    lift_parabolic_eval_with(rep, g, rep.strategy)
}

pub fn lift_parabolic_eval_with(rep: &LiftedRep, g: &GroupElement, strategy: PivotStrategy) -> Result<MatrixE> {
    let ctx = rep.ctx();
    let (u, l) = factor_parabolic(g, ctx)?;
    let (t, h) = factor_levi(&l, ctx)?;
    let a = lift_unipotent_eval(rep, &u)?;
    let b = lift_torus_eval(rep, &t)?;
    let c = lift_levi_sl_eval(rep, &h, strategy)?;
    Ok(a.mul(&b).mul(&c))
}

/// An unramified character `g -> p^(sum_b c_b v(det g_b))` on the Levi
/// blocks; half-integer exponents need `sqrt(p)` in the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothCharacter {
    pub exponents: Vec<Rational64>,
}

impl SmoothCharacter {
    pub fn new(exponents: Vec<Rational64>, field: &Field) -> Result<Self> {
        if exponents.iter().any(|c| !(c * 2).is_integer()) {
            return Err(Error::InvalidModule("character exponents must be half-integers".into()));
        }
        if exponents.iter().any(|c| !c.is_integer()) && !field.has_sqrt_p() {
            return Err(Error::MissingSqrtP);
        }
        Ok(SmoothCharacter { exponents })
    }

    pub fn trivial(blocks: usize) -> Self {
        SmoothCharacter { exponents: vec![Rational64::from_integer(0); blocks] }
    }

    /// `|ab|^(-(k-2)/2)` on the Borel of `GL_2`.
    pub fn alpha_k(field: &Field, k: i64) -> Result<Self> {
        let c = Rational64::new(k - 2, 2);
        Self::new(vec![c, c], field)
    }

    /// `alpha(g)` for `g` in `P` (only the block determinants matter).
    pub fn eval(&self, g: &GroupElement, ctx: &GLnContext) -> Result<Elem> {
        let f = g.field();
        if self.exponents.len() != ctx.composition.len() {
            return Err(Error::DimensionMismatch("one exponent per Levi block".into()));
        }
        let (_, l) = factor_parabolic(g, ctx)?;
        let (t, _) = factor_levi(&l, ctx)?;
        let v = valuation_vector(&t)?;
        let mut twice = 0i64;
        for (block, c) in ctx.blocks().iter().zip(&self.exponents) {
            let c2 = (c * 2).to_integer();
            twice += c2 * v[block.start];
        }
        if twice.is_even() {
            return f.int(f.p() as i64).pow(twice / 2);
        }
        let s = Elem::generator(f).filter(|_| f.has_sqrt_p()).ok_or(Error::MissingSqrtP)?;
        s.pow(twice)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|c| *c == Rational64::from_integer(0))
    }
}

/// `value * alpha(g)`.
pub fn smooth_twist(value: &MatrixE, alpha: &SmoothCharacter, g: &GroupElement, ctx: &GLnContext) -> Result<MatrixE> {
    if alpha.is_trivial() {
        return Ok(value.clone());
    }
    Ok(value.scale(&alpha.eval(g, ctx)?))
}

/// `exp(phi_n(eps(t)))` where `eps = log2 - log` is the change of logarithm.
pub fn change_log_factor(rep: &LiftedRep, log2: &TorusLogarithm, t: &GroupElement) -> Result<MatrixE> {
    let diff = log_difference(&rep.log, log2)?;
    let eps = diff.evaluate(t)?;
    nilpotent_exp(&rep.phi_n(&eps))
}

/// Evaluation of the lift on a subtorus `S -> T` given by the integer matrix
/// `embedding` (`t_j = prod_k s_k^(S_jk)`) with the restricted logarithm.
pub fn lift_subtorus_eval(rep: &LiftedRep, embedding: &[Vec<i64>], restricted: &TorusLogarithm, s: &GroupElement) -> Result<MatrixE> {
    let f = rep.field();
    let d = rep.dim();
    let diag = s.diagonal_entries();
    let r = diag.len();
    let mut scalar = MatrixE::zeros(f, d, d);
    for c in &rep.decomposition.components {
        let w: Vec<i64> = (0..r).map(|k| embedding.iter().zip(&c.weight).map(|(row, l)| row[k] * l).sum()).collect();
        scalar = scalar.add(&c.projector.scale(&character(&diag, &w)?));
    }
    let y = restricted.evaluate(s)?;
    let x: Vec<Elem> = embedding
        .iter()
        .map(|row| row.iter().zip(&y).fold(f.zero(), |acc, (&e, v)| if e == 0 { acc } else { acc.add(&v.mul(&f.int(e))) }))
        .collect();
    Ok(scalar.mul(&nilpotent_exp(&rep.phi_n(&x))?))
}
