//! Finite checks at the level of the group ring `E[H]`, `H` inside `P`.
//!
//! A [`DgHWitness`] is a finite-dimensional space carrying both a group
//! action of `H` and a Lie algebra action; compatibility of the two is the
//! delta-level identity `h (x m) = (Ad(h) x)(h m)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::lift::{LiftedRep, SmoothCharacter};
use crate::matrix::MatrixE;
use crate::modules::Generator;
use crate::root_data::{ad_action, GLnContext, GroupElement};
use crate::sample::Sampler;

/// A finite `E`-linear combination of group elements.
#[derive(Debug, Clone)]
pub struct GroupRingElement {
    n: usize,
    terms: Vec<(Elem, GroupElement)>,
}

impl GroupRingElement {
    pub fn zero(n: usize) -> Self {
        GroupRingElement { n, terms: Vec::new() }
    }

    pub fn delta(h: &GroupElement) -> Self {
        GroupRingElement { n: h.n(), terms: vec![(h.field().one(), h.clone())] }
    }

    pub fn terms(&self) -> &[(Elem, GroupElement)] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        GroupRingElement { n: self.n, terms }
    }

    pub fn scale(&self, c: &Elem) -> Self {
        let terms = self.terms.iter().map(|(a, h)| (a.mul(c), h.clone())).collect();
        GroupRingElement { n: self.n, terms }
    }

    /// Convolution: `delta_g * delta_h = delta_(gh)`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, g) in &self.terms {
            for (b, h) in &other.terms {
                terms.push((a.mul(b), g.mul(h)));
            }
        }
        GroupRingElement { n: self.n, terms }
    }

    /// The operator `sum c_h rho(h)` on a witness.
    pub fn act(&self, w: &DgHWitness) -> Result<MatrixE> {
        let mut acc = MatrixE::zeros(w.field(), w.dim(), w.dim());
        for (c, h) in &self.terms {
            acc = acc.add(&w.group_action(h)?.scale(c));
        }
        Ok(acc)
    }
}

pub type GroupAction = Arc<dyn Fn(&GroupElement) -> Result<MatrixE> + Send + Sync>;

/// A space with compatible-looking group and Lie algebra actions.
#[derive(Clone)]
pub struct DgHWitness {
    ctx: GLnContext,
    field: Field,
    dim: usize,
    group: GroupAction,
    lie: BTreeMap<Generator, MatrixE>,
    scope: Vec<Generator>,
    digits: i64,
}

impl fmt::Debug for DgHWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DgHWitness").field("n", &self.ctx.n).field("dim", &self.dim).field("scope", &self.scope).finish_non_exhaustive()
    }
}

impl DgHWitness {
    /// `lie` lists the nonzero generator images; generators in `scope`
    /// without an entry act by zero.
    pub fn new(
        ctx: &GLnContext,
        field: &Field,
        dim: usize,
        group: GroupAction,
        lie: BTreeMap<Generator, MatrixE>,
        scope: Vec<Generator>,
    ) -> Result<Self> {
        for (g, m) in &lie {
            if !scope.contains(g) {
                return Err(Error::InvalidModule(format!("e_{}_{} has an image but is not in scope", g.0 + 1, g.1 + 1)));
            }
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch(format!("Lie image of e_{}_{}", g.0 + 1, g.1 + 1)));
            }
        }
        Ok(DgHWitness { ctx: ctx.clone(), field: field.clone(), dim, group, lie, scope, digits: check_digits(field) })
    }

    /// The lifted group action together with the module's own Lie action.
    pub fn from_lift(rep: &LiftedRep) -> Self {
        let module = rep.module();
        let shared = Arc::new(rep.clone());
        let group: GroupAction = Arc::new(move |h| shared.lift_parabolic_eval(h));
        DgHWitness {
            ctx: rep.ctx().clone(),
            field: rep.field().clone(),
            dim: rep.dim(),
            group,
            lie: module.explicit_action().clone(),
            scope: module.scope(),
            digits: lift_check_digits(rep),
        }
    }

    /// Trivial group action and zero Lie action on all of `g`.
    pub fn trivial(ctx: &GLnContext, field: &Field, dim: usize) -> Self {
        let id = MatrixE::identity(field, dim);
        let group: GroupAction = Arc::new(move |_| Ok(id.clone()));
        DgHWitness {
            ctx: ctx.clone(),
            field: field.clone(),
            dim,
            group,
            lie: BTreeMap::new(),
            scope: ctx.all_generators(),
            digits: check_digits(field),
        }
    }

    /// A one-dimensional smooth character: locally constant, so `g` acts by zero.
    pub fn character(ctx: &GLnContext, field: &Field, alpha: SmoothCharacter) -> Self {
        let c = ctx.clone();
        let f = field.clone();
        let group: GroupAction = Arc::new(move |h| {
            let v = alpha.eval(h, &c)?;
            Ok(MatrixE::diagonal(&f, &[v]))
        });
        DgHWitness {
            ctx: ctx.clone(),
            field: field.clone(),
            dim: 1,
            group,
            lie: BTreeMap::new(),
            scope: ctx.all_generators(),
            digits: check_digits(field),
        }
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

    /// Digits the compatibility check asserts.
    pub fn digits(&self) -> i64 {
        self.digits
    }

    pub fn scope(&self) -> &[Generator] {
        &self.scope
    }

    pub fn group_action(&self, h: &GroupElement) -> Result<MatrixE> {
        (self.group)(h)
    }

    pub fn lie_generator(&self, g: Generator) -> MatrixE {
        self.lie.get(&g).cloned().unwrap_or_else(|| MatrixE::zeros(&self.field, self.dim, self.dim))
    }

    /// Action of `x = sum x_ij e_ij`; fails if `x` leaves the scope.
    pub fn lie_action(&self, x: &MatrixE) -> Result<MatrixE> {
        let n = self.ctx.n;
        let mut acc = MatrixE::zeros(&self.field, self.dim, self.dim);
        for i in 0..n {
            for j in 0..n {
                let c = &x[(i, j)];
                if c.is_zero() {
                    continue;
                }
                if !self.scope.contains(&(i, j)) {
                    return Err(Error::NotInParabolic(format!("e_{}_{} is outside the Lie scope", i + 1, j + 1)));
                }
                if let Some(m) = self.lie.get(&(i, j)) {
                    acc = acc.add(&m.scale(c));
                }
            }
        }
        Ok(acc)
    }

    /// The same witness with the Lie images of `a` and `b` exchanged.
    pub fn with_swapped(&self, a: Generator, b: Generator) -> Self {
        let mut out = self.clone();
        let ia = self.lie_generator(a);
        let ib = self.lie_generator(b);
        out.lie.insert(a, ib);
        out.lie.insert(b, ia);
        out
    }
}

/// `zeta_Ad(delta_h (x) x) = Ad(h)(x) (x) delta_h`.
pub fn zeta_ad_delta(h: &GroupElement, x: &MatrixE) -> Result<(MatrixE, GroupElement)> {
    Ok((ad_action(h, x)?, h.clone()))
}

/// Coefficients of `Ad(h)(x)` in the basis `e_ij`, zeros omitted.
pub fn ad_coefficients(h: &GroupElement, x: &MatrixE) -> Result<Vec<(Generator, Elem)>> {
    let y = ad_action(h, x)?;
    let n = y.rows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !y[(i, j)].is_zero() {
                out.push(((i, j), y[(i, j)].clone()));
            }
        }
    }
    Ok(out)
}

const CHECK_SLACK: i64 = 4;

/// Digits asserted by the finite checks.
pub fn check_digits(field: &Field) -> i64 {
    field.cap() - CHECK_SLACK
}

/// Like [`check_digits`], but no more than the lift's inputs determine.
pub fn lift_check_digits(rep: &LiftedRep) -> i64 {
    check_digits(rep.field()).min(rep.input_digits() - CHECK_SLACK)
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DgHReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl DgHReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sample_h(s: &mut Sampler, ctx: &GLnContext) -> GroupElement {
    s.parabolic_element(ctx)
}

fn fmt_gen(g: Generator) -> String {
    format!("e_{}_{}", g.0 + 1, g.1 + 1)
}

/// `rho(h) phi(x) = phi(Ad(h) x) rho(h)` for sampled `h` in `P` and `x` in the scope.
pub fn check_dgh_compatibility(w: &DgHWitness, samples: usize, seed: u64) -> DgHReport {
    let mut s = Sampler::new(&w.field, seed);
    let digits = w.digits;
    let mut report = DgHReport::default();
    for k in 0..samples {
        let h = sample_h(&mut s, &w.ctx);
        let g = s.choose_generator(&w.scope);
        report.checked += 1;
        let x = MatrixE::unit(&w.field, w.ctx.n, g.0, g.1);
        let outcome = (|| -> Result<bool> {
            let rho = w.group_action(&h)?;
            let lhs = rho.mul(&w.lie_generator(g));
            let rhs = w.lie_action(&ad_action(&h, &x)?)?.mul(&rho);
            Ok(lhs.agrees_to(&rhs, digits))
        })();
        match outcome {
            Ok(true) => {}
            Ok(false) => report.violations.push(format!("sample {k}: h (x m) != Ad(h)x (h m) for x = {}", fmt_gen(g))),
            Err(e) => report.violations.push(format!("sample {k}: {e}")),
        }
    }
    report
}

fn common_scope(a: &DgHWitness, b: &DgHWitness) -> Vec<Generator> {
    a.scope.iter().filter(|g| b.scope.contains(g)).copied().collect()
}

fn same_setting(a: &DgHWitness, b: &DgHWitness) -> Result<()> {
    if a.ctx != b.ctx {
        return Err(Error::DimensionMismatch("witnesses live on different groups".into()));
    }
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// `h (a (x) b) = h a (x) h b` and `x (a (x) b) = x a (x) b + a (x) x b`.
pub fn tensor_witness(a: &DgHWitness, b: &DgHWitness) -> Result<DgHWitness> {
    same_setting(a, b)?;
    let scope = common_scope(a, b);
    let ia = MatrixE::identity(&a.field, a.dim);
    let ib = MatrixE::identity(&b.field, b.dim);
    let mut lie = BTreeMap::new();
    for &g in &scope {
        let m = a.lie_generator(g).kron(&ib).add(&ia.kron(&b.lie_generator(g)));
        if !m.is_zero() {
            lie.insert(g, m);
        }
    }
    let (ga, gb) = (a.group.clone(), b.group.clone());
    let group: GroupAction = Arc::new(move |h| Ok(ga(h)?.kron(&gb(h)?)));
    DgHWitness::new(&a.ctx, &a.field, a.dim * b.dim, group, lie, scope)
}

/// `Lift(M, log) (x) X`.
pub fn tensor_dgh(m: &LiftedRep, x: &DgHWitness) -> Result<DgHWitness> {
    tensor_witness(&DgHWitness::from_lift(m), x)
}

/// `Hom(M, X)` realised as `X (x) M*`: the map `E_ab : m_b -> x_a` sits at
/// index `a * dim M + b`, and `(h s)(m) = h s(h^-1 m)`.
pub fn hom_witness(m: &DgHWitness, x: &DgHWitness) -> Result<DgHWitness> {
    same_setting(m, x)?;
    let scope = common_scope(m, x);
    let im = MatrixE::identity(&m.field, m.dim);
    let ix = MatrixE::identity(&x.field, x.dim);
    let mut lie = BTreeMap::new();
    for &g in &scope {
        let op = x.lie_generator(g).kron(&im).sub(&ix.kron(&m.lie_generator(g).transpose()));
        if !op.is_zero() {
            lie.insert(g, op);
        }
    }
    let (gm, gx) = (m.group.clone(), x.group.clone());
    let group: GroupAction = Arc::new(move |h| {
        let inv = h.inverse()?;
        Ok(gx(h)?.kron(&gm(&inv)?.transpose()))
    });
    DgHWitness::new(&m.ctx, &m.field, m.dim * x.dim, group, lie, scope)
}

/// Evaluation `M (x) Hom(M, X) -> X`, `m_b (x) E_ac -> delta_bc x_a`.
pub fn counit_matrix(field: &Field, dm: usize, dx: usize) -> MatrixE {
    let mut e = MatrixE::zeros(field, dx, dm * dx * dm);
    for b in 0..dm {
        for a in 0..dx {
            e[(a, b * dx * dm + a * dm + b)] = field.one();
        }
    }
    e
}

/// Coevaluation `X -> Hom(M, M (x) X)`, `x_a -> (m_b -> m_b (x) x_a)`.
pub fn unit_matrix(field: &Field, dm: usize, dx: usize) -> MatrixE {
    let mut u = MatrixE::zeros(field, dm * dx * dm, dx);
    for a in 0..dx {
        for b in 0..dm {
            u[((b * dx + a) * dm + b, a)] = field.one();
        }
    }
    u
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AdjunctionReport {
    pub counit: DgHReport,
    pub unit: DgHReport,
    pub triangle_identity: bool,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.counit.passed() && self.unit.passed() && self.triangle_identity
    }
}

/// Checks that `f : A -> B` commutes with sampled deltas and every common Lie generator.
pub fn check_intertwiner(f: &MatrixE, a: &DgHWitness, b: &DgHWitness, samples: usize, seed: u64) -> DgHReport {
    let mut report = DgHReport::default();
    if let Err(e) = same_setting(a, b) {
        report.violations.push(e.to_string());
        return report;
    }
    let digits = check_digits(&a.field);
    let mut s = Sampler::new(&a.field, seed);
    for k in 0..samples {
        let h = sample_h(&mut s, &a.ctx);
        report.checked += 1;
        match (a.group_action(&h), b.group_action(&h)) {
            (Ok(ra), Ok(rb)) => {
                if !f.mul(&ra).agrees_to(&rb.mul(f), digits) {
                    report.violations.push(format!("sample {k}: not E[H]-linear"));
                }
            }
            (Err(e), _) | (_, Err(e)) => report.violations.push(format!("sample {k}: {e}")),
        }
    }
    for g in common_scope(a, b) {
        report.checked += 1;
        if !f.mul(&a.lie_generator(g)).agrees_to(&b.lie_generator(g).mul(f), digits) {
            report.violations.push(format!("not linear for {}", fmt_gen(g)));
        }
    }
    report
}

/// Counit at `x`, unit at `y`, and the triangle identity
/// `eps_(M (x) Y) o (id (x) eta_Y) = id` on `M (x) Y`.
pub fn adjunction_check(m: &LiftedRep, x: &DgHWitness, y: &DgHWitness, samples: usize, seed: u64) -> Result<AdjunctionReport> {
    let mw = DgHWitness::from_lift(m);
    let f = m.field();
    let dm = mw.dim;

    let source = tensor_witness(&mw, &hom_witness(&mw, x)?)?;
    let counit = check_intertwiner(&counit_matrix(f, dm, x.dim), &source, x, samples, seed);

    let target = hom_witness(&mw, &tensor_witness(&mw, y)?)?;
    let unit = check_intertwiner(&unit_matrix(f, dm, y.dim), y, &target, samples, seed.wrapping_add(1));

    let eta = unit_matrix(f, dm, y.dim);
    let lifted = MatrixE::identity(f, dm).kron(&eta);
    let eps = counit_matrix(f, dm, dm * y.dim);
    let triangle_identity = eps.mul(&lifted).approx_eq(&MatrixE::identity(f, dm * y.dim), 0);

    Ok(AdjunctionReport { counit, unit, triangle_identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::smooth_twist;
    use crate::modules::{breuil_module, schraen_module, standard};
    use crate::torus_log::TorusLogarithm;

    fn q5() -> Field {
        Field::qp(5, 20).unwrap()
    }

    fn breuil_rep(f: &Field) -> LiftedRep {
        let log = TorusLogarithm::standard(f, vec![f.int(7), f.int(7)]).unwrap();
        LiftedRep::new(breuil_module(f), log).unwrap()
    }

    #[test]
    fn zeta_on_deltas() {
        let f = q5();
        let x = MatrixE::unit(&f, 2, 0, 1);
        let (y, h) = zeta_ad_delta(&GroupElement::identity(&f, 2), &x).unwrap();
        assert!(y.approx_eq(&x, 0));
        assert!(h.matrix().approx_eq(&MatrixE::identity(&f, 2), 0));
        let d = GroupElement::from_ints(&f, &[&[3, 0], &[0, 7]]).unwrap();
        let (y, _) = zeta_ad_delta(&d, &x).unwrap();
        assert!(y.approx_eq(&x.scale(&f.rational(3, 7).unwrap()), 0));
    }

    #[test]
    fn ad_coefficients_are_conjugation_entries() {
        let f = q5();
        let h = GroupElement::from_ints(&f, &[&[2, 1, 0], &[0, 1, 4], &[1, 0, 1]]).unwrap();
        let hinv = h.inverse().unwrap();
        // oracle: h e_kl h^-1 = (column k of h)(row l of h^-1)
        let (k, l) = (1, 2);
        let coeffs = ad_coefficients(&h, &MatrixE::unit(&f, 3, k, l)).unwrap();
        for ((i, j), c) in coeffs {
            let expected = h.matrix()[(i, k)].mul(&hinv.matrix()[(l, j)]);
            assert!(c.approx_eq(&expected, 0));
        }
    }

    #[test]
    fn delta_then_multiply() {
        let f = q5();
        let h = GroupElement::from_ints(&f, &[&[2, 1], &[0, 3]]).unwrap();
        let x = MatrixE::from_ints(&f, &[&[1, 4], &[0, -2]]);
        let (y, h2) = zeta_ad_delta(&h, &x).unwrap();
        assert!(y.mul(h2.matrix()).approx_eq(&h.matrix().mul(&x), 0));
    }

    #[test]
    fn group_ring_acts_multiplicatively() {
        let f = q5();
        let w = DgHWitness::from_lift(&breuil_rep(&f));
        let g = GroupElement::from_ints(&f, &[&[5, 1], &[0, 2]]).unwrap();
        let h = GroupElement::from_ints(&f, &[&[1, 3], &[0, 25]]).unwrap();
        let a = GroupRingElement::delta(&g).add(&GroupRingElement::delta(&h).scale(&f.int(3)));
        let b = GroupRingElement::delta(&h).add(&GroupRingElement::delta(&g).scale(&f.int(-2)));
        let lhs = a.mul(&b).act(&w).unwrap();
        let rhs = a.act(&w).unwrap().mul(&b.act(&w).unwrap());
        assert!(lhs.agrees_to(&rhs, 16));
        assert!(GroupRingElement::zero(2).act(&w).unwrap().is_zero());
    }

    #[test]
    fn lifted_examples_are_compatible() {
        let f = q5();
        let trivial = DgHWitness::trivial(&GLnContext::borel(2), &f, 2);
        assert!(check_dgh_compatibility(&trivial, 20, 1).passed());
        let w = DgHWitness::from_lift(&breuil_rep(&f));
        assert!(check_dgh_compatibility(&w, 30, 2).passed());
        let log3 = TorusLogarithm::standard(&f, vec![f.int(2), f.int(3), f.int(2)]).unwrap();
        let s = DgHWitness::from_lift(&LiftedRep::new(schraen_module(&f), log3).unwrap());
        assert!(check_dgh_compatibility(&s, 30, 3).passed());
    }

    #[test]
    fn corrupted_action_is_caught() {
        let f = q5();
        let w = DgHWitness::from_lift(&breuil_rep(&f)).with_swapped((0, 0), (0, 1));
        let r = check_dgh_compatibility(&w, 30, 4);
        assert!(!r.passed());
    }

    #[test]
    fn tensor_with_character_is_the_twist() {
        let f = q5();
        let ctx = GLnContext::borel(2);
        let rep = breuil_rep(&f);
        let alpha = SmoothCharacter::alpha_k(&f, 4).unwrap();
        let x = DgHWitness::character(&ctx, &f, alpha.clone());
        let t = tensor_dgh(&rep, &x).unwrap();
        assert!(check_dgh_compatibility(&t, 20, 5).passed());
        let g = GroupElement::from_ints(&f, &[&[25, 3], &[0, 5]]).unwrap();
        let expected = smooth_twist(&rep.lift_parabolic_eval(&g).unwrap(), &alpha, &g, &ctx).unwrap();
        assert!(t.group_action(&g).unwrap().agrees_to(&expected, 16));
        let one = tensor_dgh(&rep, &DgHWitness::trivial(&ctx, &f, 1)).unwrap();
        assert!(one.group_action(&g).unwrap().agrees_to(&rep.lift_parabolic_eval(&g).unwrap(), 16));
    }

    #[test]
    fn counit_is_evaluation() {
        let f = q5();
        let ctx = GLnContext::borel(2);
        let rep = breuil_rep(&f);
        let x = DgHWitness::character(&ctx, &f, SmoothCharacter::alpha_k(&f, 4).unwrap());
        let eps = counit_matrix(&f, 2, 1);
        // sigma = (s_0, s_1) : m_b -> s_b x_0; eps(m_b (x) sigma) = s_b
        let sigma = [f.int(3), f.int(-8)];
        for b in 0..2 {
            let mut v = vec![f.zero(); 4];
            for c in 0..2 {
                v[b * 2 + c] = sigma[c].clone();
            }
            let out = eps.mul_vec(&v);
            assert!(out[0].approx_eq(&sigma[b], 0));
        }
        let r = adjunction_check(&rep, &x, &x, 20, 6).unwrap();
        assert!(r.passed(), "{r:?}");
        let std = LiftedRep::new(standard(&ctx, &f), TorusLogarithm::standard(&f, vec![f.int(1), f.int(2)]).unwrap()).unwrap();
        let y = DgHWitness::from_lift(&rep);
        assert!(adjunction_check(&std, &y, &x, 15, 7).unwrap().passed());
    }

    #[test]
    fn hom_action_matches_conjugation() {
        let f = q5();
        let rep = breuil_rep(&f);
        let m = DgHWitness::from_lift(&rep);
        let x = DgHWitness::from_lift(&LiftedRep::new(standard(&GLnContext::borel(2), &f), rep.log().clone()).unwrap());
        let hom = hom_witness(&m, &x).unwrap();
        let h = GroupElement::from_ints(&f, &[&[5, 2], &[0, 3]]).unwrap();
        // oracle: (h s) = rho_x(h) s rho_m(h)^-1, entry (a, b) at a * 2 + b
        let s = MatrixE::from_ints(&f, &[&[1, 2], &[-3, 4]]);
        let expect = x.group_action(&h).unwrap().mul(&s).mul(&m.group_action(&h).unwrap().inverse().unwrap());
        let vec_s: Vec<Elem> = s.entries().to_vec();
        let got = hom.group_action(&h).unwrap().mul_vec(&vec_s);
        for (a, e) in got.iter().zip(expect.entries()) {
            assert!(a.approx_eq(e, 4));
        }
        assert!(check_dgh_compatibility(&hom, 20, 8).passed());
    }
}
