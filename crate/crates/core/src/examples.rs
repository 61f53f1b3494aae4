//! Built-in examples: the two-dimensional `gl_2` module with its twists and
//! the three-dimensional `gl_3` module with a two-parameter logarithm.

use crate::error::Result;
use crate::field::{iwasawa_log, Elem, Field};
use crate::lift::{smooth_twist, LiftedRep, SmoothCharacter};
use crate::matrix::MatrixE;
use crate::modules::{breuil_module, schraen_module, tensor, twist_module};
use crate::root_data::GroupElement;
use crate::torus_log::TorusLogarithm;

/// `diag(a, d) -> (log_L a, log_L d)`.
pub fn breuil_log(field: &Field, l: &Elem) -> Result<TorusLogarithm> {
    TorusLogarithm::standard(field, vec![l.clone(), l.clone()])
}

pub fn breuil_rep(field: &Field, l: &Elem) -> Result<LiftedRep> {
    LiftedRep::new(breuil_module(field), breuil_log(field, l)?)
}

/// The module twisted by the weight `(k - 2) y`, and the smooth character `|ab|^-(k-2)/2`.
#[derive(Debug, Clone)]
pub struct BreuilTwist {
    pub rep: LiftedRep,
    pub alpha: SmoothCharacter,
}

impl BreuilTwist {
    pub fn new(field: &Field, l: &Elem, k: i64) -> Result<Self> {
        let module = tensor(&breuil_module(field), &twist_module(field, k))?;
        let rep = LiftedRep::new(module, breuil_log(field, l)?)?;
        Ok(BreuilTwist { rep, alpha: SmoothCharacter::alpha_k(field, k)? })
    }

    pub fn eval(&self, g: &GroupElement) -> Result<MatrixE> {
        smooth_twist(&self.rep.lift_parabolic_eval(g)?, &self.alpha, g, self.rep.ctx())
    }
}

/// `zeta(diag(a, b, c)) = (a^-2 b c, a^-1 b^-1 c^2, c)`.
pub const SCHRAEN_ZETA: [[i64; 3]; 3] = [[-2, 1, 1], [-1, -1, 2], [0, 0, 1]];

/// Logarithm with branch `L'` on the first and third coordinates of `zeta` and `L` on the second.
pub fn schraen_log(field: &Field, l: &Elem, lp: &Elem) -> Result<TorusLogarithm> {
    let a = SCHRAEN_ZETA.iter().map(|r| r.to_vec()).collect();
    TorusLogarithm::new(field, a, vec![lp.clone(), l.clone(), lp.clone()])
}

pub fn schraen_rep(field: &Field, l: &Elem, lp: &Elem) -> Result<LiftedRep> {
    LiftedRep::new(schraen_module(field), schraen_log(field, l, lp)?)
}

/// `(log_L' a + g, log_L' b + 2 g, log_L' c)` with
/// `g = -(log_L - log_L')(a^-1 b^-1 c^2) / 3`.
pub fn schraen_closed_form(t: &GroupElement, l: &Elem, lp: &Elem) -> Result<Vec<Elem>> {
    let f = t.field();
    let d = t.diagonal_entries();
    let (a, b, c) = (&d[0], &d[1], &d[2]);
    let w = a.inv()?.mul(&b.inv()?).mul(&c.mul(c));
    let gamma = iwasawa_log(&w, l)?.sub(&iwasawa_log(&w, lp)?).mul(&f.rational(-1, 3)?);
    Ok(vec![iwasawa_log(a, lp)?.add(&gamma), iwasawa_log(b, lp)?.add(&gamma.mul(&f.int(2))), iwasawa_log(c, lp)?])
}

/// One row of the comparison table.
#[derive(Debug, Clone)]
pub struct SchraenRow {
    pub element: GroupElement,
    pub computed: Vec<Elem>,
    pub closed_form: Vec<Elem>,
    pub agrees: bool,
}

/// Evaluates the logarithm on a few fixed torus elements and compares with the closed form.
pub fn schraen_table(field: &Field, l: &Elem, lp: &Elem, digits: i64) -> Result<Vec<SchraenRow>> {
    let log = schraen_log(field, l, lp)?;
    let p = field.p() as i64;
    let samples: [[(i64, i64); 3]; 5] = [
        [(p, 1), (1, 1), (1, 1)],
        [(1, 1), (p, 1), (1, 1)],
        [(1, 1), (1, 1), (p, 1)],
        [(2 * p * p, 1), (3, 1), (7, p * p * p)],
        [(p + 1, 1), (1, p), (4 * p, 3)],
    ];
    samples
        .iter()
        .map(|row| {
            let entries = row.iter().map(|&(a, b)| field.rational(a, b)).collect::<Result<Vec<_>>>()?;
            let t = GroupElement::diagonal(&entries)?;
            let computed = log.evaluate(&t)?;
            let closed_form = schraen_closed_form(&t, l, lp)?;
            let agrees = computed.iter().zip(&closed_form).all(|(x, y)| x.congruent(y, digits));
            Ok(SchraenRow { element: t, computed, closed_form, agrees })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_at_k_two_is_the_plain_lift() {
        let f = Field::qp(5, 20).unwrap();
        let l = f.parse("2 + O(5^10)").unwrap();
        let tw = BreuilTwist::new(&f, &l, 2).unwrap();
        let t = GroupElement::diagonal(&[f.int(5), f.int(1)]).unwrap();
        let m = tw.eval(&t).unwrap();
        assert!(m[(0, 1)].approx_eq(&l, 0));
        assert!(m[(0, 0)].approx_eq(&f.one(), 0));
    }

    #[test]
    fn twist_at_k_four() {
        let f = Field::qp(5, 20).unwrap();
        let l = f.int(3);
        let tw = BreuilTwist::new(&f, &l, 4).unwrap();
        // d^(k-2) from the weight, p^((k-2)/2 * v(ad)) from the character
        let t = GroupElement::diagonal(&[f.int(5), f.int(25)]).unwrap();
        let m = tw.eval(&t).unwrap();
        let scale = f.int(625).mul(&f.int(125));
        assert!(m[(0, 0)].approx_eq(&scale, 0));
        let expected = scale.mul(&l.mul(&f.int(-1)));
        assert!(m[(0, 1)].approx_eq(&expected, 0));
    }

    #[test]
    fn table_agrees() {
        let f = Field::qp(7, 20).unwrap();
        let rows = schraen_table(&f, &f.int(4), &f.int(-9), 15).unwrap();
        assert!(rows.iter().all(|r| r.agrees));
    }
}
