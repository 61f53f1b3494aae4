//! Invariant suites over a module and, when it is liftable, its lift.

use serde::Serialize;

use crate::error::Result;
use crate::group_ring::{check_dgh_compatibility, lift_check_digits, DgHWitness};
use crate::lift::{lift_parabolic_eval_with, LiftedRep};
use crate::matrix::MatrixE;
use crate::modules::FdPModule;
use crate::root_data::{ad_action, PivotStrategy};
use crate::sample::Sampler;
use crate::torus_log::TorusLogarithm;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Set when the suite does not apply (for example, nothing to factor).
    pub skipped: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), checked: 0, failures: Vec::new(), skipped: None }
    }

    fn skipped(name: &str, why: impl Into<String>) -> Self {
        SuiteResult { skipped: Some(why.into()), ..Self::new(name) }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.record(ok, what),
            Err(e) => {
                self.checked += 1;
                self.failures.push(format!("{}: {e}", what()));
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub dim: usize,
    pub cap: i64,
    pub samples: usize,
    pub seed: u64,
    /// Digits asserted by the lift suites, when they ran.
    pub lift_digits: Option<i64>,
    pub suites: Vec<SuiteResult>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

pub fn lie_hom_suite(m: &FdPModule) -> SuiteResult {
    let report = m.check_lie_hom();
    let mut s = SuiteResult::new("lie-homomorphism");
    let n = m.scope().len();
    s.checked = n * n;
    s.failures = report
        .violations
        .iter()
        .map(|(a, b)| {
            format!(
                "phi([e_{}_{}, e_{}_{}]) != [phi(e_{}_{}), phi(e_{}_{})]",
                a.0 + 1,
                a.1 + 1,
                b.0 + 1,
                b.1 + 1,
                a.0 + 1,
                a.1 + 1,
                b.0 + 1,
                b.1 + 1
            )
        })
        .collect();
    s
}

pub fn category_suite(m: &FdPModule) -> SuiteResult {
    let r = m.category_membership();
    let mut s = SuiteResult::new("category-membership");
    s.record(r.is_split, || "torus does not act with integral generalized weights".into());
    s.record(r.u_acts_nilpotently, || "nilradical does not act nilpotently".into());
    for note in r.notes {
        if !r.is_alun_fd {
            s.failures.push(note);
        }
    }
    s
}

/// `sum P = I`, `P^2 = P`, `P P' = 0` and projectors commute with the torus.
pub fn projector_suite(m: &FdPModule) -> SuiteResult {
    let mut s = SuiteResult::new("weight-projectors");
    let dec = match m.weight_decomposition(None) {
        Ok(d) => d,
        Err(e) => {
            s.record(false, || format!("no weight decomposition: {e}"));
            return s;
        }
    };
    let f = m.field();
    let digits = f.cap() - 2;
    let mut total = MatrixE::zeros(f, m.dim(), m.dim());
    for (i, c) in dec.components.iter().enumerate() {
        total = total.add(&c.projector);
        s.record(c.projector.mul(&c.projector).agrees_to(&c.projector, digits), || format!("P_{:?} is not idempotent", c.weight));
        for d in &dec.components[i + 1..] {
            let zero = MatrixE::zeros(f, m.dim(), m.dim());
            s.record(c.projector.mul(&d.projector).agrees_to(&zero, digits), || format!("P_{:?} P_{:?} != 0", c.weight, d.weight));
        }
        for (k, t) in m.torus_operators().iter().enumerate() {
            s.record(c.projector.mul(t).agrees_to(&t.mul(&c.projector), digits), || {
                format!("P_{:?} does not commute with e_{}_{}", c.weight, k + 1, k + 1)
            });
        }
    }
    s.record(total.agrees_to(&MatrixE::identity(f, m.dim()), digits), || "projectors do not sum to 1".into());
    s
}

pub fn homomorphism_suite(rep: &LiftedRep, samples: usize, seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("homomorphism");
    let digits = lift_check_digits(rep);
    let mut sm = Sampler::new(rep.field(), seed);
    for k in 0..samples {
        let g1 = sm.parabolic_element(rep.ctx());
        let g2 = sm.parabolic_element(rep.ctx());
        let r = (|| {
            let lhs = rep.lift_parabolic_eval(&g1.mul(&g2))?;
            let rhs = rep.lift_parabolic_eval(&g1)?.mul(&rep.lift_parabolic_eval(&g2)?);
            Ok(lhs.agrees_to(&rhs, digits))
        })();
        s.record_result(r, || format!("pair {k}: lift(g1 g2) != lift(g1) lift(g2)"));
    }
    s
}

pub fn factorization_suite(rep: &LiftedRep, samples: usize, seed: u64) -> SuiteResult {
    let ctx = rep.ctx();
    if ctx.levi_root_generators().is_empty() {
        return SuiteResult::skipped("factorization-independence", "Levi is a torus");
    }
    let mut s = SuiteResult::new("factorization-independence");
    let digits = lift_check_digits(rep);
    let mut sm = Sampler::new(rep.field(), seed);
    for k in 0..samples {
        let h = sm.levi_sl_element(ctx);
        let r = (|| {
            let a = lift_parabolic_eval_with(rep, &h, PivotStrategy::MinValuation)?;
            let b = lift_parabolic_eval_with(rep, &h, PivotStrategy::LastNonzero)?;
            Ok(a.agrees_to(&b, digits))
        })();
        s.record_result(r, || format!("element {k}: pivot strategies disagree"));
    }
    s
}

/// `Ad(h)(x) lift(h) m = lift(h) (x m)` on sampled `h`, generators `x` and basis vectors `m`.
pub fn ad_compatibility_suite(rep: &LiftedRep, samples: usize, seed: u64) -> SuiteResult {
    let mut s = SuiteResult::new("ad-compatibility");
    let f = rep.field();
    let digits = lift_check_digits(rep);
    let module = rep.module();
    let scope = module.scope();
    let mut sm = Sampler::new(f, seed);
    for k in 0..samples {
        let h = sm.parabolic_element(rep.ctx());
        let g = sm.choose_generator(&scope);
        let v = sm.int(0, rep.dim() as i64 - 1) as usize;
        let r = (|| {
            let x = MatrixE::unit(f, rep.ctx().n, g.0, g.1);
            let lh = rep.lift_parabolic_eval(&h)?;
            let m = MatrixE::unit(f, rep.dim(), v, 0).column(0);
            let lhs = module.phi_of(&ad_action(&h, &x)?)?.mul(&lh).mul_vec(&m);
            let rhs = lh.mul(&module.phi(g.0, g.1)).mul_vec(&m);
            let l = MatrixE::from_columns(f, rep.dim(), &[lhs]);
            let r = MatrixE::from_columns(f, rep.dim(), &[rhs]);
            Ok(l.agrees_to(&r, digits))
        })();
        s.record_result(r, || format!("triple {k}: e_{}_{} on m_{}", g.0 + 1, g.1 + 1, v + 1));
    }
    s
}

pub fn dgh_suite(rep: &LiftedRep, samples: usize, seed: u64) -> SuiteResult {
    let report = check_dgh_compatibility(&DgHWitness::from_lift(rep), samples, seed);
    let mut s = SuiteResult::new("dgh-compatibility");
    s.checked = report.checked;
    s.failures = report.violations;
    s
}

/// Runs every suite; lift-based suites need `log` and a liftable module.
pub fn run_module_checks(m: &FdPModule, log: Option<&TorusLogarithm>, samples: usize, seed: u64) -> CheckReport {
    let mut suites = vec![lie_hom_suite(m), category_suite(m), projector_suite(m)];
    let lift_names = ["homomorphism", "factorization-independence", "ad-compatibility", "dgh-compatibility"];
    let structural_ok = suites.iter().all(SuiteResult::passed);
    let mut lift_digits = None;
    match (log, structural_ok) {
        (Some(log), true) => match LiftedRep::new(m.clone(), log.clone()) {
            Ok(rep) => {
                lift_digits = Some(lift_check_digits(&rep));
                suites.push(homomorphism_suite(&rep, samples, seed));
                suites.push(factorization_suite(&rep, samples, seed.wrapping_add(1)));
                suites.push(ad_compatibility_suite(&rep, samples, seed.wrapping_add(2)));
                suites.push(dgh_suite(&rep, samples, seed.wrapping_add(3)));
            }
            Err(e) => {
                let mut s = SuiteResult::new("liftable");
                s.record(false, || e.to_string());
                suites.push(s);
            }
        },
        (None, _) => suites.extend(lift_names.iter().map(|n| SuiteResult::skipped(n, "no logarithm given"))),
        (_, false) => suites.extend(lift_names.iter().map(|n| SuiteResult::skipped(n, "module is not in the liftable class"))),
    }
    CheckReport { dim: m.dim(), cap: m.field().cap(), samples, seed, lift_digits, suites }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::modules::{breuil_module, standard};
    use crate::root_data::GLnContext;
    use std::collections::BTreeMap;

    #[test]
    fn shipped_examples_pass() {
        let f = Field::qp(5, 20).unwrap();
        let log = TorusLogarithm::standard(&f, vec![f.int(2), f.int(2)]).unwrap();
        let r = run_module_checks(&breuil_module(&f), Some(&log), 10, 1);
        assert!(r.all_passed(), "{r:?}");
        let log3 = TorusLogarithm::standard(&f, vec![f.int(1), f.int(2), f.int(3)]).unwrap();
        let std = standard(&GLnContext::new(vec![2, 1]).unwrap(), &f);
        let r = run_module_checks(&std, Some(&log3), 10, 2);
        assert!(r.all_passed(), "{r:?}");
        assert!(r.suites.iter().any(|s| s.name == "factorization-independence" && s.skipped.is_none()));
    }

    #[test]
    fn non_lie_hom_fails() {
        let f = Field::qp(5, 20).unwrap();
        let mut action = BTreeMap::new();
        action.insert((0, 1), MatrixE::from_ints(&f, &[&[0, 1], &[0, 0]]));
        action.insert((0, 0), MatrixE::from_ints(&f, &[&[1, 0], &[0, 0]]));
        let m = FdPModule::new(GLnContext::borel(2), f.clone(), 2, action).unwrap();
        let r = run_module_checks(&m, None, 5, 1);
        assert!(!r.all_passed());
        assert!(!r.suites[0].passed());
    }
}
