use std::collections::BTreeMap;

use loglift::field::{iwasawa_log, Field};
use loglift::induced::TruncatedInduced;
use loglift::io::{module_to_json, parse_module, CapPolicy};
use loglift::lift::LiftedRep;
use loglift::matrix::MatrixE;
use loglift::modules::torus_inflation;
use loglift::root_data::GLnContext;
use loglift::sample::Sampler;
use loglift::torus_log::log_difference;
use proptest::prelude::*;

fn q(p: u64) -> Field {
    Field::qp(p, 16).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_is_additive(p in prime(), a in 1i64..10_000, b in 1i64..10_000, ka in 0u32..3, kb in 0u32..3, l in -50i64..50) {
        let f = q(p);
        let pp = p as i64;
        prop_assume!(a % pp != 0 && b % pp != 0);
        let branch = f.int(l);
        let x = f.int(a * pp.pow(ka));
        let y = f.int(b * pp.pow(kb));
        let lhs = iwasawa_log(&x.mul(&y), &branch).unwrap();
        let rhs = iwasawa_log(&x, &branch).unwrap().add(&iwasawa_log(&y, &branch).unwrap());
        prop_assert!(lhs.congruent(&rhs, 12), "{lhs} vs {rhs}");
    }

    #[test]
    fn log_of_p_is_the_branch(p in prime(), l in -1000i64..1000) {
        let f = q(p);
        let got = iwasawa_log(&f.int(p as i64), &f.int(l)).unwrap();
        prop_assert!(got.congruent(&f.int(l), 14));
    }

    #[test]
    fn literals_round_trip(p in prime(), num in -100_000i64..100_000, den in 1i64..500) {
        let f = q(p);
        prop_assume!(num != 0);
        let x = f.rational(num, den).unwrap();
        let back = f.parse(&x.to_string()).unwrap();
        prop_assert!(back.congruent(&x, 14), "{x} reparsed as {back}");
    }

    #[test]
    fn adding_the_difference_moves_one_log_to_the_other(seed in any::<u64>(), n in 1usize..4) {
        let f = q(5);
        let mut s = Sampler::new(&f, seed);
        let l1 = s.torus_log(n, true).unwrap();
        let l2 = s.torus_log(n, true).unwrap();
        let moved = l1.add_difference(&log_difference(&l1, &l2).unwrap()).unwrap();
        for _ in 0..5 {
            let t = s.torus_element(n);
            let a = moved.evaluate(&t).unwrap();
            let b = l2.evaluate(&t).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(x.congruent(y, 12));
            }
        }
    }

    #[test]
    fn lift_is_multiplicative(seed in any::<u64>()) {
        let f = q(5);
        let mut s = Sampler::new(&f, seed);
        let ctx = s.context();
        let module = s.module(&ctx).unwrap();
        let log = s.torus_log(ctx.n, false).unwrap();
        let rep = LiftedRep::new(module, log).unwrap();
        let g1 = s.parabolic_element(&ctx);
        let g2 = s.parabolic_element(&ctx);
        let lhs = rep.lift_parabolic_eval(&g1.mul(&g2)).unwrap();
        let rhs = rep.lift_parabolic_eval(&g1).unwrap().mul(&rep.lift_parabolic_eval(&g2).unwrap());
        prop_assert!(lhs.agrees_to(&rhs, 10));
    }

    #[test]
    fn planted_weights_are_recovered(seed in any::<u64>(), dim in 1usize..6, ops in 1usize..4) {
        let f = q(7);
        let mut s = Sampler::new(&f, seed);
        let fam = s.planted_family(dim, ops);
        let dec = loglift::matrix::primary_decomposition(&fam.operators, None).unwrap();
        let mut got: Vec<(Vec<i64>, usize)> = dec.components.iter().map(|c| (c.weight.clone(), c.dim)).collect();
        got.sort();
        prop_assert_eq!(got, fam.weights);
    }

    #[test]
    fn gl2_verma_weights_are_a_string(a in -6i64..6, b in -6i64..6, depth in 0usize..8) {
        let f = q(5);
        let ctx = GLnContext::borel(2);
        let zero = MatrixE::zeros(&f, 1, 1);
        let base = torus_inflation(&ctx, &f, &[a, b], &[zero.clone(), zero]).unwrap();
        let v = TruncatedInduced::build(&base, depth).unwrap();
        let expected: BTreeMap<Vec<i64>, usize> = (0..=depth as i64).map(|k| (vec![a - k, b + k], 1)).collect();
        prop_assert_eq!(v.weight_multiplicities().unwrap(), expected);
    }

    #[test]
    fn module_json_round_trips(seed in any::<u64>()) {
        let f = q(3);
        let mut s = Sampler::new(&f, seed);
        let ctx = s.context();
        let m = s.module(&ctx).unwrap();
        let back = parse_module(&module_to_json(&m, Some("sample")), CapPolicy::default()).unwrap();
        prop_assert_eq!(back.dim(), m.dim());
        prop_assert_eq!(back.field().cap(), m.field().cap());
        for (g, a) in m.explicit_action() {
            prop_assert!(back.phi(g.0, g.1).agrees_to(a, 14));
        }
    }
}
