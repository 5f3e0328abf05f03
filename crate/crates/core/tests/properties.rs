use proptest::prelude::*;
use psum_core::arith::{psi_frac, CompensatedAccumulator};
use psum_core::bilinear::{lemma21_check, PointSet};
use psum_core::dio::{count_b0, count_b2, PerturbationKind, PerturbationSpec, SupMode};
use psum_core::exponent::{minimax_balance, BalanceOutcome, BoundExpr, Monomial, Rational};
use psum_core::expsum::{eval_exp_sum, ExpSumInstance};
use psum_core::floor::{s_lambda_blocked, s_lambda_direct};
use psum_core::vaaler::{error_majorant, psi_approx};
use psum_core::vaughan::{direct_sum, vaughan_split};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn vaaler_majorant(x in -1e3f64..1e3, h in 1usize..300) {
        let err = (psi_frac(x) - psi_approx(x, h).unwrap()).abs();
        prop_assert!(err <= error_majorant(x, h).unwrap() + 1e-12);
    }

    #[test]
    fn blocked_equals_direct(x in 1u64..200_000) {
        let d = s_lambda_direct(x).unwrap();
        let b = s_lambda_blocked(x).unwrap();
        prop_assert!((b.value - d).abs() <= 1e-9 * d.max(1.0));
        prop_assert!(b.blocks <= 2 * (x as f64).sqrt().ceil() as u64 + 2);
    }

    #[test]
    fn vaughan_identity(d in 101u64..3_000, a in 1u64..1_000, b in 1u64..97) {
        let g = |k: u64| ((k * a + b) % 97) as f64 / 48.5 - 1.0;
        let direct = direct_sum(d, g).unwrap();
        let total = vaughan_split(d, g).unwrap().total();
        prop_assert!((total - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn lemma21_inequality(ys in prop::collection::vec(-5.0f64..5.0, 1..40), t in 0.05f64..30.0, eta in 0.01f64..3.0) {
        let points = PointSet::unit(ys, 5.0).unwrap();
        prop_assert!(lemma21_check(&points, t, eta).unwrap().holds);
    }

    #[test]
    fn b0_is_monotone_in_x(n in 1u64..8, beta in 1.1f64..3.0, x in 1.0f64..200.0) {
        let lo = count_b0(n, beta, x).unwrap().count;
        let hi = count_b0(n, beta, 2.0 * x).unwrap().count;
        prop_assert!(hi <= lo);
        prop_assert!(lo >= n * n);
    }

    #[test]
    fn b2_endpoints_equal_scan(n in 1u64..5, m in 1u64..6, beta in 0.5f64..2.0, delta in 0.0f64..1.0, gamma in 0.5f64..2.0, x in 0.5f64..50.0) {
        let spec = PerturbationSpec::new(beta, delta, m, PerturbationKind::Mu).unwrap();
        let e = count_b2(n, gamma, x, &spec, SupMode::Endpoints).unwrap();
        let f = count_b2(n, gamma, x, &spec, SupMode::FullScan).unwrap();
        prop_assert_eq!(e, f);
    }

    #[test]
    fn triple_sum_trivial_bound_and_conjugation(h in 1u64..5, m in 1u64..5, n in 1u64..5, x in 0.5f64..500.0, delta in 0.0f64..2.0, seed in any::<u64>()) {
        let inst = ExpSumInstance::unit(h, m, n, x).unwrap()
            .exponents(1.5, 1.0, 0.5)
            .perturbation(delta, 1.0)
            .with_random_unimodular(seed).unwrap();
        let s = eval_exp_sum(&inst).unwrap();
        prop_assert!(s.norm() <= inst.lattice_points() as f64 * (1.0 + 1e-12));
        // with real coefficients S(−X) is the conjugate of S(X)
        let real = ExpSumInstance::unit(h, m, n, x).unwrap().perturbation(delta, 1.0);
        let mut neg = real.clone();
        neg.x = -x;
        let (p, q) = (eval_exp_sum(&real).unwrap(), eval_exp_sum(&neg).unwrap());
        prop_assert!((p - q.conj()).norm() <= 1e-9 * (1.0 + p.norm()));
    }

    #[test]
    fn compensated_sum_ignores_pool_size(len in 0u64..20_000, chunk in 1u64..5_000, w in 1usize..8) {
        let acc = CompensatedAccumulator::new(chunk);
        let f = |i: u64| ((i * 2_654_435_761) % 1_000) as f64 * 1e-3 - 0.4999;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| acc.sum(0..len, f));
        let many = rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap().install(|| acc.sum(0..len, f));
        prop_assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn minimax_value_dominates_every_term(c in prop::collection::vec((-20i128..20, -20i128..20, 1i128..12), 1..6)) {
        let terms: Vec<Monomial> = c
            .iter()
            .map(|&(a, s, q)| Monomial::from_pairs([("x", Rational::new(a, q)), ("E", Rational::new(s, q))]))
            .collect();
        let expr = BoundExpr::new(terms).unwrap();
        let (lo, hi) = (Rational::new(-3, 1), Rational::new(5, 2));
        match minimax_balance(&expr, "E", Some(lo), Some(hi)).unwrap() {
            BalanceOutcome::Optimum(b) => {
                prop_assert!(b.point >= lo && b.point <= hi);
                let at = |t: Rational| expr.terms().iter().map(|m| m.exp("x") + m.exp("E") * t).max().unwrap();
                prop_assert_eq!(at(b.point), b.value);
                // no grid point does better than the reported optimum
                for i in 0..=44 {
                    let t = lo + Rational::new(i, 8);
                    if t <= hi {
                        prop_assert!(at(t) >= b.value);
                    }
                }
            }
            BalanceOutcome::Unbounded { .. } => prop_assert!(false, "closed range reported unbounded"),
        }
    }
}
