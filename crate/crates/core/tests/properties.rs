use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use mropt::mr::{adjoint_multilevel, forward_full, forward_two_level, inverse_full, predict_multilevel, predict_two_level};
use mropt::problems::make_bvp1d;
use mropt::tensor::{forward_full_2d, inverse_full_2d, Grid2Data};
use mropt::{run_mropt, Dim, GridHierarchy, MrOptConfig, Optimizer, OptimizerConfig, PredictionScheme};

fn degree() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![1usize, 3, 5])
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_transform_round_trips(n in degree(), z in values(65)) {
        let s = PredictionScheme::new(n).unwrap();
        let base = if n == 5 { 1 } else { 0 };
        let rep = forward_full(&z, 4, base, &s).unwrap();
        prop_assert_eq!(rep.scalar_count(), 65);
        let back = inverse_full(&rep, &s).unwrap();
        prop_assert!(max_diff(&back, &z) <= 1e-12 * 10.0);
    }

    #[test]
    fn prediction_is_linear(n in degree(), u in values(9), v in values(9), a in -3.0f64..3.0) {
        let s = PredictionScheme::new(n).unwrap();
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let lhs = predict_multilevel(&mix, 2, &s).unwrap();
        let pu = predict_multilevel(&u, 2, &s).unwrap();
        let pv = predict_multilevel(&v, 2, &s).unwrap();
        let rhs: Vec<f64> = pu.iter().zip(&pv).map(|(x, y)| a * x + y).collect();
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-11);
    }

    #[test]
    fn prediction_is_consistent(n in degree(), c in values(17)) {
        let s = PredictionScheme::new(n).unwrap();
        let fine = predict_two_level(&c, &s).unwrap();
        let (coarse, detail) = forward_two_level(&fine, &s).unwrap();
        prop_assert_eq!(coarse, c);
        prop_assert!(detail.iter().all(|d| d.abs() <= 1e-12));
    }

    #[test]
    fn adjoint_is_transpose(n in degree(), x in values(9), y in values(33)) {
        let s = PredictionScheme::new(n).unwrap();
        let px = predict_multilevel(&x, 2, &s).unwrap();
        let aty = adjoint_multilevel(&y, 2, &s).unwrap();
        let lhs: f64 = px.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&aty).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn tensor_transform_round_trips(n in degree(), z in values(33 * 33)) {
        let s = PredictionScheme::new(n).unwrap();
        let g = Grid2Data::from_flat(&z, 3).unwrap();
        let base = if n == 5 { 1 } else { 0 };
        let rep = forward_full_2d(&g, base, &s).unwrap();
        prop_assert_eq!(rep.scalar_count(), 33 * 33);
        let back = inverse_full_2d(&rep, &s).unwrap();
        prop_assert!(max_diff(&back.to_flat(), &z) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn ladder_is_monotone_and_counts_match(n in prop::sample::select(vec![1usize, 3]), seed in 0u64..1000) {
        let h = GridHierarchy::new(4, 2, Dim::One).unwrap();
        let p = make_bvp1d(h).unwrap();
        let mut cfg = MrOptConfig::new(
            PredictionScheme::new(n).unwrap(),
            h,
            Optimizer::PatternSearch,
            OptimizerConfig { seed, ..OptimizerConfig::with_tol(1e-3) },
        );
        cfg.boundary_mask = Some(p.boundary_mask.clone());
        let before = p.objective.evals();
        let rep = run_mropt(&p.objective, &p.initial_guess, &cfg).unwrap();
        prop_assert_eq!(p.objective.evals() - before, rep.total_evals);
        let mut prev = rep.f_initial;
        for level in &rep.levels {
            prop_assert!(level.f_value <= prev + 1e-12 * (1.0 + prev.abs()));
            prev = level.f_value;
        }
        let z = rep.solution();
        assert_abs_diff_eq!(z[0], 0.0);
        assert_abs_diff_eq!(z[16], 0.0);
    }
}
