use proptest::prelude::*;

use sepmod_core::jacobi::{self, JacobiParams};
use sepmod_core::matrix::random_orthogonal;
use sepmod_core::rng::stream;
use sepmod_core::{
    eval_dual, gauge_bounds, ideal_norm, kyfan_regime, LevelProfile, NetParams, RealMatrix, SymmetricGauge,
};

fn gauge_desc() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("lp:1".to_string()),
        Just("lp:2".to_string()),
        Just("lp:inf".to_string()),
        (1.0f64..6.0).prop_map(|r| format!("lp:{r}")),
        (1usize..4).prop_map(|m| format!("kyfan:{m}")),
    ]
}

fn gauge_and_vectors() -> impl Strategy<Value = (SymmetricGauge, Vec<f64>, Vec<f64>)> {
    (gauge_desc(), 3usize..7).prop_flat_map(|(desc, n)| {
        let g = SymmetricGauge::parse(&desc, n).unwrap();
        (Just(g), prop::collection::vec(-5.0f64..5.0, n), prop::collection::vec(-5.0f64..5.0, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gauges_are_symmetric_norms((g, x, y) in gauge_and_vectors(), t in -3.0f64..3.0, shift in 0usize..6) {
        let nx = g.eval(&x).unwrap();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(g.eval(&sum).unwrap() <= nx + g.eval(&y).unwrap() + 1e-9);
        let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
        prop_assert!((g.eval(&scaled).unwrap() - t.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
        let mut moved = x.clone();
        moved.rotate_left(shift % x.len());
        moved[0] = -moved[0];
        prop_assert!((g.eval(&moved).unwrap() - nx).abs() <= 1e-12 * (1.0 + nx));
    }

    #[test]
    fn dual_pairs_with_norm((g, x, y) in gauge_and_vectors()) {
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        prop_assert!(dot.abs() <= g.eval(&x).unwrap() * g.dual_eval_closed(&y).unwrap() + 1e-9);
    }

    #[test]
    fn ellipsoid_dual_within_tolerance((g, _x, y) in gauge_and_vectors(), delta in 0.05f64..0.5) {
        prop_assume!(y.iter().any(|v| v.abs() > 1e-3));
        let bounds = gauge_bounds(&g).unwrap();
        let r = eval_dual(&y, &g, &bounds, delta).unwrap();
        let exact = g.dual_eval_closed(&y).unwrap();
        prop_assert!((r.value - exact).abs() <= delta / 2.0 * exact, "{} vs {exact}", r.value);
        prop_assert!(g.eval(&r.witness).unwrap() <= 1.0 + 1e-6);
        prop_assert!(r.upper_bound >= exact * (1.0 - 1e-9));
    }

    #[test]
    fn ideal_norms_are_orthogonally_invariant(desc in gauge_desc(), seed in 0u64..1000, n in 3usize..7) {
        let g = SymmetricGauge::parse(&desc, n).unwrap();
        let mut rng = stream(seed, 1);
        let a = RealMatrix::gaussian(n, &mut rng);
        let u = random_orthogonal(n, &mut rng);
        let v = random_orthogonal(n, &mut rng);
        let uav = u.matmul(&a).unwrap().matmul(&v).unwrap();
        let (na, nb) = (ideal_norm(&g, &a).unwrap(), ideal_norm(&g, &uav).unwrap());
        prop_assert!((na - nb).abs() <= 1e-10 * na);
        let nt = ideal_norm(&g, &a.transpose()).unwrap();
        prop_assert!((na - nt).abs() <= 1e-10 * na);
    }

    #[test]
    fn rounding_lands_in_net(n in 1usize..6, raw in prop::collection::vec(0.0f64..1.0, 6), q in prop_oneof![Just("1"), Just("2"), Just("3"), Just("inf")]) {
        let q = q.parse().unwrap();
        let params = NetParams::new(n, q, 0.5).unwrap();
        let mut x: Vec<f64> = raw[..n].to_vec();
        x.sort_by(|a, b| b.total_cmp(a));
        let norm = sepmod_core::gauge::lp_norm(&x, q);
        if norm > 1.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
        let profile = LevelProfile::round(&params, &x);
        prop_assert!(profile.is_member(&params));
        let point = profile.decode(&params);
        prop_assert!(point.iter().zip(&x).all(|(p, v)| *p <= *v + 1e-15));
        let gap: Vec<f64> = x.iter().zip(&point).map(|(a, b)| a - b).collect();
        prop_assert!(sepmod_core::gauge::lp_norm(&gap, q) <= params.delta / 2.0);
    }

    #[test]
    fn rayleigh_identity_holds(n in 1u32..80, p in 1u32..80) {
        let j = JacobiParams::new(n, p).unwrap();
        prop_assert_eq!(jacobi::rayleigh_closed(j), jacobi::rayleigh_from_expectations(j));
    }

    #[test]
    fn kyfan_regime_is_the_larger_formula(n in 1usize..200, m_frac in 0.0f64..1.0) {
        let m = 1 + ((n - 1) as f64 * m_frac) as usize;
        let r = kyfan_regime(n, m).unwrap();
        let expect = (n as f64).max(m as f64 * (n as f64).sqrt());
        prop_assert!((r.value - expect).abs() <= 1e-12 * expect);
    }
}
