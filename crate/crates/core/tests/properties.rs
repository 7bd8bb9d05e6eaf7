use biharm::bessel::{bessel_j, bessel_j_scaled, bessel_zero, Order};
use biharm::grid::RadialGrid;
use biharm::kernel::{f_profile, kernel_value};
use biharm::linear::{a_limit, c_const, linear_solution};
use biharm::quad::{decompose_lobes, truncation_point, WeightSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaled_bessel_matches_definition(mu2 in -1i32..8, eta in 0.01f64..40.0) {
        let o = Order::new(mu2 as f64 / 2.0).unwrap();
        let j = bessel_j(o, eta).unwrap();
        let l = bessel_j_scaled(o, eta).unwrap();
        prop_assert!((l * eta.powf(o.mu()) - j).abs() <= 1e-12 * (1.0 + j.abs()));
    }

    #[test]
    fn zeros_interlace(mu2 in 0i32..8, k in 1usize..20) {
        let o = Order::new(mu2 as f64 / 2.0).unwrap();
        let a = bessel_zero(o, k).unwrap();
        let b = bessel_zero(o, k + 1).unwrap();
        let c = bessel_zero(o.next(), k).unwrap();
        prop_assert!(a < c && c < b);
        prop_assert!(bessel_j(o, a).unwrap().abs() < 1e-10);
    }

    #[test]
    fn truncation_point_monotone(eta in 0.1f64..50.0, e1 in 2.0f64..20.0, e2 in 2.0f64..20.0) {
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(truncation_point(eta, 10f64.powf(-hi)) >= truncation_point(eta, 10f64.powf(-lo)));
        prop_assert!(truncation_point(2.0 * eta, 1e-8) > truncation_point(eta, 1e-8));
    }

    #[test]
    fn grids_are_valid(min in 1e-4f64..1.0, span in 1.01f64..1e3, count in 2usize..300) {
        for g in [RadialGrid::linear(min, min * span, count).unwrap(), RadialGrid::log(min, min * span, count).unwrap()] {
            prop_assert_eq!(g.len(), count);
            prop_assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gamma_product_is_one(n in 1usize..8, frac in 0.05f64..0.95) {
        let beta = frac * n as f64;
        prop_assert!((c_const(n, beta) * a_limit(n, beta) - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kernel_scaling(n in 1usize..4, x in 0.0f64..4.0, t in 0.05f64..20.0) {
        let g = kernel_value(n, x, t).unwrap();
        let f = f_profile(n, x * t.powf(-0.25), 1e-12).unwrap();
        let expected = biharm::kernel::alpha(n) * t.powf(-(n as f64) / 4.0) * f;
        prop_assert!((g - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn linear_solution_is_self_similar(x in 0.05f64..5.0, t in 0.05f64..5.0, lam in 0.2f64..5.0) {
        let (n, beta) = (3usize, 1.0);
        let u = linear_solution(n, beta, x, t).unwrap();
        let v = linear_solution(n, beta, lam * x, lam.powi(4) * t).unwrap();
        prop_assert!((lam.powf(beta) * v - u).abs() <= 1e-8 * u.abs());
    }

    #[test]
    fn lobes_alternate(eta in 0.5f64..8.0, mu2 in 1i32..6) {
        let o = Order::new(mu2 as f64 / 2.0).unwrap();
        let w = WeightSpec::new(move |s: f64| (-(s / eta).powi(4)).exp());
        let d = decompose_lobes(o, &w, 40, 1e-12).unwrap();
        for pair in d.lobes.windows(2) {
            prop_assert!(pair[0].signed * pair[1].signed <= 0.0);
        }
    }
}
