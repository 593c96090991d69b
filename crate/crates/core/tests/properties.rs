//! Randomized invariants: quantities that must hold for every admissible
//! parameter choice, probed over continuous ranges rather than pinned
//! configurations.

use proptest::prelude::*;
use reset_search::bessel::{bessel_ik_scaled, BesselOrder};
use reset_search::eigen1d::{self, Params1d};
use reset_search::eigen_radial::{self, ParamsRadial};
use reset_search::target::{self, SearchModel, TargetDistribution};

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn line_eigenvalue_solves_its_equation(
        d in 0.1f64..10.0,
        r in 0.1f64..5.0,
        a in 0.05f64..20.0,
    ) {
        let sol = eigen1d::solve(Params1d::new(d, r, a).unwrap(), 0.0).unwrap();
        let lambda = sol.lambda0();
        prop_assert!(lambda > 0.0 && lambda < r);
        prop_assert!(sol.residual() <= 1e-12 * r);
        let q = (2.0 * (r - lambda) / d).sqrt();
        prop_assert!((sol.decay_rate() / q - 1.0).abs() <= 1e-12);
        // The eigenvalue relation itself, reconstructed from accessors.
        let log_gap = sol.log_lambda0() - (r.ln() - a * q);
        prop_assert!(log_gap.abs() <= 1e-10);
    }

    #[test]
    fn line_eigenvalue_decreases_when_target_recedes(
        d in 0.1f64..10.0,
        r in 0.1f64..5.0,
        a in 0.05f64..15.0,
    ) {
        let near = eigen1d::solve(Params1d::new(d, r, a).unwrap(), 0.0).unwrap();
        let far = eigen1d::solve(Params1d::new(d, r, 1.3 * a).unwrap(), 0.0).unwrap();
        prop_assert!(far.lambda0() < near.lambda0());
    }

    #[test]
    fn line_survival_asymptote_is_a_decreasing_probability(
        d in 0.1f64..10.0,
        r in 0.1f64..5.0,
        a in 0.05f64..10.0,
        t in 0.0f64..100.0,
    ) {
        let sol = eigen1d::solve(Params1d::new(d, r, a).unwrap(), 0.0).unwrap();
        let m = sol.prefactor();
        prop_assert!(m.is_finite() && m > 0.0);
        let now = sol.survival_asymptote(t).unwrap();
        let later = sol.survival_asymptote(t + 1.0).unwrap();
        prop_assert!(now > 0.0);
        prop_assert!(later < now);
    }

    #[test]
    fn radial_eigenvalue_solves_its_equation(
        dim in 2u32..=12,
        eps0 in 0.1f64..2.0,
        ratio in 1.2f64..20.0,
        r in 0.2f64..3.0,
    ) {
        let params = ParamsRadial::new(1.0, r, dim, eps0, ratio * eps0).unwrap();
        let sol = eigen_radial::solve(params, 0.0).unwrap();
        prop_assert!(sol.lambda0() > 0.0 && sol.lambda0() < r);
        prop_assert!(sol.residual() <= 1e-11 * r);
        prop_assert!(sol.decay_rate() > 0.0);
    }

    #[test]
    fn radial_eigenvalue_decreases_when_target_recedes(
        dim in 2u32..=12,
        eps0 in 0.1f64..2.0,
        ratio in 1.2f64..15.0,
    ) {
        let near = eigen_radial::solve(
            ParamsRadial::new(1.0, 1.0, dim, eps0, ratio * eps0).unwrap(),
            0.0,
        )
        .unwrap();
        let far = eigen_radial::solve(
            ParamsRadial::new(1.0, 1.0, dim, eps0, 1.4 * ratio * eps0).unwrap(),
            0.0,
        )
        .unwrap();
        prop_assert!(far.lambda0() < near.lambda0());
    }

    #[test]
    fn bessel_wronskian_holds_across_orders(
        twice_nu in 0u32..=12,
        x in 0.01f64..200.0,
    ) {
        // I_nu(x) K_{nu+1}(x) + I_{nu+1}(x) K_nu(x) = 1/x; the scaling
        // factors of the (e^{-x} I, e^{x} K) pair cancel in the products.
        let order = BesselOrder::new(f64::from(twice_nu) / 2.0).unwrap();
        let (i_lo, k_lo) = bessel_ik_scaled(order, x).unwrap();
        let (i_hi, k_hi) = bessel_ik_scaled(order.succ(), x).unwrap();
        let wronskian = i_lo * k_hi + i_hi * k_lo;
        prop_assert!((wronskian * x - 1.0).abs() <= 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn failure_probability_is_a_decreasing_probability(
        sigma in 0.5f64..3.0,
        r in 0.5f64..2.0,
    ) {
        let dist = TargetDistribution::gaussian(sigma, 1).unwrap();
        let model = SearchModel::one_dimensional(1.0, r).unwrap();
        let mut prev = 1.0f64;
        for t in [1e2, 1e3, 1e4] {
            let f = target::failure_probability(&dist, &model, t, 1e-6).unwrap();
            prop_assert!(f > 0.0 && f <= 1.0);
            prop_assert!(f < prev);
            prev = f;
        }
    }
}
