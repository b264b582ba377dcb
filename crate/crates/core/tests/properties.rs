//! Property-based invariants over randomized inputs.

use proptest::prelude::*;

use num_complex::Complex64;
use photon_coe::functionals::{gamma_squared, QuadOrders, QuadratureScheme, RadialRule};
use photon_coe::lightcone::{
    cdot, cdot_bilinear, cross, norm, polarization_vector, AxisVector, MomentumPoint,
};
use photon_coe::specfun::{gamma_fn, jacobi_p};
use photon_coe::states::PhotonState;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// e*·e = 1, e·e = 0 and e·k = 0 at arbitrary off-axis points.
    #[test]
    fn polarization_identities(
        kx in -2.0f64..2.0, ky in -2.0f64..2.0, kz in -2.0f64..2.0,
        nx in -1.0f64..1.0, ny in -1.0f64..1.0, nz in -1.0f64..1.0,
    ) {
        let kvec = [kx, ky, kz];
        let nvec = [nx, ny, nz];
        prop_assume!(norm(&kvec) > 1e-2 && norm(&nvec) > 1e-2);
        prop_assume!(norm(&cross(&nvec, &kvec)) > 1e-2 * norm(&kvec));
        let n = AxisVector::new(nvec).unwrap();
        let kp = MomentumPoint::from_cartesian(kvec);
        let e = polarization_vector(&kp, &n).unwrap();
        let kc = [
            Complex64::new(kx, 0.0),
            Complex64::new(ky, 0.0),
            Complex64::new(kz, 0.0),
        ];
        prop_assert!((cdot(&e, &e).re - 1.0).abs() < 1e-12);
        prop_assert!(cdot_bilinear(&e, &e).norm() < 1e-12);
        prop_assert!(cdot_bilinear(&e, &kc).norm() < 1e-12 * kp.k().max(1.0));
    }

    /// Jacobi polynomials satisfy their defining ODE
    /// (1−x²)y″ + (β−α−(α+β+2)x)y′ + n(n+α+β+1)y = 0.
    #[test]
    fn jacobi_satisfies_its_ode(
        n in 1u32..6,
        alpha in -0.9f64..3.0,
        beta in -0.9f64..3.0,
        x in -0.85f64..0.85,
    ) {
        let h = 1e-4;
        let y = |t: f64| jacobi_p(n, alpha, beta, t).unwrap();
        let d1 = (y(x + h) - y(x - h)) / (2.0 * h);
        let d2 = (y(x + h) - 2.0 * y(x) + y(x - h)) / (h * h);
        let nf = n as f64;
        let residual = (1.0 - x * x) * d2 + (beta - alpha - (alpha + beta + 2.0) * x) * d1
            + nf * (nf + alpha + beta + 1.0) * y(x);
        prop_assert!(residual.abs() < 1e-5 * (1.0 + y(x).abs()) * (1.0 + nf).powi(3));
    }

    /// Radial Gauss rules reproduce the Γ moments of their weight family.
    #[test]
    fn gauss_like_rule_matches_gamma_moments(
        power in -0.8f64..3.0,
        sigma in 0.5f64..2.0,
        j in 0u32..9,
    ) {
        let rule = RadialRule::gauss_like(32, power, sigma).unwrap();
        let p = power + j as f64;
        let value = rule.integrate(|k| k.powf(p) * (-sigma * sigma * k * k).exp());
        let exact = gamma_fn((p + 1.0) / 2.0).unwrap() / (2.0 * sigma.powf(p + 1.0));
        prop_assert!((value / exact - 1.0).abs() < 1e-10);
    }

    /// State-description files round-trip through JSON.
    #[test]
    fn state_files_round_trip(
        m in prop::sample::select(vec![-1i32, 1]),
        c1 in -1.5f64..1.5,
        c2 in -1.5f64..1.5,
        a in 0.3f64..3.0,
    ) {
        let state = PhotonState::trial_state(m, vec![c1, c2], a).unwrap();
        let text = state.to_json().unwrap();
        let back = PhotonState::from_json(&text).unwrap();
        prop_assert_eq!(state, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// γ² of a saturator is invariant under the arbitrary length scale.
    #[test]
    fn gamma2_scale_invariance(a in 0.4f64..2.5) {
        let s = PhotonState::saturator_single(1, a).unwrap();
        let scheme = QuadratureScheme::for_state(&s, QuadOrders::default(), 2).unwrap();
        let g2 = gamma_squared(&s, &scheme).unwrap();
        prop_assert!((g2 / 4.486_067_977_499_79 - 1.0).abs() < 1e-8);
    }
}
