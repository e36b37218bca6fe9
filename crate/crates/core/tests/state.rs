use eklab::state::StateFunctions;
use proptest::prelude::*;

proptest! {
    #[test]
    fn relative_energy_is_nonnegative_and_pressure_identity_holds(
        gamma in 1.1f64..3.0,
        rho in 0.05f64..5.0,
        r in 0.05f64..5.0,
    ) {
        let sf = StateFunctions::new(gamma, 0.0, 1.0, 0.1).unwrap();
        let rel = sf.relative_internal_energy(rho, r).unwrap();
        prop_assert!(rel >= -1e-14 * sf.internal_energy(rho).unwrap().abs().max(1.0));
        // p(ρ) − p(r) − p'(r)(ρ − r) = (γ − 1) f(ρ|r)
        let p = |x: f64| sf.pressure(x).unwrap();
        let lhs = p(rho) - p(r) - sf.eval_p_prime(r) * (rho - r);
        let scale = p(rho) + p(r) + (sf.eval_p_prime(r) * (rho - r)).abs();
        prop_assert!((lhs - (gamma - 1.0) * rel).abs() <= 1e-12 * scale);
    }

    #[test]
    fn capillarity_chain(alpha in -1.0f64..2.0, c in 0.1f64..2.0, rho in 0.05f64..5.0) {
        let sf = StateFunctions::new(2.0, alpha, c, 0.1).unwrap();
        let (k, _) = sf.capillarity_k(rho).unwrap();
        let (_, bp) = sf.beta_of_rho(rho).unwrap();
        let (_, mp) = sf.mu_of_rho(rho).unwrap();
        let (_, tp) = sf.theta_of_rho(rho).unwrap();
        prop_assert!((bp * bp - k).abs() <= 1e-12 * k);
        prop_assert!((mp * mp - rho * k).abs() <= 1e-12 * rho * k);
        prop_assert!((tp * rho - mp).abs() <= 1e-12 * mp);
    }
}
