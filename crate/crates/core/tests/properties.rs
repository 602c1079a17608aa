use eitsim::analytic::{denominator_coefficients, derived_rates, rho33_exact, rho33_ladder};
use eitsim::cooling::{cooling_rates, CoolingParams};
use eitsim::discrim::{ratio_at_bright_peak, Hold};
use eitsim::models::{rate_model_dark, zeno_rho33};
use eitsim::obe::{build_liouvillian, excited_population, steady_state};
use eitsim::{AtomParams, CoherenceModel, LaserDrive, SystemConfig};
use proptest::prelude::*;

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

prop_compose! {
    fn lambda_config()(
        g1 in 0.01..0.99f64,
        o1 in log_range(1e-2, 10.0),
        o2 in log_range(1e-2, 10.0),
        d1 in -10.0..10.0f64,
        d2 in -10.0..10.0f64,
        lw in 0.0..0.5f64,
    ) -> SystemConfig {
        SystemConfig::lambda(AtomParams::closed_lambda(g1, 1.0 - g1), LaserDrive::new(o1, o2, d1, d2, lw))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn populations_stay_below_saturation(cfg in lambda_config()) {
        let c = cfg.validate().unwrap();
        let a = rho33_exact(&c).unwrap();
        let n = excited_population(&steady_state(&build_liouvillian(&c)).unwrap());
        prop_assert!((0.0..=0.5 + 1e-9).contains(&a));
        prop_assert!((-1e-12..=0.5 + 1e-9).contains(&n));
    }

    #[test]
    fn steady_state_is_stationary(cfg in lambda_config()) {
        let l = build_liouvillian(&cfg.validate().unwrap());
        let rho = steady_state(&l).unwrap();
        let residual = (l.matrix() * rho.to_vector()).amax();
        prop_assert!(residual <= 1e-10);
        prop_assert!(l.trace_row().amax() <= 1e-12);
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn relabeling_symmetry(cfg in lambda_config()) {
        let d = cfg.drive;
        let a = cfg.atom;
        let swapped = SystemConfig::lambda(
            AtomParams::closed_lambda(a.gamma_2, a.gamma_1),
            LaserDrive::new(d.omega_2, d.omega_1, d.delta_2, d.delta_1, d.linewidth_1),
        );
        let x = rho33_exact(&cfg.validate().unwrap()).unwrap();
        let y = rho33_exact(&swapped.validate().unwrap()).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
    }

    #[test]
    fn c0_forms_agree(cfg in lambda_config()) {
        let k = denominator_coefficients(&cfg.validate().unwrap()).unwrap();
        prop_assert!((k.c0 - k.c0_factorized).abs() <= 1e-12 * k.c0.abs());
    }

    #[test]
    fn derived_rate_identities(cfg in lambda_config()) {
        prop_assume!(cfg.drive.delta_1.abs() > 1e-3);
        let c = cfg.validate().unwrap();
        let r = derived_rates(&c).unwrap();
        let d1 = cfg.drive.delta_1;
        prop_assert!((r.scatter_rate * d1 - r.light_shift).abs() <= 1e-14 * r.light_shift.abs().max(1e-300));
        let o1s = cfg.drive.omega_1 * cfg.drive.omega_1;
        prop_assert!((r.omega_eff_sq() - r.light_shift * o1s / d1).abs() <= 1e-14 * r.omega_eff_sq());
    }

    #[test]
    fn equal_linewidths_give_equal_optical_coherence(
        g1 in 0.0..1.0f64,
        g2 in 0.0..1.0f64,
        lw in 0.0..2.0f64,
    ) {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(g1, g2), LaserDrive::new(1.0, 1.0, 0.0, 0.0, lw))
            .validate()
            .unwrap();
        prop_assert_eq!(c.coherence().gamma_13, c.coherence().gamma_23);
    }

    #[test]
    fn explicit_round_trip_is_idempotent(cfg in lambda_config()) {
        let c = cfg.validate().unwrap();
        let k = c.coherence();
        let explicit = cfg.with_coherence(CoherenceModel::explicit(k.gamma_13, k.gamma_23, k.gamma_12));
        let once = explicit.validate().unwrap();
        let text = serde_json::to_string(once.config()).unwrap();
        let twice = SystemConfig::from_json(&text).unwrap().validate().unwrap();
        prop_assert_eq!(once, twice);
        prop_assert_eq!(once.coherence().alpha, c.coherence().alpha);
    }

    #[test]
    fn ladder_matches_generator(
        g2 in 0.0..1.0f64,
        o1 in log_range(1e-2, 10.0),
        o2 in log_range(1e-2, 10.0),
        lw in 0.0..0.5f64,
    ) {
        let c = SystemConfig::ladder(AtomParams::closed_ladder(1.0, g2), LaserDrive::new(o1, o2, 0.0, 0.0, lw))
            .validate()
            .unwrap();
        let a = rho33_ladder(&c).unwrap();
        let n = excited_population(&steady_state(&build_liouvillian(&c)).unwrap());
        prop_assert!((a - n).abs() <= 1e-9 * n.abs().max(1e-6));
    }

    #[test]
    fn zeno_profile_is_even(
        o1 in log_range(1e-4, 1e-2),
        o2 in log_range(0.1, 2.0),
        d2 in 10.0..100.0f64,
        dp in -1.0..1.0f64,
    ) {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(o1, o2, d2, d2, 0.0))
            .validate()
            .unwrap();
        let a = zeno_rho33(&c, dp).unwrap().value;
        let b = zeno_rho33(&c, -dp).unwrap().value;
        prop_assert_eq!(a, b);
        prop_assert!(a <= 0.5);
    }

    #[test]
    fn rate_model_rises_with_dephasing(
        o2 in log_range(0.3, 10.0),
        d1 in 10.0..100.0f64,
        t in 0.01..0.99f64,
    ) {
        // Up to the first-order bound γ ≤ 10⁻³Ω₂²/Γ.
        let top = 1e-3 * o2 * o2;
        let (lo, hi) = (t * top * 0.5, t * top);
        let cfg = |gamma: f64| {
            SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(1e-3, o2, d1, d1, gamma))
                .validate()
                .unwrap()
        };
        prop_assert!(rate_model_dark(&cfg(lo)).unwrap().value < rate_model_dark(&cfg(hi)).unwrap().value);
    }

    #[test]
    fn recoil_free_rates_are_the_diffusion_floor(
        o2 in log_range(0.5, 5.0),
        d2 in 1.0..20.0f64,
        eta in 0.0..0.05f64,
    ) {
        let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(1e-2, o2, d2 + 0.01, d2, 1e-3))
            .validate()
            .unwrap();
        let r = cooling_rates(&CoolingParams::new(c, 0.2, 0.0, 0.0)).unwrap();
        prop_assert_eq!((r.a_plus, r.a_minus), (0.0, 0.0));
        let p = CoolingParams::new(c, 0.2, eta, -eta);
        let full = cooling_rates(&p).unwrap();
        let half = cooling_rates(&CoolingParams { eta1: eta / 2.0, eta2: -eta / 2.0, ..p }).unwrap();
        prop_assert!((full.a_plus - 4.0 * half.a_plus).abs() <= 1e-12 * full.a_plus.abs().max(1e-300));
        prop_assert!((full.a_minus - 4.0 * half.a_minus).abs() <= 1e-12 * full.a_minus.abs().max(1e-300));
    }
}

#[test]
fn ridge_ratio_falls_with_linewidth() {
    for o2 in [1.0, 4.0, 10.0] {
        let d1 = o2 * o2 / (4.0 * 0.2);
        let mut last = f64::INFINITY;
        for gamma in [1e-4, 1e-3, 1e-2, 1e-1] {
            let c = SystemConfig::lambda(AtomParams::closed_lambda(0.5, 0.5), LaserDrive::new(1e-3, o2, d1, d1, gamma))
                .validate()
                .unwrap();
            let r = ratio_at_bright_peak(&c, 0.2, Hold::Probe).unwrap().value();
            assert!(r.is_finite() && r > 0.0);
            assert!(r <= last, "Ω₂ = {o2}, γ = {gamma}: {r} > {last}");
            last = r;
        }
    }
}
