use proptest::prelude::*;

use impulsive_logistic::index::{compute_index, compute_r_noimpulse, periodic_ode_solution, temporal_factor};
use impulsive_logistic::model::{build_envelopes, EvolutionRate, ModelParams, PulseFunction, PulseMap};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..3.0, 0.2f64..3.0, 0.01f64..1.0, 1.0f64..6.0, 0.5f64..4.0)
        .prop_map(|(d, alpha, gamma, l0, period)| ModelParams { d, alpha, gamma, l0, period })
}

fn monotone_pulse() -> impl Strategy<Value = PulseFunction> {
    prop_oneof![
        Just(PulseFunction::Identity),
        (0.5f64..20.0, 0.05f64..1.0).prop_map(|(a, f)| PulseFunction::BevertonHolt { a, m: f * a }),
    ]
}

fn any_pulse() -> impl Strategy<Value = PulseFunction> {
    prop_oneof![
        monotone_pulse(),
        (0.001f64..0.5, 0.1f64..10.0).prop_map(|(r, b)| PulseFunction::Ricker { r, b }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exponent_sign_matches_index(p in params(), c in -0.3f64..0.3, g in any_pulse()) {
        let rho = EvolutionRate::exp_cosine(c, p.period);
        let r = compute_index(&p, &rho, &g).unwrap();
        if (r.r0_star - 1.0).abs() > 1e-12 {
            prop_assert_eq!(r.lambda_star > 0.0, r.r0_star > 1.0);
        }
        if let Some(r0) = r.r0 {
            if (r0 - 1.0).abs() > 1e-12 {
                prop_assert_eq!(r0 > 1.0, r.lambda_star > 0.0);
                prop_assert_eq!(r0 > 1.0, r.r0_star > 1.0);
            }
        } else {
            prop_assert!(r.lambda_star > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_increases_with_amplitude(p in params(), c in -0.3f64..0.29, dc in 0.005f64..0.3, g in monotone_pulse()) {
        let lo = compute_index(&p, &EvolutionRate::exp_cosine(c, p.period), &g).unwrap();
        let hi = compute_index(&p, &EvolutionRate::exp_cosine(c + dc, p.period), &g).unwrap();
        prop_assert!(hi.lambda_star > lo.lambda_star);
        if let (Some(a), Some(b)) = (lo.r0, hi.r0) {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn index_decreases_with_diffusion(p in params(), c in -0.3f64..0.3, scale in 1.01f64..3.0) {
        let rho = EvolutionRate::exp_cosine(c, p.period);
        let more = ModelParams { d: p.d * scale, ..p };
        prop_assert!(compute_r_noimpulse(&more, &rho).unwrap() < compute_r_noimpulse(&p, &rho).unwrap());
    }

    #[test]
    fn beverton_holt_structure(a in 0.5f64..20.0, f in 0.05f64..1.0, u in 0.0f64..100.0, w in 0.0f64..100.0) {
        let g = PulseFunction::BevertonHolt { a, m: f * a };
        let gp = g.derivative_at_zero();
        prop_assert!(g.value(u) <= gp * u * (1.0 + 1e-15));
        let (s, t) = (u.min(w) + 1e-9, u.max(w) + 2e-9);
        prop_assert!(g.value(t) / t <= g.value(s) / s * (1.0 + 1e-15));
        prop_assert!(g.value(s) <= g.value(t));
        let b = g.b2_bound();
        let v = u.min(b.radius);
        prop_assert!(g.value(v) >= gp * v - b.coefficient * v.powf(b.exponent) - 1e-12);
    }

    #[test]
    fn ricker_bound(r in 0.001f64..0.5, bb in 0.1f64..10.0, frac in 0.0f64..1.0) {
        let g = PulseFunction::Ricker { r, b: bb };
        let b = g.b2_bound();
        let u = frac * b.radius;
        prop_assert!(g.value(u) >= g.derivative_at_zero() * u - b.coefficient * u.powf(b.exponent) - 1e-12);
    }

    #[test]
    fn periodic_ode_routes_agree(p in params(), c in -0.3f64..0.3, g in monotone_pulse()) {
        let rho = EvolutionRate::exp_cosine(c, p.period);
        if (p.alpha * p.period).exp() * g.derivative_at_zero() > 1.05 {
            let w = periodic_ode_solution(&p, &rho, &g).unwrap();
            prop_assert!(w.max_rel_disagreement < 1e-8);
            // periodic: W(T) = anchor
            prop_assert!((w.end_value() - w.anchor).abs() < 1e-8 * w.anchor);
        }
    }

    #[test]
    fn temporal_factor_is_periodic(p in params(), c in -0.3f64..0.3, g in monotone_pulse()) {
        let rho = EvolutionRate::exp_cosine(c, p.period);
        let r = compute_index(&p, &rho, &g).unwrap();
        if let Some(r0) = r.r0 {
            let f = temporal_factor(&p, &rho, &g, r0).unwrap();
            prop_assert!((f.end_value() - f.pre_jump).abs() < 1e-8 * f.pre_jump.max(1.0));
            prop_assert!((f.post_jump() / f.pre_jump - g.derivative_at_zero()).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn envelopes_sandwich_the_pulse(r in 0.01f64..0.5, b in 0.5f64..10.0, c in 0.0f64..0.2) {
        let p = ModelParams::reference();
        let rho = EvolutionRate::exp_cosine(c, p.period);
        let g = PulseFunction::Ricker { r, b };
        let env = build_envelopes(&g, &p, &rho).unwrap();
        let (up, lo) = (env.upper_map(), env.lower_map());
        let (mut prev_u, mut prev_l) = (0.0, 0.0);
        for i in 0..10_000 {
            let u = (env.beta_plus * i as f64 / 9_999.0).min(env.beta_plus);
            let (gl, gv, gu) = (lo.apply(u), g.value(u), up.apply(u));
            prop_assert!(gl <= gv && gv <= gu);
            // pointwise evaluation of g is only monotone up to rounding
            prop_assert!(gl >= prev_l * (1.0 - 1e-14) && gu >= prev_u * (1.0 - 1e-14));
            prev_l = gl;
            prev_u = gu;
        }
        let h = 1e-8;
        let gp = g.derivative_at_zero();
        prop_assert!(((up.apply(h) / h) - gp).abs() < 1e-6 * gp);
        prop_assert!(((lo.apply(h) / h) - gp).abs() < 1e-6 * gp);
        prop_assert!(up.is_monotone() && lo.is_monotone());
    }
}
