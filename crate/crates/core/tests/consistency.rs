//! Cross-module consistency: the compact optimum form, the general closed
//! form, the cubic solver, the bisection oracle, the brute-force grid, and
//! the channel simulation must all tell the same story.

use noma_mec::{
    bisection_lambda, closed_form_ps, estimate_ps, optimal_plan, scheme_ps, thresholds,
    CubicCoefficients, EvalMethod, LambdaPolicy, NetworkConfig, OffloadingPlan, SchemeKind,
    SchemeResult, SchemeSpec,
};
use rand_core::{RngCore, SeedableRng};

fn scenario(p_total: f64) -> NetworkConfig {
    NetworkConfig {
        d_a: 5.0,
        d_b: 25.0,
        alpha: 4.0,
        p_total,
        sigma2: 1e-9,
        bandwidth: 1e6,
        f_user: 0.5e9,
        ratio_n: 5.0,
        cycles_per_bit: 1e3,
        task_bits: 1e4,
        deadline: 0.01,
    }
}

const POWER_GRID: [f64; 7] = [0.05, 0.2, 1.0, 5.0, 20.0, 80.0, 300.0];

#[test]
fn reported_probability_is_the_plans_probability() {
    for p_total in POWER_GRID {
        let cfg = scenario(p_total);
        let (plan, ps) = optimal_plan(&cfg).unwrap();
        let direct = closed_form_ps(&cfg, &plan).unwrap();
        assert!(
            (ps - direct).abs() <= 1e-11 * direct.max(1e-300),
            "P={p_total}: optimum form {ps} vs plan form {direct}"
        );
    }
}

#[test]
fn formula_split_matches_the_bisection_oracle() {
    for p_total in POWER_GRID {
        let cfg = scenario(p_total);
        let (plan, _) = optimal_plan(&cfg).unwrap();
        let thr = thresholds(&cfg, &plan).unwrap();
        let c = CubicCoefficients::from_config(&cfg, &thr).unwrap();
        let oracle = bisection_lambda(&c, 1e-12).unwrap();
        assert!(
            (plan.lambda - oracle.lambda_star).abs() <= 1e-9,
            "P={p_total}: {} vs {}",
            plan.lambda,
            oracle.lambda_star
        );
    }
}

#[test]
fn grid_argmax_agrees_with_the_formula_split() {
    for p_total in [0.2, 10.0] {
        let cfg = scenario(p_total);
        let (plan, _) = optimal_plan(&cfg).unwrap();
        let mut probe = plan;
        let mut best = (0.5, -1.0);
        for k in 1..10_000 {
            let lambda = k as f64 * 1e-4;
            probe.lambda = lambda;
            let ps = closed_form_ps(&cfg, &probe).unwrap();
            if ps > best.1 {
                best = (lambda, ps);
            }
        }
        assert!(
            (plan.lambda - best.0).abs() <= 1e-4 + 1e-12,
            "P={p_total}: formula {} vs grid {}",
            plan.lambda,
            best.0
        );
    }
}

#[test]
fn simulation_brackets_the_closed_form_at_the_optimum() {
    for (p_total, seed) in [(0.5, 41u64), (5.0, 42), (50.0, 43)] {
        let cfg = scenario(p_total);
        let (plan, ps) = optimal_plan(&cfg).unwrap();
        let est = estimate_ps(&cfg, &plan, 200_000, seed).unwrap();
        assert!(
            (est.p_hat - ps).abs() <= 3.0 * est.stderr.max(1e-6),
            "P={p_total}: estimate {} vs closed form {ps} (stderr {})",
            est.p_hat,
            est.stderr
        );
    }
}

#[test]
fn simulation_brackets_the_closed_form_at_random_plans() {
    // A handful of frozen random scenarios with plans built from the window
    // helpers; skip draws whose probability sits too close to 0 or 1 for a
    // two-sided check to mean anything.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut unit = move || rng.next_u64() as f64 / 2.0f64.powi(64);
    let mut checked = 0;
    while checked < 6 {
        let mut cfg = scenario(0.0);
        cfg.p_total = 0.1 * libm::pow(1000.0, unit());
        let beta = 0.6 + 0.35 * unit();
        let lambda = 0.1 + 0.8 * unit();
        let t2 = noma_mec::min_execution_window(&cfg, beta, beta);
        let t1 = noma_mec::remaining_uplink_window(cfg.deadline, t2);
        if t1 <= 0.0 {
            continue;
        }
        let plan = OffloadingPlan {
            t1,
            t2,
            beta_a: beta,
            beta_b: beta,
            lambda,
        };
        let exact = closed_form_ps(&cfg, &plan).unwrap();
        if !(0.05..=0.995).contains(&exact) {
            continue;
        }
        let est = estimate_ps(&cfg, &plan, 100_000, 7000 + checked).unwrap();
        assert!(
            (est.p_hat - exact).abs() <= 3.5 * est.stderr,
            "P={}: estimate {} vs closed form {exact}",
            cfg.p_total,
            est.p_hat
        );
        checked += 1;
    }
}

#[test]
fn proposed_dominates_the_baselines_across_the_power_grid() {
    for p_total in [0.1, 0.5, 2.0, 10.0, 50.0] {
        let cfg = scenario(p_total);
        let spec = |kind| SchemeSpec {
            kind,
            lambda_policy: LambdaPolicy::Optimal,
        };
        let value = |kind| match scheme_ps(&cfg, &spec(kind), EvalMethod::Analytic).unwrap() {
            SchemeResult::Analytic(p) => p,
            SchemeResult::Estimate(_) => unreachable!(),
        };
        let top = value(SchemeKind::Proposed);
        for kind in [
            SchemeKind::FullLocal,
            SchemeKind::CompleteOffloadNoma,
            SchemeKind::FixedOffloadNoma(0.85),
            SchemeKind::CompleteOffloadOma,
        ] {
            let ps = value(kind);
            assert!(
                top >= ps - 1e-12,
                "P={p_total} {}: baseline {ps} beats proposed {top}",
                kind.label()
            );
        }
    }
}
