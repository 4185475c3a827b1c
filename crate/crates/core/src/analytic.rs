//! Closed-form successful-computation probability.
//!
//! Success requires both users' offloaded bits to cross the uplink inside t1
//! and every execution branch to finish inside t2, with t1 + t2 within the
//! deadline. Averaging the Rayleigh fading out of that joint event gives a
//! product of a SIC interference prefactor and an exponential tail:
//!
//! ```text
//! Ps = Lb*l / (Lb*l + g1*(1-l)*La) * exp(-Lb*g2/((1-l)*rho) - g1*La*(1+g2)/(l*rho))
//! ```
//!
//! with `La`, `Lb` the large-scale losses, `l` the power split, and `g1`,
//! `g2` the per-user SINR/SNR thresholds implied by the offloaded bit counts.
//! Probabilities whose exponent underflows are returned as exact 0.0.

use crate::error::{Error, Result};
use crate::model::{time_feasible, NetworkConfig, OffloadingPlan};
use core::f64::consts::LN_2;

/// SINR threshold for user A and SNR threshold for user B. A threshold is
/// zero exactly when the matching offloaded bit count is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateThresholds {
    pub gamma1: f64,
    pub gamma2: f64,
}

/// Minimum decoding SINR/SNR for each user's offloaded share to fit the
/// uplink window: gamma_k = 2^(beta_k * M / (t1 * Bc)) - 1.
pub fn thresholds(cfg: &NetworkConfig, plan: &OffloadingPlan) -> Result<RateThresholds> {
    let bits_a = plan.beta_a * cfg.task_bits;
    let bits_b = plan.beta_b * cfg.task_bits;
    if plan.t1 <= 0.0 && (bits_a > 0.0 || bits_b > 0.0) {
        return Err(Error::DegeneratePlan);
    }
    let gamma = |bits: f64| {
        if bits == 0.0 {
            0.0
        } else {
            libm::expm1(bits / (plan.t1 * cfg.bandwidth) * LN_2)
        }
    };
    Ok(RateThresholds {
        gamma1: gamma(bits_a),
        gamma2: gamma(bits_b),
    })
}

/// Success probability of the plan under Rayleigh fading, in closed form.
/// Time-infeasible plans score exactly 0; a plan offloading nothing inside a
/// sufficient execution window scores exactly 1.
pub fn closed_form_ps(cfg: &NetworkConfig, plan: &OffloadingPlan) -> Result<f64> {
    if !time_feasible(cfg, plan) {
        return Ok(0.0);
    }
    let thr = thresholds(cfg, plan)?;
    Ok(feasible_ps(cfg, plan.lambda, thr.gamma1, thr.gamma2))
}

/// The fading average on the feasible branch. Threshold-zero terms are
/// skipped so that beta = 0 yields exactly 1 with no 0/0 hazard at the
/// lambda endpoints.
fn feasible_ps(cfg: &NetworkConfig, lambda: f64, gamma1: f64, gamma2: f64) -> f64 {
    let la = cfg.loss_a();
    let lb = cfg.loss_b();
    let rho = cfg.rho();
    let prefactor = if gamma1 > 0.0 {
        lb * lambda / (lb * lambda + gamma1 * (1.0 - lambda) * la)
    } else {
        1.0
    };
    let mut exponent = 0.0;
    if gamma2 > 0.0 {
        exponent -= lb * gamma2 / ((1.0 - lambda) * rho);
    }
    if gamma1 > 0.0 {
        exponent -= gamma1 * la * (1.0 + gamma2) / (lambda * rho);
    }
    prefactor * libm::exp(exponent)
}

/// Maximum success probability as a function of the power split alone, with
/// the time and share allocation already eliminated in closed form.
///
/// When local execution meets the deadline the result is 1 regardless of
/// `lambda_star`. Otherwise both users' thresholds collapse to a single
/// gamma* = 2^(N*M / ((T*(2+N) - 2*M*C/f_user) * Bc)) - 1 and the result is
/// the compact form l / (l + a1*(1-l)) * exp(-a2/(1-l) - a3/l).
///
/// Requires 0 < lambda_star < 1 on the offloading branch.
pub fn ps_at_optimum(cfg: &NetworkConfig, lambda_star: f64) -> Result<f64> {
    let local = cfg.local_only_time();
    if local <= cfg.deadline {
        return Ok(1.0);
    }
    // (N + 2) times the optimal uplink window.
    let span = cfg.deadline * (2.0 + cfg.ratio_n) - 2.0 * local;
    if span <= 0.0 {
        return Err(Error::InfeasibleDeadline);
    }
    let gamma_star = libm::expm1(cfg.ratio_n * cfg.task_bits / (span * cfg.bandwidth) * LN_2);
    let la = cfg.loss_a();
    let lb = cfg.loss_b();
    let rho = cfg.rho();
    let a1 = gamma_star * la / lb;
    let a2 = lb * gamma_star / rho;
    let a3 = gamma_star * la * (1.0 + gamma_star) / rho;
    Ok(lambda_star / (lambda_star + a1 * (1.0 - lambda_star))
        * libm::exp(-a2 / (1.0 - lambda_star) - a3 / lambda_star))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{defaults, theorem_plan};

    #[test]
    fn thresholds_zero_share() {
        let cfg = defaults();
        let mut plan = theorem_plan(0.3);
        plan.beta_a = 0.0;
        plan.beta_b = 0.0;
        let thr = thresholds(&cfg, &plan).unwrap();
        assert_eq!((thr.gamma1, thr.gamma2), (0.0, 0.0));
    }

    #[test]
    fn thresholds_unit_exponent() {
        // beta_a * M = t1 * Bc makes gamma1 exactly 1.
        let mut cfg = defaults();
        cfg.task_bits = 4e3;
        let mut plan = theorem_plan(0.3);
        plan.t1 = 0.004;
        plan.beta_a = 1.0;
        plan.beta_b = 0.5;
        let thr = thresholds(&cfg, &plan).unwrap();
        assert!((thr.gamma1 - 1.0).abs() < 1e-15);
        assert!((thr.gamma2 - (libm::sqrt(2.0) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn thresholds_at_balanced_allocation() {
        // 2^(5/3) - 1 at the default scenario's optimal windows.
        let cfg = defaults();
        let thr = thresholds(&cfg, &theorem_plan(0.3)).unwrap();
        assert!((thr.gamma1 - 2.1748021039363987).abs() <= 1e-15 * 2.17);
        assert_eq!(thr.gamma1, thr.gamma2);
    }

    #[test]
    fn thresholds_degenerate_plan() {
        let cfg = defaults();
        let mut plan = theorem_plan(0.3);
        plan.t1 = 0.0;
        assert_eq!(thresholds(&cfg, &plan), Err(Error::DegeneratePlan));
    }

    #[test]
    fn ps_trivial_branches() {
        let cfg = defaults();
        // Nothing offloaded and a 20 ms execution window within a relaxed
        // deadline: certain success.
        let mut roomy = defaults();
        roomy.deadline = 0.05;
        let idle = OffloadingPlan {
            t1: 0.0,
            t2: 0.02,
            beta_a: 0.0,
            beta_b: 0.0,
            lambda: 0.5,
        };
        assert_eq!(closed_form_ps(&roomy, &idle).unwrap(), 1.0);
        // Overrunning the deadline is the zero branch even when thresholds
        // would be undefined.
        let overrun = OffloadingPlan {
            t1: 0.0,
            t2: 0.011,
            beta_a: 0.9,
            beta_b: 0.9,
            lambda: 0.5,
        };
        assert_eq!(closed_form_ps(&cfg, &overrun).unwrap(), 0.0);
        let long = OffloadingPlan {
            t2: 0.007,
            ..theorem_plan(0.3)
        };
        assert_eq!(closed_form_ps(&cfg, &long).unwrap(), 0.0);
    }

    #[test]
    fn ps_matches_frozen_value() {
        // Pinned ahead of the build by an independent Monte Carlo run with
        // 1e7 samples: estimate 0.9918507 +- 2.84e-5, which brackets this
        // closed-form value at rho = 1e10, lambda = 0.3.
        let mut cfg = defaults();
        cfg.p_total = 10.0;
        let got = closed_form_ps(&cfg, &theorem_plan(0.3)).unwrap();
        assert!((got - 0.9918115638205406).abs() <= 1e-12);
    }

    #[test]
    fn ps_underflows_to_zero() {
        let mut cfg = defaults();
        cfg.p_total = 1e-16;
        let got = closed_form_ps(&cfg, &theorem_plan(0.3)).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn ps_monotone_spot_checks() {
        let mut lo = defaults();
        lo.p_total = 0.5;
        let mut hi = defaults();
        hi.p_total = 5.0;
        let plan = theorem_plan(0.4);
        assert!(
            closed_form_ps(&hi, &plan).unwrap() > closed_form_ps(&lo, &plan).unwrap(),
            "success probability must grow with transmit power"
        );
        // Larger shares offloaded within the same windows lower the odds.
        let mut heavier = plan;
        heavier.beta_a = 0.75;
        assert!(closed_form_ps(&lo, &heavier).unwrap() < closed_form_ps(&lo, &plan).unwrap());
        // The balanced plan already spends the whole deadline; giving the
        // uplink less of it raises the thresholds and lowers the odds.
        let mut shorter = plan;
        shorter.t1 = 0.004;
        assert!(closed_form_ps(&lo, &shorter).unwrap() < closed_form_ps(&lo, &plan).unwrap());
    }

    #[test]
    fn optimum_local_branch_is_certain() {
        let mut cfg = defaults();
        cfg.task_bits = 4e3;
        assert_eq!(ps_at_optimum(&cfg, 0.7).unwrap(), 1.0);
    }

    #[test]
    fn optimum_rejects_hopeless_deadline() {
        let mut cfg = defaults();
        cfg.deadline = 0.005;
        assert_eq!(ps_at_optimum(&cfg, 0.7), Err(Error::InfeasibleDeadline));
    }

    #[test]
    fn optimum_agrees_with_plan_evaluation() {
        // Independent route check: the compact form above versus the general
        // closed form evaluated at the balanced allocation.
        for p_total in [0.1, 1.0, 10.0, 100.0] {
            let mut cfg = defaults();
            cfg.p_total = p_total;
            for lambda in [0.2, 0.5, 0.8649334302061422] {
                let via_plan = closed_form_ps(&cfg, &theorem_plan(lambda)).unwrap();
                let via_opt = ps_at_optimum(&cfg, lambda).unwrap();
                assert!(
                    (via_plan - via_opt).abs() <= 1e-12 * via_plan.max(1e-300),
                    "routes disagree at P={p_total} lambda={lambda}: {via_plan} vs {via_opt}"
                );
            }
        }
    }
}
