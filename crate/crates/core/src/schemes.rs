//! Baseline schemes the optimized plan is compared against, and a common
//! evaluation dispatch over the closed form and the Monte Carlo estimator.
//!
//! The orthogonal baseline needs a definition of its own: complete
//! offloading over TDMA, the uplink window split into two equal exclusive
//! sub-slots with each user transmitting alone at full power. Success then
//! factors into two independent Rayleigh tails. This is the simplest
//! orthogonal counterpart that keeps the total-power comparison fair; its
//! absolute curve depends on that choice.

use crate::analytic::closed_form_ps;
use crate::error::{Error, Result};
use crate::model::{
    achievable_bits, min_execution_window, remaining_uplink_window, time_feasible,
    ChannelRealization, NetworkConfig, OffloadingPlan,
};
use crate::montecarlo::{estimate_event, estimate_ps, PsEstimate};
use crate::optimizer::{balanced_windows, optimal_plan};
use core::f64::consts::LN_2;

/// The comparison set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    /// Optimized windows, shares, and power split.
    Proposed,
    /// Everything computed on the users; succeeds iff local time fits the
    /// deadline.
    FullLocal,
    /// Both tasks offloaded entirely over NOMA.
    CompleteOffloadNoma,
    /// Both users offload the given fixed share over NOMA.
    FixedOffloadNoma(f64),
    /// Both tasks offloaded entirely over two exclusive TDMA sub-slots.
    CompleteOffloadOma,
}

impl SchemeKind {
    /// Stable identifier used in serialized output.
    pub fn label(&self) -> &'static str {
        match self {
            SchemeKind::Proposed => "proposed",
            SchemeKind::FullLocal => "full-local",
            SchemeKind::CompleteOffloadNoma => "complete-offload-noma",
            SchemeKind::FixedOffloadNoma(_) => "fixed-offload-noma",
            SchemeKind::CompleteOffloadOma => "complete-offload-oma",
        }
    }
}

/// How a scheme chooses its power split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaPolicy {
    /// Grid argmax of the scheme's own success probability over (0, 1),
    /// step 1e-4; plateaus keep the smallest grid point. The proposed scheme
    /// instead uses its closed-form split.
    Optimal,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub lambda_policy: LambdaPolicy,
}

/// Evaluation method for [`scheme_ps`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMethod {
    Analytic,
    MonteCarlo { n: u64, seed: u64 },
}

/// A probability, either exact or estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeResult {
    Analytic(f64),
    Estimate(PsEstimate),
}

impl SchemeResult {
    pub fn value(&self) -> f64 {
        match self {
            SchemeResult::Analytic(p) => *p,
            SchemeResult::Estimate(e) => e.p_hat,
        }
    }
}

/// Materializes the scheme's decision variables for a scenario.
pub fn scheme_plan(cfg: &NetworkConfig, spec: &SchemeSpec) -> Result<OffloadingPlan> {
    cfg.validate()?;
    let local = cfg.local_only_time();
    match spec.kind {
        SchemeKind::Proposed => match spec.lambda_policy {
            LambdaPolicy::Optimal => optimal_plan(cfg).map(|(plan, _)| plan),
            LambdaPolicy::Fixed(lambda) => {
                check_lambda(lambda)?;
                if local <= cfg.deadline {
                    return Ok(local_plan(local));
                }
                let (t1, t2, beta) = balanced_windows(cfg)?;
                Ok(OffloadingPlan {
                    t1,
                    t2,
                    beta_a: beta,
                    beta_b: beta,
                    lambda,
                })
            }
        },
        SchemeKind::FullLocal => Ok(OffloadingPlan {
            t1: 0.0,
            t2: local.min(cfg.deadline),
            beta_a: 0.0,
            beta_b: 0.0,
            lambda: 0.5,
        }),
        SchemeKind::CompleteOffloadNoma => offloading_plan(cfg, 1.0, spec.lambda_policy),
        SchemeKind::FixedOffloadNoma(beta) => {
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(Error::InvalidPlan(
                    "fixed offloading share must lie in (0, 1]",
                ));
            }
            offloading_plan(cfg, beta, spec.lambda_policy)
        }
        SchemeKind::CompleteOffloadOma => {
            let t2 = min_execution_window(cfg, 1.0, 1.0);
            let t1 = remaining_uplink_window(cfg.deadline, t2);
            if t1 <= 0.0 {
                return Err(Error::InfeasibleDeadline);
            }
            // Each user gets full power in its own sub-slot; lambda is
            // unused and fixed by convention.
            Ok(OffloadingPlan {
                t1,
                t2,
                beta_a: 1.0,
                beta_b: 1.0,
                lambda: 0.5,
            })
        }
    }
}

fn local_plan(local: f64) -> OffloadingPlan {
    OffloadingPlan {
        t1: 0.0,
        t2: local,
        beta_a: 0.0,
        beta_b: 0.0,
        lambda: 0.5,
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidPlan("lambda must lie in (0, 1)"))
    }
}

/// Shared construction for the NOMA baselines: the tightest execution
/// window for the share, the rest of the deadline on the uplink, then the
/// power split per policy.
fn offloading_plan(cfg: &NetworkConfig, beta: f64, policy: LambdaPolicy) -> Result<OffloadingPlan> {
    let t2 = min_execution_window(cfg, beta, beta);
    let t1 = remaining_uplink_window(cfg.deadline, t2);
    if t1 <= 0.0 {
        return Err(Error::InfeasibleDeadline);
    }
    let mut plan = OffloadingPlan {
        t1,
        t2,
        beta_a: beta,
        beta_b: beta,
        lambda: 0.5,
    };
    plan.lambda = match policy {
        LambdaPolicy::Fixed(lambda) => {
            check_lambda(lambda)?;
            lambda
        }
        LambdaPolicy::Optimal => grid_lambda(cfg, &plan)?,
    };
    Ok(plan)
}

/// Brute-force power split for a fixed plan: argmax of the closed form over
/// the lambda grid.
fn grid_lambda(cfg: &NetworkConfig, plan: &OffloadingPlan) -> Result<f64> {
    let mut probe = *plan;
    let mut best = (0.5, -1.0);
    for k in 1..10_000 {
        let lambda = k as f64 * 1e-4;
        probe.lambda = lambda;
        let ps = closed_form_ps(cfg, &probe)?;
        if ps > best.1 {
            best = (lambda, ps);
        }
    }
    Ok(best.0)
}

/// Closed-form success probability of the TDMA baseline: both solo links
/// must carry a full task in half the uplink window, so
/// exp(-(loss_a + loss_b) * gamma / rho) with gamma = 2^(2M / (t1 Bc)) - 1.
pub fn oma_ps_analytic(cfg: &NetworkConfig, plan: &OffloadingPlan) -> f64 {
    if !time_feasible(cfg, plan) {
        return 0.0;
    }
    let gamma = libm::expm1(2.0 * cfg.task_bits / (plan.t1 * cfg.bandwidth) * LN_2);
    libm::exp(-(cfg.loss_a() + cfg.loss_b()) * gamma / cfg.rho())
}

/// Per-draw success event of the TDMA baseline, for the Monte Carlo path.
pub fn oma_success(cfg: &NetworkConfig, plan: &OffloadingPlan, ch: &ChannelRealization) -> bool {
    if !time_feasible(cfg, plan) {
        return false;
    }
    let half = 0.5 * plan.t1;
    let rho = cfg.rho();
    let bits_a = achievable_bits(half, cfg.bandwidth, rho * ch.g_a / cfg.loss_a());
    let bits_b = achievable_bits(half, cfg.bandwidth, rho * ch.g_b / cfg.loss_b());
    bits_a >= cfg.task_bits && bits_b >= cfg.task_bits
}

/// Evaluates a given plan under a scheme's success definition. The Monte
/// Carlo path re-derives nothing from the closed form; for the TDMA
/// baseline it swaps in the solo-transmission event. Sweep drivers that
/// override plan fields (pinned uplink windows) call this directly.
pub fn plan_ps(
    cfg: &NetworkConfig,
    kind: SchemeKind,
    plan: &OffloadingPlan,
    method: EvalMethod,
) -> Result<SchemeResult> {
    match method {
        EvalMethod::Analytic => {
            let ps = match kind {
                SchemeKind::FullLocal => {
                    if cfg.local_only_time() <= cfg.deadline {
                        1.0
                    } else {
                        0.0
                    }
                }
                SchemeKind::CompleteOffloadOma => oma_ps_analytic(cfg, plan),
                _ => closed_form_ps(cfg, plan)?,
            };
            Ok(SchemeResult::Analytic(ps))
        }
        EvalMethod::MonteCarlo { n, seed } => {
            let est = match kind {
                SchemeKind::CompleteOffloadOma => {
                    estimate_event(n, seed, |ch| oma_success(cfg, plan, ch))
                }
                _ => estimate_ps(cfg, plan, n, seed)?,
            };
            Ok(SchemeResult::Estimate(est))
        }
    }
}

/// Evaluates a scheme end to end: materialize the plan, then score it.
pub fn scheme_ps(
    cfg: &NetworkConfig,
    spec: &SchemeSpec,
    method: EvalMethod,
) -> Result<SchemeResult> {
    let plan = scheme_plan(cfg, spec)?;
    plan_ps(cfg, spec.kind, &plan, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{defaults, with_power};

    fn spec(kind: SchemeKind) -> SchemeSpec {
        SchemeSpec {
            kind,
            lambda_policy: LambdaPolicy::Optimal,
        }
    }

    fn analytic(cfg: &NetworkConfig, s: &SchemeSpec) -> f64 {
        scheme_ps(cfg, s, EvalMethod::Analytic).unwrap().value()
    }

    #[test]
    fn full_local_is_an_indicator() {
        let cfg = defaults();
        // 20 ms of local work against a 10 ms deadline.
        assert_eq!(analytic(&cfg, &spec(SchemeKind::FullLocal)), 0.0);
        let mut small = cfg;
        small.task_bits = 4e3;
        assert_eq!(analytic(&small, &spec(SchemeKind::FullLocal)), 1.0);
        let plan = scheme_plan(&small, &spec(SchemeKind::FullLocal)).unwrap();
        assert_eq!(plan.t2, 0.008);
        let est = scheme_ps(
            &small,
            &spec(SchemeKind::FullLocal),
            EvalMethod::MonteCarlo { n: 2_000, seed: 1 },
        )
        .unwrap();
        assert_eq!(est.value(), 1.0);
    }

    #[test]
    fn complete_offload_windows() {
        let cfg = with_power(10.0);
        let plan = scheme_plan(&cfg, &spec(SchemeKind::CompleteOffloadNoma)).unwrap();
        assert!((plan.t2 - 0.008).abs() < 1e-18);
        assert!((plan.t1 - 0.002).abs() < 1e-18);
        assert_eq!((plan.beta_a, plan.beta_b), (1.0, 1.0));
        // Offloading two full tasks stops fitting the deadline once
        // 2 M C / (N f_user) reaches it.
        let mut heavy = cfg;
        heavy.task_bits = 1.25e4;
        assert_eq!(
            scheme_plan(&heavy, &spec(SchemeKind::CompleteOffloadNoma)).err(),
            Some(Error::InfeasibleDeadline)
        );
    }

    #[test]
    fn fixed_share_windows() {
        let cfg = with_power(10.0);
        let plan = scheme_plan(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.65))).unwrap();
        // Local branch binds below the balance point: t2 = 0.35 * 20 ms.
        assert!((plan.t2 - 0.007).abs() < 1e-18);
        assert!((plan.t1 - 0.003).abs() < 1e-18);
        let plan = scheme_plan(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.85))).unwrap();
        // Server branch binds above it: t2 = 2 * 0.85 * 20 / 5 ms.
        assert!((plan.t2 - 0.0068).abs() < 1e-18);
        assert_eq!(
            scheme_plan(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.0))).err(),
            Some(Error::InvalidPlan(
                "fixed offloading share must lie in (0, 1]"
            ))
        );
    }

    #[test]
    fn fixed_share_ps_falls_on_the_server_bound_branch() {
        // Above the balance point N/(N+2), raising the share shrinks the
        // uplink window and raises the thresholds, so the probability drops.
        let cfg = with_power(10.0);
        let mut last = f64::INFINITY;
        for beta in [0.72, 0.8, 0.85, 0.9, 0.95, 0.99] {
            let ps = analytic(&cfg, &spec(SchemeKind::FixedOffloadNoma(beta)));
            assert!(ps < last, "beta {beta}: {ps} !< {last}");
            last = ps;
        }
        // The three shares quoted for the power sweep keep that order too.
        let p65 = analytic(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.65)));
        let p85 = analytic(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.85)));
        let p95 = analytic(&cfg, &spec(SchemeKind::FixedOffloadNoma(0.95)));
        assert!(p65 > p85 && p85 > p95);
    }

    #[test]
    fn oma_matches_hand_values() {
        let cfg = with_power(10.0);
        let plan = scheme_plan(&cfg, &spec(SchemeKind::CompleteOffloadOma)).unwrap();
        assert!((plan.t1 - 0.002).abs() < 1e-18);
        // Frozen hand evaluation: gamma = 1023, exp(-(626 + 390626) * 1023 / 1e10).
        let ps = analytic(&cfg, &spec(SchemeKind::CompleteOffloadOma));
        assert!((ps - 0.9607653432396642).abs() <= 1e-12);
    }

    #[test]
    fn oma_estimate_brackets_analytic() {
        let cfg = with_power(10.0);
        let s = spec(SchemeKind::CompleteOffloadOma);
        let exact = analytic(&cfg, &s);
        let est = match scheme_ps(
            &cfg,
            &s,
            EvalMethod::MonteCarlo {
                n: 200_000,
                seed: 3,
            },
        )
        .unwrap()
        {
            SchemeResult::Estimate(e) => e,
            SchemeResult::Analytic(_) => unreachable!(),
        };
        assert!((est.p_hat - exact).abs() <= 3.0 * est.stderr);
    }

    #[test]
    fn proposed_tops_every_baseline() {
        let cfg = with_power(10.0);
        let top = analytic(&cfg, &spec(SchemeKind::Proposed));
        for kind in [
            SchemeKind::FullLocal,
            SchemeKind::CompleteOffloadNoma,
            SchemeKind::FixedOffloadNoma(0.85),
            SchemeKind::CompleteOffloadOma,
        ] {
            let ps = analytic(&cfg, &spec(kind));
            assert!(top >= ps - 1e-12, "{}: {ps} > {top}", kind.label());
        }
    }

    #[test]
    fn fixed_lambda_policy_is_respected() {
        let cfg = with_power(10.0);
        let s = SchemeSpec {
            kind: SchemeKind::Proposed,
            lambda_policy: LambdaPolicy::Fixed(0.3),
        };
        let plan = scheme_plan(&cfg, &s).unwrap();
        assert_eq!(plan.lambda, 0.3);
        assert_eq!(plan.beta_a, 5.0 / 7.0);
        let bad = SchemeSpec {
            kind: SchemeKind::CompleteOffloadNoma,
            lambda_policy: LambdaPolicy::Fixed(1.5),
        };
        assert!(scheme_plan(&cfg, &bad).is_err());
    }

    #[test]
    fn grid_lambda_tracks_the_closed_form_split() {
        // For the balanced allocation the brute-force split and the cubic's
        // split must land in the same grid step.
        let cfg = with_power(10.0);
        let (opt, _) = crate::optimizer::optimal_plan(&cfg).unwrap();
        let probe = OffloadingPlan { lambda: 0.5, ..opt };
        let grid = grid_lambda(&cfg, &probe).unwrap();
        assert!((grid - opt.lambda).abs() <= 1e-4 + 1e-12);
    }
}
