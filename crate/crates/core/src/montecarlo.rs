//! Monte Carlo estimation of the successful-computation probability,
//! straight from the channel model.
//!
//! The success event is evaluated per fading draw from the raw definition
//! (offloaded bits of both users delivered inside t1, every execution branch
//! inside t2, deadline respected), deliberately not through the closed-form
//! decomposition, so the estimator is an independent oracle for it.
//!
//! Determinism contract: sample i draws its two gains from stream i of a
//! ChaCha8 generator keyed by the seed. Estimates are therefore bit-identical
//! under any partition of the index range across workers; parallel callers
//! split `0..n` however they like and sum the counts.

use crate::error::{Error, Result};
use crate::model::{
    achievable_bits, sinr_user_a, snr_user_b, time_feasible, ChannelRealization, NetworkConfig,
    OffloadingPlan,
};
use core::ops::Range;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Binomial estimate of a success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsEstimate {
    pub p_hat: f64,
    pub n: u64,
    /// sqrt(p_hat (1 - p_hat) / n).
    pub stderr: f64,
    pub seed: u64,
}

impl PsEstimate {
    pub fn from_counts(successes: u64, n: u64, seed: u64) -> Self {
        let p_hat = successes as f64 / n as f64;
        PsEstimate {
            p_hat,
            n,
            stderr: libm::sqrt(p_hat * (1.0 - p_hat) / n as f64),
            seed,
        }
    }
}

/// Maps raw bits to the open-below unit interval (0, 1], so the log below
/// never sees zero.
fn unit_open(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * 1.110_223_024_625_156_5e-16
}

/// One draw of the two Exp(1) fading gains via inverse CDF.
pub fn sample_channel<R: RngCore>(rng: &mut R) -> ChannelRealization {
    let g_a = -libm::log(unit_open(rng.next_u64()));
    let g_b = -libm::log(unit_open(rng.next_u64()));
    ChannelRealization { g_a, g_b }
}

/// The raw success event for one fading draw: both offloaded shares fit the
/// uplink window, with user A decoded first against B's interference, and
/// the plan's timing is feasible.
pub fn success_event(cfg: &NetworkConfig, plan: &OffloadingPlan, ch: &ChannelRealization) -> bool {
    if !time_feasible(cfg, plan) {
        return false;
    }
    let bits_a = achievable_bits(plan.t1, cfg.bandwidth, sinr_user_a(cfg, plan, ch));
    let bits_b = achievable_bits(plan.t1, cfg.bandwidth, snr_user_b(cfg, plan, ch));
    bits_a >= plan.beta_a * cfg.task_bits && bits_b >= plan.beta_b * cfg.task_bits
}

/// Counts draws in `range` satisfying an arbitrary per-channel event, under
/// the per-index stream contract. Workers may split a range freely; counts
/// over a partition sum to the count over the whole range.
pub fn event_count<F: Fn(&ChannelRealization) -> bool>(
    seed: u64,
    range: Range<u64>,
    event: F,
) -> u64 {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    for i in range {
        let mut rng = base.clone();
        rng.set_stream(i);
        if event(&sample_channel(&mut rng)) {
            successes += 1;
        }
    }
    successes
}

/// Estimates the probability of an arbitrary per-channel event.
pub fn estimate_event<F: Fn(&ChannelRealization) -> bool>(
    n: u64,
    seed: u64,
    event: F,
) -> PsEstimate {
    PsEstimate::from_counts(event_count(seed, 0..n, event), n, seed)
}

/// Success count over an index sub-range, for parallel callers. Rejects the
/// same degenerate plans as the closed form so both sides share one domain.
pub fn success_count(
    cfg: &NetworkConfig,
    plan: &OffloadingPlan,
    seed: u64,
    range: Range<u64>,
) -> Result<u64> {
    if plan.t1 <= 0.0 && (plan.beta_a * cfg.task_bits > 0.0 || plan.beta_b * cfg.task_bits > 0.0) {
        return Err(Error::DegeneratePlan);
    }
    Ok(event_count(seed, range, |ch| success_event(cfg, plan, ch)))
}

/// Monte Carlo estimate of the plan's success probability from n draws.
pub fn estimate_ps(
    cfg: &NetworkConfig,
    plan: &OffloadingPlan,
    n: u64,
    seed: u64,
) -> Result<PsEstimate> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1"));
    }
    let successes = success_count(cfg, plan, seed, 0..n)?;
    Ok(PsEstimate::from_counts(successes, n, seed))
}
