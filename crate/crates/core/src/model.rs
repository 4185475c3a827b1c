//! Scenario parameters and the deterministic physics of the link: path loss,
//! SINR/SNR under successive interference cancellation, achievable bits, and
//! execution-time accounting.
//!
//! Two users A and B offload shares of equally sized tasks to an edge server
//! over a shared uplink. User A's signal is decoded first, with user B's
//! transmission as interference; B is then decoded interference-free. All
//! quantities are SI-unit reals; bit counts are fractional on purpose, since
//! comparisons happen on reals.

use crate::error::{Error, Result};

/// Static scenario parameters. Distances are stored raw; the large-scale
/// factor 1 + d^alpha is computed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Distance user A to server, meters.
    pub d_a: f64,
    /// Distance user B to server, meters.
    pub d_b: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Total transmit power shared by the two users, watts.
    pub p_total: f64,
    /// Noise variance, watts.
    pub sigma2: f64,
    /// Uplink bandwidth, hertz.
    pub bandwidth: f64,
    /// User CPU frequency, cycles per second.
    pub f_user: f64,
    /// Server-to-user CPU frequency ratio; must exceed 1.
    pub ratio_n: f64,
    /// CPU cycles needed per task bit.
    pub cycles_per_bit: f64,
    /// Task length of each user, bits.
    pub task_bits: f64,
    /// Completion deadline, seconds.
    pub deadline: f64,
}

impl NetworkConfig {
    /// Checks every field against its documented range.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.d_a, "d_a must be positive"),
            (self.d_b, "d_b must be positive"),
            (self.alpha, "alpha must be positive"),
            (self.p_total, "p_total must be positive"),
            (self.sigma2, "sigma2 must be positive"),
            (self.bandwidth, "bandwidth must be positive"),
            (self.f_user, "f_user must be positive"),
            (self.deadline, "deadline must be positive"),
        ];
        for (value, msg) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidConfig(msg));
            }
        }
        if self.ratio_n <= 1.0 || !self.ratio_n.is_finite() {
            return Err(Error::InvalidConfig("ratio_n must exceed 1"));
        }
        if self.cycles_per_bit < 1.0 || !self.cycles_per_bit.is_finite() {
            return Err(Error::InvalidConfig("cycles_per_bit must be at least 1"));
        }
        if self.task_bits < 1.0 || !self.task_bits.is_finite() {
            return Err(Error::InvalidConfig("task_bits must be at least 1"));
        }
        Ok(())
    }

    /// Input signal-to-noise ratio p_total / sigma2. Sweeping power and
    /// sweeping this ratio are the same code path.
    pub fn rho(&self) -> f64 {
        self.p_total / self.sigma2
    }

    /// Large-scale loss 1 + d_a^alpha.
    pub fn loss_a(&self) -> f64 {
        1.0 + libm::pow(self.d_a, self.alpha)
    }

    /// Large-scale loss 1 + d_b^alpha.
    pub fn loss_b(&self) -> f64 {
        1.0 + libm::pow(self.d_b, self.alpha)
    }

    /// Time to execute one full task locally: task_bits * cycles_per_bit / f_user.
    pub fn local_only_time(&self) -> f64 {
        self.task_bits * self.cycles_per_bit / self.f_user
    }
}

/// The five decision variables of one offloading round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadingPlan {
    /// Offloading (uplink) window, seconds.
    pub t1: f64,
    /// Execution window, seconds.
    pub t2: f64,
    /// Offloaded share of user A's task, in [0, 1].
    pub beta_a: f64,
    /// Offloaded share of user B's task, in [0, 1].
    pub beta_b: f64,
    /// Power-allocation coefficient: A transmits at lambda * p_total, B at
    /// (1 - lambda) * p_total. Only meaningful while t1 > 0.
    pub lambda: f64,
}

impl OffloadingPlan {
    /// Range checks that do not need a configuration. Whether the plan fits
    /// the deadline is configuration-dependent and answered by
    /// [`time_feasible`]; plans that overrun simply have zero success
    /// probability.
    pub fn validate(&self) -> Result<()> {
        if self.t1 < 0.0 || !self.t1.is_finite() {
            return Err(Error::InvalidPlan("t1 must be nonnegative"));
        }
        if self.t2 < 0.0 || !self.t2.is_finite() {
            return Err(Error::InvalidPlan("t2 must be nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.beta_a) {
            return Err(Error::InvalidPlan("beta_a must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.beta_b) {
            return Err(Error::InvalidPlan("beta_b must lie in [0, 1]"));
        }
        if self.t1 > 0.0 && !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidPlan("lambda must lie in (0, 1) while t1 > 0"));
        }
        Ok(())
    }

    /// End-to-end latency t1 + t2.
    pub fn latency(&self) -> f64 {
        self.t1 + self.t2
    }
}

/// One draw of the two small-scale fading power gains. Under Rayleigh fading
/// each gain is Exp(1)-distributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRealization {
    pub g_a: f64,
    pub g_b: f64,
}

/// SINR of user A's signal at the server, decoded first with user B as
/// interference:
/// loss_b * lambda * rho * g_a / ((1 - lambda) * loss_a * rho * g_b + loss_a * loss_b).
pub fn sinr_user_a(cfg: &NetworkConfig, plan: &OffloadingPlan, ch: &ChannelRealization) -> f64 {
    let rho = cfg.rho();
    let la = cfg.loss_a();
    let lb = cfg.loss_b();
    lb * plan.lambda * rho * ch.g_a / ((1.0 - plan.lambda) * la * rho * ch.g_b + la * lb)
}

/// SNR of user B's signal after A has been cancelled:
/// (1 - lambda) * rho * g_b / loss_b.
pub fn snr_user_b(cfg: &NetworkConfig, plan: &OffloadingPlan, ch: &ChannelRealization) -> f64 {
    (1.0 - plan.lambda) * cfg.rho() * ch.g_b / cfg.loss_b()
}

/// Bits deliverable in t1 seconds over the given bandwidth at the given
/// SINR: t1 * bandwidth * log2(1 + gamma).
pub fn achievable_bits(t1: f64, bandwidth: f64, gamma: f64) -> f64 {
    t1 * bandwidth * libm::log1p(gamma) / core::f64::consts::LN_2
}

/// Execution times implied by the plan: local times for A and B, then the
/// server time for the combined offloaded load, computed at ratio_n times
/// the user frequency.
pub fn execution_times(cfg: &NetworkConfig, plan: &OffloadingPlan) -> (f64, f64, f64) {
    let unit = cfg.task_bits * cfg.cycles_per_bit / cfg.f_user;
    let t2_a = (1.0 - plan.beta_a) * unit;
    let t2_b = (1.0 - plan.beta_b) * unit;
    let t2_mec = (plan.beta_a + plan.beta_b) * unit / cfg.ratio_n;
    (t2_a, t2_b, t2_mec)
}

/// True iff every execution branch finishes inside the execution window and
/// the two windows fit the deadline.
pub fn time_feasible(cfg: &NetworkConfig, plan: &OffloadingPlan) -> bool {
    let (t2_a, t2_b, t2_mec) = execution_times(cfg, plan);
    t2_a.max(t2_b).max(t2_mec) <= plan.t2 && plan.t1 + plan.t2 <= cfg.deadline
}

/// Smallest execution window admitting the given shares, evaluated with the
/// same arithmetic as [`execution_times`] so that [`time_feasible`] accepts
/// the window by equality. Algebraically equivalent closed forms can round
/// one ulp below the server branch and zero the plan's probability.
pub fn min_execution_window(cfg: &NetworkConfig, beta_a: f64, beta_b: f64) -> f64 {
    let probe = OffloadingPlan {
        t1: 0.0,
        t2: 0.0,
        beta_a,
        beta_b,
        lambda: 0.5,
    };
    let (t2_a, t2_b, t2_mec) = execution_times(cfg, &probe);
    t2_a.max(t2_b).max(t2_mec)
}

/// Largest t1 with t1 + t2 <= deadline under float addition. The plain
/// difference can overshoot by an ulp when the subtraction rounds upward.
pub fn remaining_uplink_window(deadline: f64, t2: f64) -> f64 {
    let mut t1 = deadline - t2;
    while t1 > 0.0 && t1 + t2 > deadline {
        t1 = t1.next_down();
    }
    t1
}
