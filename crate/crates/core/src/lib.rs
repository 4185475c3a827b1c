//! Successful-computation probability for a two-user uplink NOMA
//! mobile-edge-computing link: closed form, closed-form optimization, and a
//! Monte Carlo oracle.
//!
//! Two users share one uplink by superposing their signals at different
//! power levels; the server decodes user A first, cancels it, then decodes
//! user B. Each user offloads a share of an equally sized task to the edge
//! server and computes the rest locally. A round is successful when both
//! offloaded shares cross the uplink in the window t1, every execution
//! branch (two local, one remote) finishes in the window t2, and the two
//! windows fit the deadline. Under quasi-static Rayleigh fading the success
//! probability has a closed form, and so do the optimal windows, offloading
//! shares, and power split.
//!
//! Module map:
//!
//! - [`model`]: scenario parameters, SINR/SNR, achievable bits, timing.
//! - [`analytic`]: closed-form success probability and its optimum value.
//! - [`optimizer`]: closed-form allocation and the power-split cubic.
//! - [`montecarlo`]: reproducible channel simulation of the raw definition.
//! - [`schemes`]: baseline strategies for comparison experiments.
//!
//! The crate is `no_std` (with `alloc`) so the math can embed anywhere; IO,
//! configuration files, and the experiment CLI live in the companion binary
//! crate.
//!
//! ```
//! use noma_mec::{optimal_plan, estimate_ps, NetworkConfig};
//!
//! let cfg = NetworkConfig {
//!     d_a: 5.0, d_b: 25.0, alpha: 4.0,
//!     p_total: 10.0, sigma2: 1e-9, bandwidth: 1e6,
//!     f_user: 0.5e9, ratio_n: 5.0, cycles_per_bit: 1e3,
//!     task_bits: 1e4, deadline: 0.01,
//! };
//! let (plan, ps) = optimal_plan(&cfg).unwrap();
//! let sim = estimate_ps(&cfg, &plan, 100_000, 7).unwrap();
//! assert!((sim.p_hat - ps).abs() <= 4.0 * sim.stderr.max(1e-4));
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod optimizer;
pub mod schemes;

pub use analytic::{closed_form_ps, ps_at_optimum, thresholds, RateThresholds};
pub use error::{Error, Result};
pub use model::{
    achievable_bits, execution_times, min_execution_window, remaining_uplink_window, sinr_user_a,
    snr_user_b, time_feasible, ChannelRealization, NetworkConfig, OffloadingPlan,
};
pub use montecarlo::{estimate_event, estimate_ps, sample_channel, success_count, PsEstimate};
pub use optimizer::{
    balanced_windows, bisection_lambda, optimal_plan, solve_lambda, stationarity_scale,
    stationarity_xi, theorem1_allocation, theorem2_lambda, CaseTag, CubicCoefficients,
    LambdaSolution,
};
pub use schemes::{
    oma_ps_analytic, oma_success, plan_ps, scheme_plan, scheme_ps, EvalMethod, LambdaPolicy,
    SchemeKind, SchemeResult, SchemeSpec,
};
