//! Closed-form optimization of the five decision variables.
//!
//! The time/share allocation separates cleanly: success probability rises
//! with the uplink window and falls with the offloaded shares, so the best
//! plan spends the whole deadline, balances every execution branch, and
//! leaves a single scalar, the power split lambda, to optimize. Its
//! stationary point is the in-(0,1) root of a cubic whose coefficients come
//! from the three reduced constants
//!
//! ```text
//! a1 = g1 * La / Lb,  a2 = Lb * g2 / rho,  a3 = g1 * La * (1 + g2) / rho
//! ```
//!
//! The cubic is solved in Nickalls form (shift to the inflection point, then
//! discriminate on y_n^2 versus g^2), the in-interval candidate is polished
//! by a bracket-guarded Newton iteration on the stationarity function, and a
//! plain bisection doubles as fallback and as an independently coded oracle.

use crate::analytic::{ps_at_optimum, thresholds, RateThresholds};
use crate::error::{Error, Result};
use crate::model::{min_execution_window, remaining_uplink_window, NetworkConfig, OffloadingPlan};
use alloc::vec;
use alloc::vec::Vec;

/// Target relative residual of the stationarity function at the returned root.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Interval width at which bisection stops.
pub const BISECTION_WIDTH: f64 = 1e-12;
/// Open-interval clip: lambda is searched inside [EDGE, 1 - EDGE].
const EDGE: f64 = 1e-12;
/// Relative threshold under which the cubic (or quadratic) leading
/// coefficient counts as degenerate.
const DEGENERACY_EPS: f64 = 1e-12;
/// Relative tolerance for the y_n^2 = g^2 case split; exact float equality
/// never happens there.
const CASE_EPS: f64 = 1e-10;

/// Which branch of the root formula produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    OneRealRoot,
    DoubleRoot,
    ThreeRealRoots,
    QuadraticDegenerate,
    BisectionFallback,
}

/// Reduced constants of the lambda problem and the derived quantities of the
/// shifted cubic m1*l^3 + m2*l^2 + m3*l + a1*a3 = 0.
///
/// `delta` carries the sign rule sign(delta) = sign(y_n / (2 m1)) and is
/// stored as 0 when the squared offset is negative (single-root case, where
/// it never enters the formulas); `phi` is only meaningful in the
/// three-root case and is clamped into arccos range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub x_n: f64,
    pub y_n: f64,
    pub g: f64,
    pub delta: f64,
    pub phi: f64,
}

impl CubicCoefficients {
    /// Builds the cubic for given reduced constants.
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        let m1 = a1 + a3 - a2 + a1 * a2 - a1 * a3;
        let m2 = 3.0 * a1 * a3 - 2.0 * a1 - a1 * a2 - 2.0 * a3;
        let m3 = a1 - 3.0 * a1 * a3 + a3;
        let (x_n, y_n, g, delta, phi) = if m1 != 0.0 {
            let x_n = -m2 / (3.0 * m1);
            let delta2 = (m2 * m2 - 3.0 * m1 * m3) / (9.0 * m1 * m1);
            let y_n = ((m1 * x_n + m2) * x_n + m3) * x_n + a1 * a3;
            let delta = if delta2 >= 0.0 {
                libm::copysign(libm::sqrt(delta2), y_n / (2.0 * m1))
            } else {
                0.0
            };
            let g = 2.0 * m1 * delta * delta * delta;
            let phi = if g != 0.0 {
                libm::acos((-y_n / g).clamp(-1.0, 1.0)) / 3.0
            } else {
                0.0
            };
            (x_n, y_n, g, delta, phi)
        } else {
            (0.0, a1 * a3, 0.0, 0.0, 0.0)
        };
        CubicCoefficients {
            a1,
            a2,
            a3,
            m1,
            m2,
            m3,
            x_n,
            y_n,
            g,
            delta,
            phi,
        }
    }

    /// Reduced constants from a scenario and its rate thresholds. At least
    /// one threshold must be positive, otherwise nothing is offloaded and
    /// lambda carries no information.
    pub fn from_config(cfg: &NetworkConfig, thr: &RateThresholds) -> Result<Self> {
        if !(thr.gamma1 > 0.0 || thr.gamma2 > 0.0) {
            return Err(Error::SolverDegenerate);
        }
        let la = cfg.loss_a();
        let lb = cfg.loss_b();
        let rho = cfg.rho();
        Ok(Self::new(
            thr.gamma1 * la / lb,
            lb * thr.gamma2 / rho,
            thr.gamma1 * la * (1.0 + thr.gamma2) / rho,
        ))
    }

    /// Value of the shifted cubic m1 x^3 + m2 x^2 + m3 x + a1 a3.
    pub fn cubic_at(&self, x: f64) -> f64 {
        ((self.m1 * x + self.m2) * x + self.m3) * x + self.a1 * self.a3
    }
}

/// A solved power split with provenance and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSolution {
    pub lambda_star: f64,
    pub case_tag: CaseTag,
    /// Absolute value of the stationarity function at `lambda_star`.
    pub residual: f64,
    /// Every real root the formula produced inside (0, 1), pre-polish.
    pub candidates: Vec<f64>,
}

/// Best time and share allocation when offloading is required:
/// t2 = 2*M*C / (f_user * (N + 2)), t1 = deadline - t2, and both users
/// offload the share N / (N + 2), which balances all three execution
/// branches. Independent of distances, powers, and lambda.
pub fn theorem1_allocation(cfg: &NetworkConfig) -> Result<(f64, f64, f64)> {
    let local = cfg.local_only_time();
    if local <= cfg.deadline {
        return Err(Error::CompleteLocalRegime);
    }
    let t2 = 2.0 * local / (cfg.ratio_n + 2.0);
    let t1 = cfg.deadline - t2;
    if t1 <= 0.0 {
        return Err(Error::InfeasibleDeadline);
    }
    Ok((t1, t2, cfg.ratio_n / (cfg.ratio_n + 2.0)))
}

/// The balanced allocation with the windows rebuilt through the
/// execution-time arithmetic, so the resulting plan passes the exact
/// feasibility comparisons that [`theorem1_allocation`]'s closed forms can
/// miss by one rounding step.
pub fn balanced_windows(cfg: &NetworkConfig) -> Result<(f64, f64, f64)> {
    let (_, _, beta) = theorem1_allocation(cfg)?;
    let t2 = min_execution_window(cfg, beta, beta);
    let t1 = remaining_uplink_window(cfg.deadline, t2);
    if t1 <= 0.0 {
        return Err(Error::InfeasibleDeadline);
    }
    Ok((t1, t2, beta))
}

/// Sign carrier of the success probability's lambda derivative:
/// Xi(l) = a1 / ((1 - a1) l + a1) + a3 / l - a2 l / (1 - l)^2.
/// Diverges to +inf at 0 and to -inf at 1, crossing zero at the optimum.
pub fn stationarity_xi(c: &CubicCoefficients, lambda: f64) -> f64 {
    c.a1 / ((1.0 - c.a1) * lambda + c.a1) + c.a3 / lambda
        - c.a2 * lambda / ((1.0 - lambda) * (1.0 - lambda))
}

/// Sum of the magnitudes of Xi's three terms; |Xi| relative to this scale is
/// the residual measure used by tolerances here.
pub fn stationarity_scale(c: &CubicCoefficients, lambda: f64) -> f64 {
    (c.a1 / ((1.0 - c.a1) * lambda + c.a1)).abs()
        + (c.a3 / lambda).abs()
        + (c.a2 * lambda / ((1.0 - lambda) * (1.0 - lambda))).abs()
}

fn xi_derivative(c: &CubicCoefficients, lambda: f64) -> f64 {
    let d = (1.0 - c.a1) * lambda + c.a1;
    let om = 1.0 - lambda;
    -c.a1 * (1.0 - c.a1) / (d * d)
        - c.a3 / (lambda * lambda)
        - c.a2 * (1.0 + lambda) / (om * om * om)
}

/// Success probability as a function of lambda alone, in reduced constants:
/// l / (l + a1 (1 - l)) * exp(-a2 / (1 - l) - a3 / l). Used to rank root
/// candidates; callers pass lambda inside (0, 1).
pub fn ps_of_lambda(c: &CubicCoefficients, lambda: f64) -> f64 {
    lambda / (lambda + c.a1 * (1.0 - lambda)) * libm::exp(-c.a2 / (1.0 - lambda) - c.a3 / lambda)
}

/// Real roots of the shifted cubic that fall inside (0, 1), with the branch
/// taken. Degenerate leading coefficients reduce to the quadratic
/// m2*l^2 + m3*l + a1*a3 = 0; if that degenerates too the caller must
/// bisect.
pub fn cubic_candidates(c: &CubicCoefficients) -> Result<(Vec<f64>, CaseTag)> {
    let c0 = c.a1 * c.a3;
    let scale = c.m2.abs().max(c.m3.abs()).max(c0.abs());
    let (roots, tag): (Vec<f64>, CaseTag) = if c.m1.abs() <= DEGENERACY_EPS * scale {
        if c.m2.abs() <= DEGENERACY_EPS * c.m3.abs().max(c0.abs()) {
            return Err(Error::SolverDegenerate);
        }
        let disc = c.m3 * c.m3 - 4.0 * c.m2 * c0;
        if disc < 0.0 {
            return Err(Error::NoRootInUnitInterval);
        }
        // q-form keeps the subtractive root accurate.
        let q = -0.5 * (c.m3 + libm::copysign(libm::sqrt(disc), c.m3));
        let mut r = vec![q / c.m2];
        if q != 0.0 {
            r.push(c0 / q);
        }
        (r, CaseTag::QuadraticDegenerate)
    } else {
        let delta2 = (c.m2 * c.m2 - 3.0 * c.m1 * c.m3) / (9.0 * c.m1 * c.m1);
        let g2 = 4.0 * c.m1 * c.m1 * delta2 * delta2 * delta2;
        let y2 = c.y_n * c.y_n;
        if (y2 - g2).abs() <= CASE_EPS * y2.max(g2.abs()) {
            (
                vec![c.x_n + c.delta, c.x_n - 2.0 * c.delta],
                CaseTag::DoubleRoot,
            )
        } else if y2 > g2 {
            // One real root; pair the cube-root term with delta2/u to avoid
            // cancellation between two large cube roots.
            let u =
                libm::cbrt((-c.y_n - libm::copysign(libm::sqrt(y2 - g2), c.y_n)) / (2.0 * c.m1));
            let root = if u != 0.0 {
                c.x_n + u + delta2 / u
            } else {
                c.x_n
            };
            (vec![root], CaseTag::OneRealRoot)
        } else {
            let third = 2.0 * core::f64::consts::PI / 3.0;
            (
                vec![
                    c.x_n + 2.0 * c.delta * libm::cos(c.phi),
                    c.x_n + 2.0 * c.delta * libm::cos(c.phi - third),
                    c.x_n + 2.0 * c.delta * libm::cos(c.phi - 2.0 * third),
                ],
                CaseTag::ThreeRealRoots,
            )
        }
    };
    let inside: Vec<f64> = roots.into_iter().filter(|r| *r > 0.0 && *r < 1.0).collect();
    if inside.is_empty() {
        return Err(Error::NoRootInUnitInterval);
    }
    Ok((inside, tag))
}

/// Newton iteration on Xi confined to a sign-change bracket. Xi crosses zero
/// from + to - exactly once, so the bracket can only shrink onto the root;
/// steps that leave it fall back to the midpoint.
fn guarded_polish(c: &CubicCoefficients, start: f64) -> f64 {
    let f0 = stationarity_xi(c, start);
    let (mut lo, mut hi) = if f0 > 0.0 {
        (start, 1.0 - EDGE)
    } else if f0 < 0.0 {
        (EDGE, start)
    } else {
        return start;
    };
    let mut x = start;
    for _ in 0..200 {
        let fx = stationarity_xi(c, x);
        if fx > 0.0 {
            lo = x;
        } else if fx < 0.0 {
            hi = x;
        } else {
            return x;
        }
        if fx.abs() <= 1e-13 * stationarity_scale(c, x) {
            return x;
        }
        let mut next = x - fx / xi_derivative(c, x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x {
            next = 0.5 * (lo + hi);
            if next == x {
                return x;
            }
        }
        x = next;
    }
    x
}

/// Solves the stationarity cubic for the given reduced constants: closed-form
/// roots, (0,1) filtering, probability-ranked selection when floats leave
/// more than one candidate, then the guarded polish. Falls back to bisection
/// when the formula yields nothing usable.
pub fn solve_lambda(c: &CubicCoefficients) -> Result<LambdaSolution> {
    let (candidates, tag) = match cubic_candidates(c) {
        Ok(pair) => pair,
        Err(Error::SolverDegenerate) | Err(Error::NoRootInUnitInterval) => {
            let mut sol = bisection_lambda(c, BISECTION_WIDTH)?;
            sol.lambda_star = guarded_polish(c, sol.lambda_star);
            sol.residual = stationarity_xi(c, sol.lambda_star).abs();
            return Ok(sol);
        }
        Err(e) => return Err(e),
    };
    let mut best = candidates[0];
    if candidates.len() > 1 {
        for &cand in &candidates[1..] {
            if ps_of_lambda(c, cand) > ps_of_lambda(c, best) {
                best = cand;
            }
        }
    }
    let lambda_star = guarded_polish(c, best);
    Ok(LambdaSolution {
        lambda_star,
        case_tag: tag,
        residual: stationarity_xi(c, lambda_star).abs(),
        candidates,
    })
}

/// Optimal power split for a scenario whose thresholds are already known.
pub fn theorem2_lambda(cfg: &NetworkConfig, thr: &RateThresholds) -> Result<LambdaSolution> {
    solve_lambda(&CubicCoefficients::from_config(cfg, thr)?)
}

/// Plain bisection of Xi on the clipped unit interval, down to a bracket of
/// width `tol`. Serves both as fallback and as an oracle coded independently
/// of the root formulas.
pub fn bisection_lambda(c: &CubicCoefficients, tol: f64) -> Result<LambdaSolution> {
    let mut lo = EDGE;
    let mut hi = 1.0 - EDGE;
    if !(stationarity_xi(c, lo) > 0.0 && stationarity_xi(c, hi) < 0.0) {
        return Err(Error::BracketFailure);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = stationarity_xi(c, mid);
        if v > 0.0 {
            lo = mid;
        } else if v < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
    }
    let lambda_star = 0.5 * (lo + hi);
    Ok(LambdaSolution {
        lambda_star,
        case_tag: CaseTag::BisectionFallback,
        residual: stationarity_xi(c, lambda_star).abs(),
        candidates: vec![lambda_star],
    })
}

/// The full optimum: the local-only plan with certainty when it fits the
/// deadline, otherwise the balanced allocation with the cubic's power split.
/// The lambda value 0.5 on the local branch is a convention; it is unused
/// there and fixed only so serialized output is deterministic.
pub fn optimal_plan(cfg: &NetworkConfig) -> Result<(OffloadingPlan, f64)> {
    cfg.validate()?;
    let local = cfg.local_only_time();
    if local <= cfg.deadline {
        let plan = OffloadingPlan {
            t1: 0.0,
            t2: local,
            beta_a: 0.0,
            beta_b: 0.0,
            lambda: 0.5,
        };
        return Ok((plan, 1.0));
    }
    let (t1, t2, beta) = balanced_windows(cfg)?;
    let mut plan = OffloadingPlan {
        t1,
        t2,
        beta_a: beta,
        beta_b: beta,
        lambda: 0.5,
    };
    let thr = thresholds(cfg, &plan)?;
    let sol = theorem2_lambda(cfg, &thr)?;
    plan.lambda = sol.lambda_star;
    let ps = ps_at_optimum(cfg, sol.lambda_star)?;
    Ok((plan, ps))
}
