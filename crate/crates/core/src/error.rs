//! Error type shared by every module of the library.

use core::fmt;

/// Failure modes of configuration validation and of the closed-form solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// A scenario parameter is out of range; the message names the field.
    InvalidConfig(&'static str),
    /// A decision variable is out of range; the message names the field.
    InvalidPlan(&'static str),
    /// t1 = 0 while a positive share of bits must be offloaded, so the rate
    /// thresholds are undefined.
    DegeneratePlan,
    /// No positive offloading window remains before the deadline; the
    /// analytic optimum does not exist and clamping would change the model.
    InfeasibleDeadline,
    /// Local execution alone meets the deadline, so the offloading
    /// time-allocation formulas are not applicable.
    CompleteLocalRegime,
    /// Both rate thresholds are zero (nothing is offloaded) or the cubic and
    /// its quadratic reduction degenerate together; lambda carries no
    /// information here.
    SolverDegenerate,
    /// Root filtering left no cubic candidate inside (0, 1).
    NoRootInUnitInterval,
    /// The stationarity function does not change sign on (0, 1); the
    /// coefficients are outside the model's assumptions.
    BracketFailure,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidConfig(field) => write!(f, "invalid configuration: {field}"),
            Error::InvalidPlan(field) => write!(f, "invalid plan: {field}"),
            Error::DegeneratePlan => {
                write!(f, "degenerate plan: t1 = 0 with a positive offloaded share")
            }
            Error::InfeasibleDeadline => {
                write!(
                    f,
                    "deadline too tight: no positive offloading window exists"
                )
            }
            Error::CompleteLocalRegime => write!(
                f,
                "local execution meets the deadline; offloading allocation not applicable"
            ),
            Error::SolverDegenerate => {
                write!(
                    f,
                    "stationarity solver degenerate: lambda is not identifiable"
                )
            }
            Error::NoRootInUnitInterval => {
                write!(f, "no cubic root inside the open unit interval")
            }
            Error::BracketFailure => {
                write!(f, "stationarity function has no sign change on (0, 1)")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
