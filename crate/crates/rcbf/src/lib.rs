//! Robust safety filters for a second-order system that must stay inside a
//! time-varying bounding box despite input saturation and bounded input
//! disturbances.
//!
//! The system is the double integrator `x1' = x2`, `x2' = u + w` with
//! `u ∈ [u_lb, u_ub]` and `|w| ≤ w_max`. Both box bounds move with a common
//! rate, so the box keeps its width. For each bound a robust barrier function
//! augments the plain distance-to-bound constraint with a braking term sized
//! by the guaranteed deceleration margin `a_max`; restricting the control to
//! the interval `[phi_lb, phi_ub]` derived from the two barrier conditions
//! keeps the restricted safe set forward invariant. The crate also provides
//! the parameter rules (`a_max` from the actuation budget, the minimum
//! feasible gain `alpha_min`) under which that interval is guaranteed to stay
//! nonempty inside the input bounds.
//!
//! Modules:
//! - [`barrier`]: constraint and barrier evaluation, restricted-set membership,
//!   the velocity bound implied by membership.
//! - [`filter`]: admissible-control bounds, feasibility interval, parameter
//!   rules, and the midpoint / minimum-deviation control laws.
//! - [`plant`]: input-affine pre-transform and the vertical-axis thrust model.
//! - [`sim`]: fixed-step closed-loop simulation with safety accounting.
//! - [`sweep`]: state-space grids of membership and feasibility (parallel when
//!   the `parallel` feature is enabled, which is the default).

pub mod barrier;
pub mod filter;
pub mod plant;
pub mod sim;
pub mod sweep;
mod types;

pub use types::{ActuationLimits, BoxProfile, RcbfParams, State2};

/// Absolute tolerance for boundary comparisons, in SI units.
///
/// Every `<=`-style test against a set boundary or interval endpoint in this
/// crate uses this single constant.
pub const COMPARISON_TOL: f64 = 1e-9;

/// Regularization floor for the relative speed `|x2 - l_dot|` (m/s) in the
/// admissible-control bounds, which divide by it. Flooring shrinks the
/// reported interval, so feasibility is never overstated.
pub const SINGULARITY_EPS: f64 = 1e-9;

/// Set-membership tolerance used inside the simulator (m), absorbing
/// floating-point drift at the set boundary. Analysis code uses 0.
pub const SIM_MEMBERSHIP_TOL: f64 = 1e-9;

/// Default bound-violation tolerance for closed-loop runs (m). The invariance
/// guarantee is continuous-time; a fixed-step run is accepted when the bounds
/// hold up to this tolerance.
pub const DEFAULT_VIOLATION_TOL: f64 = 1e-3;

/// Factor applied above the minimum feasible gain when parameters are derived
/// automatically.
pub const ALPHA_AUTO_FACTOR: f64 = 1.001;

/// Errors reported by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid box: l_ub0 ({l_ub0}) must be >= l_lb0 ({l_lb0}) and all fields finite")]
    InvalidBox { l_lb0: f64, l_ub0: f64 },
    #[error(
        "invalid actuation limits: require u_lb < u_ub and w_max >= 0 \
         (u_lb={u_lb}, u_ub={u_ub}, w_max={w_max})"
    )]
    InvalidLimits { u_lb: f64, u_ub: f64, w_max: f64 },
    #[error("invalid barrier parameters: require a_max > 0 and alpha > 0 (a_max={a_max}, alpha={alpha})")]
    InvalidParams { a_max: f64, alpha: f64 },
    #[error("state has non-finite components (x1={x1}, x2={x2}, t={t})")]
    NonFiniteState { x1: f64, x2: f64, t: f64 },
    /// The actuation budget cannot guarantee any deceleration against the
    /// worst-case disturbance and bound acceleration; all feasibility
    /// guarantees are void.
    #[error("insufficient control authority: deceleration margin {margin} <= 0")]
    NonPositiveMargin { margin: f64 },
    /// The box has zero width, so the minimum-gain rule does not apply.
    #[error("degenerate box: bounds coincide, minimum feasible gain is undefined")]
    DegenerateBox,
    /// The admissible-control interval is empty at the queried state.
    #[error("no admissible control at t={t}, x1={x1}, x2={x2}: feasible interval is empty")]
    InfeasibleState { t: f64, x1: f64, x2: f64 },
    #[error("input gain is singular at the queried state (|g| = {gain_abs:e})")]
    SingularGain { gain_abs: f64 },
    #[error("inconsistent scenario: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Sign function with `sgn(0) = 0`, matching the `|y|·y` barrier terms which
/// vanish at zero relative speed.
pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}
