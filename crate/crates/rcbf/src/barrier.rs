//! Constraint and robust-barrier evaluation for the moving box.
//!
//! The two bound constraints are `h_ub = x1 - l_ub(t) <= 0` and
//! `h_lb = -x1 + l_lb(t) <= 0`, with rates `h_dot_ub = x2 - l_dot` and
//! `h_dot_lb = -(x2 - l_dot)`. Each robust barrier adds the signed braking
//! distance at the guaranteed deceleration margin:
//!
//! ```text
//! rcbf_ub = h_ub + |x2 - l_dot|·(x2 - l_dot) / (2·a_max)
//! rcbf_lb = h_lb - |x2 - l_dot|·(x2 - l_dot) / (2·a_max)
//! ```
//!
//! The quadratic terms cancel in the sum, so `rcbf_ub + rcbf_lb = h_ub + h_lb
//! = l_lb - l_ub` identically. The restricted safe set is the intersection of
//! the four sublevel conditions; membership bounds the relative speed by
//! `sqrt(2·a_max·(l_ub0 - l_lb0))` (see [`velocity_bound`]).

use crate::{BoxProfile, RcbfParams, State2};

/// All constraint, rate, and barrier values at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcbfValues {
    /// Upper-bound constraint `x1 - l_ub(t)` (m).
    pub h_ub: f64,
    /// Lower-bound constraint `-x1 + l_lb(t)` (m).
    pub h_lb: f64,
    /// Rate of `h_ub` (m/s).
    pub h_dot_ub: f64,
    /// Rate of `h_lb` (m/s).
    pub h_dot_lb: f64,
    /// Robust barrier for the upper bound (m).
    pub rcbf_ub: f64,
    /// Robust barrier for the lower bound (m).
    pub rcbf_lb: f64,
}

/// Evaluate the two bound constraints `(h_ub, h_lb)`.
pub fn eval_h(s: &State2, bx: &BoxProfile) -> (f64, f64) {
    (s.x1 - bx.upper(s.t), -s.x1 + bx.lower(s.t))
}

/// Evaluate the constraint rates `(h_dot_ub, h_dot_lb)`.
pub fn eval_h_dot(s: &State2, bx: &BoxProfile) -> (f64, f64) {
    let rel = s.x2 - bx.rate(s.t);
    (rel, -rel)
}

/// Evaluate constraints, rates, and robust barriers at one state.
pub fn eval_rcbf(s: &State2, bx: &BoxProfile, p: &RcbfParams) -> RcbfValues {
    let (h_ub, h_lb) = eval_h(s, bx);
    let (h_dot_ub, h_dot_lb) = eval_h_dot(s, bx);
    let braking = h_dot_ub.abs() * h_dot_ub / (2.0 * p.a_max);
    RcbfValues {
        h_ub,
        h_lb,
        h_dot_ub,
        h_dot_lb,
        rcbf_ub: h_ub + braking,
        rcbf_lb: h_lb - braking,
    }
}

/// Membership in the restricted safe set: all four of `rcbf_ub`, `rcbf_lb`,
/// `h_ub`, `h_lb` at most `tol`.
pub fn in_restricted_set(s: &State2, bx: &BoxProfile, p: &RcbfParams, tol: f64) -> bool {
    let v = eval_rcbf(s, bx, p);
    v.rcbf_ub <= tol && v.rcbf_lb <= tol && v.h_ub <= tol && v.h_lb <= tol
}

/// Largest relative speed `|x2 - l_dot|` compatible with membership in the
/// restricted safe set: `sqrt(2·a_max·(l_ub0 - l_lb0))`.
pub fn velocity_bound(bx: &BoxProfile, p: &RcbfParams) -> f64 {
    (2.0 * p.a_max * bx.width()).sqrt()
}
