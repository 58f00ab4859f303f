//! Admissible-control bounds, the feasible input interval, the parameter
//! rules that keep it nonempty, and the control laws built on it.
//!
//! Writing `rel = x2 - l_dot(t)` and `d = max(|rel|, SINGULARITY_EPS)`, the
//! two barrier decay conditions rearrange into one interval per state:
//!
//! ```text
//! phi_ub = (a_max/d)·alpha·(-rcbf_ub) - sgn(rel)·a_max - w_max + l_ddot
//! phi_lb = -(a_max/d)·alpha·(-rcbf_lb) - sgn(rel)·a_max + w_max + l_ddot
//! ```
//!
//! Any control in `[phi_lb, phi_ub] ∩ [u_lb, u_ub]` keeps the restricted safe
//! set forward invariant under the worst-case disturbance. The gap
//! `phi_ub - phi_lb` equals `a_max·alpha·(l_ub0 - l_lb0)/d - 2·w_max`, and
//! membership caps `d` at the velocity bound, so with `alpha >= alpha_min`
//! from [`alpha_min`] the intersection is guaranteed nonempty at every state
//! of the set.
//!
//! Emptiness is reported, never repaired: no slack relaxation is applied
//! anywhere in this module.

use crate::barrier::{eval_rcbf, RcbfValues};
use crate::{
    sgn, ActuationLimits, BoxProfile, Error, RcbfParams, Result, State2, ALPHA_AUTO_FACTOR,
    SINGULARITY_EPS,
};

/// Admissible-control interval at one state.
///
/// `lo`/`hi` are the barrier bounds clipped to the input interval;
/// `empty` is `lo > hi`, exactly. Inside the restricted safe set with
/// `alpha >= alpha_min`, `empty` is guaranteed false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    pub phi_lb: f64,
    pub phi_ub: f64,
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl FeasibleInterval {
    /// Width of the clipped interval; negative when empty.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Left-hand sides of the two barrier decay conditions at a given control,
/// with the disturbance already taken at its worst case. Both are `<= 0`
/// exactly when `phi_lb <= u <= phi_ub`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackValues {
    pub g_ub: f64,
    pub g_lb: f64,
}

/// Guaranteed deceleration margin from the actuation budget:
/// `-max(u_lb + w_max + l_ddot_max, -u_ub + w_max + l_ddot_max)`.
///
/// Fails with [`Error::NonPositiveMargin`] when the budget cannot out-brake
/// the worst-case disturbance plus bound acceleration; every feasibility
/// guarantee in this crate is void in that case.
pub fn derive_a_max(lim: &ActuationLimits, l_ddot_max: f64) -> Result<f64> {
    let margin = -f64::max(
        lim.u_lb + lim.w_max + l_ddot_max,
        -lim.u_ub + lim.w_max + l_ddot_max,
    );
    if margin > 0.0 {
        Ok(margin)
    } else {
        Err(Error::NonPositiveMargin { margin })
    }
}

/// Minimum linear gain for which the feasible interval stays nonempty at
/// every state of the restricted safe set:
/// `2·w_max·sqrt(2/((l_ub0 - l_lb0)·a_max))`.
pub fn alpha_min(bx: &BoxProfile, lim: &ActuationLimits, a_max: f64) -> Result<f64> {
    if !a_max.is_finite() || a_max <= 0.0 {
        return Err(Error::InvalidParams {
            a_max,
            alpha: f64::NAN,
        });
    }
    let width = bx.width();
    if width <= 0.0 {
        return Err(Error::DegenerateBox);
    }
    Ok(2.0 * lim.w_max * (2.0 / (width * a_max)).sqrt())
}

/// Derive barrier parameters from the actuation budget: `a_max` from
/// [`derive_a_max`] and `alpha` a hair above [`alpha_min`] (or 1.0 when the
/// minimum is zero, i.e. no disturbance — any positive gain works then).
pub fn derive_params(bx: &BoxProfile, lim: &ActuationLimits) -> Result<RcbfParams> {
    let a_max = derive_a_max(lim, bx.l_ddot_max())?;
    let base = alpha_min(bx, lim, a_max)?;
    let alpha = if base > 0.0 {
        base * ALPHA_AUTO_FACTOR
    } else {
        1.0
    };
    RcbfParams::new(a_max, alpha)
}

/// Admissible-control interval at a state.
///
/// The relative speed in the denominators is floored at
/// [`SINGULARITY_EPS`](crate::SINGULARITY_EPS); flooring only shrinks the
/// interval, so an infeasible state is never reported feasible.
pub fn phi_bounds(
    s: &State2,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> FeasibleInterval {
    let v = eval_rcbf(s, bx, p);
    phi_bounds_from_values(&v, bx.accel(s.t), lim, p)
}

fn phi_bounds_from_values(
    v: &RcbfValues,
    l_ddot: f64,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> FeasibleInterval {
    let rel = v.h_dot_ub;
    let d = rel.abs().max(SINGULARITY_EPS);
    let gain = p.a_max / d * p.alpha;
    let brake = sgn(rel) * p.a_max;
    let phi_ub = gain * (-v.rcbf_ub) - brake - lim.w_max + l_ddot;
    let phi_lb = -gain * (-v.rcbf_lb) - brake + lim.w_max + l_ddot;
    let lo = phi_lb.max(lim.u_lb);
    let hi = phi_ub.min(lim.u_ub);
    FeasibleInterval {
        phi_lb,
        phi_ub,
        lo,
        hi,
        empty: lo > hi,
    }
}

/// Rates of the two robust barriers for a given control and disturbance:
///
/// ```text
/// rcbf_rate_ub =  rel + |rel|·(u + w - l_ddot)/a_max
/// rcbf_rate_lb = -rel + |rel|·(l_ddot - u - w)/a_max
/// ```
pub fn rcbf_rates(s: &State2, bx: &BoxProfile, p: &RcbfParams, u: f64, w: f64) -> (f64, f64) {
    let rel = s.x2 - bx.rate(s.t);
    let l_ddot = bx.accel(s.t);
    let up = rel + rel.abs() * (u + w - l_ddot) / p.a_max;
    let lo = -rel + rel.abs() * (l_ddot - u - w) / p.a_max;
    (up, lo)
}

/// Worst-case barrier rates over `|w| <= w_max`. Each rate is affine and
/// nondecreasing in its aligned disturbance direction, so the maxima sit at
/// `w = +w_max` for the upper barrier and `w = -w_max` for the lower one.
pub fn rcbf_rates_worst_case(
    s: &State2,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
    u: f64,
) -> (f64, f64) {
    let rel = s.x2 - bx.rate(s.t);
    let l_ddot = bx.accel(s.t);
    let spread = rel.abs() * lim.w_max / p.a_max;
    let up = rel + rel.abs() * (u - l_ddot) / p.a_max + spread;
    let lo = -rel + rel.abs() * (l_ddot - u) / p.a_max + spread;
    (up, lo)
}

/// Decay-condition slacks at a given control: worst-case barrier rate minus
/// the allowed decay `alpha·(-rcbf)`. Signs match `u - phi_ub` and
/// `phi_lb - u` respectively (away from the `x2 = l_dot` locus).
pub fn slack(
    s: &State2,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
    u: f64,
) -> SlackValues {
    let v = eval_rcbf(s, bx, p);
    let (rate_ub, rate_lb) = rcbf_rates_worst_case(s, bx, lim, p, u);
    SlackValues {
        g_ub: rate_ub - p.alpha * (-v.rcbf_ub),
        g_lb: rate_lb - p.alpha * (-v.rcbf_lb),
    }
}

/// Midpoint of the admissible interval, clamped to the input bounds.
///
/// Computed in the algebraically equivalent centered form
///
/// ```text
/// u = -sgn(rel)·a_max
///     + (a_max·alpha/d)·((l_ub + l_lb)/2 - x1 - |rel|·rel/(2·a_max))
///     + l_ddot
/// ```
///
/// which stays well conditioned near `rel = 0` where the raw average of the
/// two phi bounds cancels catastrophically. Clamping keeps the result inside
/// the (nonempty) clipped interval.
pub fn control_midpoint(
    s: &State2,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> Result<f64> {
    let fi = phi_bounds(s, bx, lim, p);
    if fi.empty {
        return Err(Error::InfeasibleState {
            t: s.t,
            x1: s.x1,
            x2: s.x2,
        });
    }
    Ok(midpoint_raw(s, bx, p).clamp(lim.u_lb, lim.u_ub))
}

/// Unclamped centered midpoint law; shared with the simulator's fallback
/// path for deliberately infeasible runs.
pub(crate) fn midpoint_raw(s: &State2, bx: &BoxProfile, p: &RcbfParams) -> f64 {
    let rel = s.x2 - bx.rate(s.t);
    let d = rel.abs().max(SINGULARITY_EPS);
    let center = 0.5 * (bx.upper(s.t) + bx.lower(s.t));
    let braking = rel.abs() * rel / (2.0 * p.a_max);
    -sgn(rel) * p.a_max + p.a_max * p.alpha / d * (center - s.x1 - braking) + bx.accel(s.t)
}

/// Projection of a nominal control onto the admissible interval: the
/// minimizer of `|u - u_nom|` over the clipped interval.
pub fn control_min_deviation(
    s: &State2,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
    u_nom: f64,
) -> Result<f64> {
    let fi = phi_bounds(s, bx, lim, p);
    if fi.empty {
        return Err(Error::InfeasibleState {
            t: s.t,
            x1: s.x1,
            x2: s.x2,
        });
    }
    Ok(u_nom.clamp(fi.lo, fi.hi))
}
