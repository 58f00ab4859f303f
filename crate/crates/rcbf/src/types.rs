//! Domain types shared by all modules.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Time-varying box `[l_lb(t), l_ub(t)]` whose bounds move together: a single
/// displacement profile is applied to both initial bounds, so the width
/// `l_ub(t) - l_lb(t)` is constant by construction.
///
/// The default constructor [`BoxProfile::affine`] covers the constant-rate
/// case `l(t) = l0 + rate·(t - t0)`. A general profile supplies the
/// displacement together with its first two derivatives and a declared bound
/// on the second one; consistency of the three callables is the caller's
/// responsibility (and is checked by sampling in the test suite).
#[derive(Clone)]
pub struct BoxProfile {
    l_lb0: f64,
    l_ub0: f64,
    t0: f64,
    l_ddot_max: f64,
    shift: TimeFn,
    rate: TimeFn,
    accel: TimeFn,
}

impl BoxProfile {
    /// Box moving at a constant rate, with zero bound acceleration.
    pub fn affine(l_lb0: f64, l_ub0: f64, rate: f64, t0: f64) -> Result<Self> {
        if !rate.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidBox { l_lb0, l_ub0 });
        }
        Self::with_profile(
            l_lb0,
            l_ub0,
            t0,
            move |t| rate * (t - t0),
            move |_| rate,
            |_| 0.0,
            0.0,
        )
    }

    /// General profile: `shift(t)` is the common displacement of both bounds
    /// since `t0` (so `shift(t0) = 0`), `rate` and `accel` are its first and
    /// second time derivatives, and `l_ddot_max` bounds `|accel|`.
    pub fn with_profile(
        l_lb0: f64,
        l_ub0: f64,
        t0: f64,
        shift: impl Fn(f64) -> f64 + Send + Sync + 'static,
        rate: impl Fn(f64) -> f64 + Send + Sync + 'static,
        accel: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l_ddot_max: f64,
    ) -> Result<Self> {
        if !(l_lb0.is_finite() && l_ub0.is_finite() && t0.is_finite())
            || l_ub0 < l_lb0
            || !(l_ddot_max >= 0.0 && l_ddot_max.is_finite())
        {
            return Err(Error::InvalidBox { l_lb0, l_ub0 });
        }
        Ok(Self {
            l_lb0,
            l_ub0,
            t0,
            l_ddot_max,
            shift: Arc::new(shift),
            rate: Arc::new(rate),
            accel: Arc::new(accel),
        })
    }

    /// Lower bound `l_lb(t)`.
    pub fn lower(&self, t: f64) -> f64 {
        self.l_lb0 + (self.shift)(t)
    }

    /// Upper bound `l_ub(t)`.
    pub fn upper(&self, t: f64) -> f64 {
        self.l_ub0 + (self.shift)(t)
    }

    /// Common bound rate `l_dot(t)`.
    pub fn rate(&self, t: f64) -> f64 {
        (self.rate)(t)
    }

    /// Common bound acceleration `l_ddot(t)`.
    pub fn accel(&self, t: f64) -> f64 {
        (self.accel)(t)
    }

    /// Declared bound on `|l_ddot(t)|`.
    pub fn l_ddot_max(&self) -> f64 {
        self.l_ddot_max
    }

    /// Constant box width `l_ub0 - l_lb0`.
    pub fn width(&self) -> f64 {
        self.l_ub0 - self.l_lb0
    }

    pub fn l_lb0(&self) -> f64 {
        self.l_lb0
    }

    pub fn l_ub0(&self) -> f64 {
        self.l_ub0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }
}

impl fmt::Debug for BoxProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoxProfile")
            .field("l_lb0", &self.l_lb0)
            .field("l_ub0", &self.l_ub0)
            .field("t0", &self.t0)
            .field("l_ddot_max", &self.l_ddot_max)
            .finish_non_exhaustive()
    }
}

/// Control interval `[u_lb, u_ub]` and disturbance magnitude `w_max`, all in
/// acceleration units (m/s²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuationLimits {
    pub u_lb: f64,
    pub u_ub: f64,
    pub w_max: f64,
}

impl ActuationLimits {
    pub fn new(u_lb: f64, u_ub: f64, w_max: f64) -> Result<Self> {
        if !(u_lb.is_finite() && u_ub.is_finite() && w_max.is_finite())
            || u_lb >= u_ub
            || w_max < 0.0
        {
            return Err(Error::InvalidLimits { u_lb, u_ub, w_max });
        }
        Ok(Self { u_lb, u_ub, w_max })
    }
}

/// Barrier parameters: the guaranteed deceleration margin `a_max` (m/s²) and
/// the linear class-K gain `alpha` (1/s), shared by both bound constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcbfParams {
    pub a_max: f64,
    pub alpha: f64,
}

impl RcbfParams {
    pub fn new(a_max: f64, alpha: f64) -> Result<Self> {
        if !(a_max.is_finite() && alpha.is_finite()) || a_max <= 0.0 || alpha <= 0.0 {
            return Err(Error::InvalidParams { a_max, alpha });
        }
        Ok(Self { a_max, alpha })
    }
}

/// State of the second-order system: constrained position `x1` (m), its rate
/// `x2` (m/s), and the time `t` (s) at which they hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State2 {
    pub x1: f64,
    pub x2: f64,
    pub t: f64,
}

impl State2 {
    pub fn new(x1: f64, x2: f64, t: f64) -> Self {
        Self { x1, x2, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.t.is_finite()
    }
}
