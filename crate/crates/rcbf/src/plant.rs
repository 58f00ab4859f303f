//! Physical models and input transforms.
//!
//! The filter works on the normalized double integrator `x2' = u + w`. An
//! input-affine plant `x2' = f(x) + g(x)·(mu + nu)` is brought into that form
//! by the pre-transform `mu = (u - f)/g`, under which the disturbance enters
//! as `w = g·nu`. [`QuadAltitudeParams`] is the concrete vertical-axis model
//! used by the shipped scenario: thrust maps affinely to normalized
//! acceleration, so the input saturation maps to an interval in `u`.

use std::fmt;
use std::sync::Arc;

use crate::{ActuationLimits, Error, Result, State2};

type StateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Input-affine second-order plant `x2' = f(x1,x2) + g(x1,x2)·(mu + nu)` with
/// `g` nonzero on the operating region and raw-input disturbance `|nu| <=
/// nu_max`.
#[derive(Clone)]
pub struct AffinePlant {
    f_dyn: StateFn,
    g_dyn: StateFn,
    nu_max: f64,
}

impl AffinePlant {
    pub fn new(
        f_dyn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_dyn: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        nu_max: f64,
    ) -> Self {
        Self {
            f_dyn: Arc::new(f_dyn),
            g_dyn: Arc::new(g_dyn),
            nu_max,
        }
    }

    pub fn f(&self, s: &State2) -> f64 {
        (self.f_dyn)(s.x1, s.x2)
    }

    pub fn g(&self, s: &State2) -> f64 {
        (self.g_dyn)(s.x1, s.x2)
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    /// Raw input realizing a desired normalized acceleration:
    /// `mu = (u - f)/g`. Applying the plant with this `mu` gives
    /// `x2' = u + g·nu`.
    pub fn raw_input_from_u(&self, s: &State2, u: f64) -> Result<f64> {
        let g = self.g(s);
        if g.abs() < 1e-12 {
            return Err(Error::SingularGain { gain_abs: g.abs() });
        }
        Ok((u - self.f(s)) / g)
    }

    /// Plant acceleration for a raw input and disturbance.
    pub fn accel(&self, s: &State2, mu: f64, nu: f64) -> f64 {
        self.f(s) + self.g(s) * (mu + nu)
    }
}

impl fmt::Debug for AffinePlant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AffinePlant")
            .field("nu_max", &self.nu_max)
            .finish_non_exhaustive()
    }
}

/// Vertical-axis thrust model: `x2' = gravity - f·cos(phi)·cos(theta)/mass +
/// w_z`, held at fixed roll and pitch. Thrust and normalized acceleration are
/// related by the strictly decreasing affine pair
/// [`thrust_from_u`](Self::thrust_from_u) /
/// [`u_from_thrust`](Self::u_from_thrust).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadAltitudeParams {
    pub mass: f64,
    pub gravity: f64,
    /// Roll angle (rad).
    pub phi: f64,
    /// Pitch angle (rad).
    pub theta: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub w_z_max: f64,
}

impl QuadAltitudeParams {
    pub fn new(
        mass: f64,
        gravity: f64,
        phi: f64,
        theta: f64,
        f_min: f64,
        f_max: f64,
        w_z_max: f64,
    ) -> Result<Self> {
        let q = Self {
            mass,
            gravity,
            phi,
            theta,
            f_min,
            f_max,
            w_z_max,
        };
        // f_min == f_max is allowed here; the zero-width input interval is
        // rejected when the limits are built.
        let finite = mass.is_finite()
            && gravity.is_finite()
            && phi.is_finite()
            && theta.is_finite()
            && f_min.is_finite()
            && f_max.is_finite()
            && w_z_max.is_finite();
        if !finite || mass <= 0.0 || q.attitude_cos() <= 0.0 || f_min > f_max || w_z_max < 0.0 {
            return Err(Error::Config(format!(
                "invalid altitude model: mass={mass}, gravity={gravity}, cos(phi)cos(theta)={}, \
                 thrust range [{f_min}, {f_max}], w_z_max={w_z_max}",
                q.attitude_cos()
            )));
        }
        Ok(q)
    }

    fn attitude_cos(&self) -> f64 {
        self.phi.cos() * self.theta.cos()
    }

    /// Thrust producing a normalized acceleration:
    /// `f = mass·(gravity - u)/(cos(phi)·cos(theta))`.
    pub fn thrust_from_u(&self, u: f64) -> f64 {
        self.mass * (self.gravity - u) / self.attitude_cos()
    }

    /// Inverse of [`thrust_from_u`](Self::thrust_from_u):
    /// `u = gravity - f·cos(phi)·cos(theta)/mass`.
    pub fn u_from_thrust(&self, f: f64) -> f64 {
        self.gravity - f * self.attitude_cos() / self.mass
    }

    /// Normalized-acceleration interval reachable with thrust in
    /// `[f_min, f_max]`. The map is decreasing, so the endpoints swap.
    pub fn u_bounds(&self) -> (f64, f64) {
        (
            self.u_from_thrust(self.f_max),
            self.u_from_thrust(self.f_min),
        )
    }

    /// Actuation limits for the filter: the mapped thrust interval plus the
    /// vertical disturbance magnitude.
    pub fn actuation_limits(&self) -> Result<ActuationLimits> {
        let (u_lb, u_ub) = self.u_bounds();
        ActuationLimits::new(u_lb, u_ub, self.w_z_max)
    }
}
