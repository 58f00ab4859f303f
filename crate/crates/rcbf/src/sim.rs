//! Fixed-step closed-loop simulation with per-step safety accounting.
//!
//! Control and disturbance are held constant across each step (zero-order
//! hold, disturbance sampled at the step start). The continuous-time
//! invariance guarantee therefore holds only up to integration tolerance;
//! a run is accepted when the bound constraints stay below the configured
//! `violation_tol`.
//!
//! A run is single-threaded and deterministic: the same scenario and seed
//! produce identical records. Independent runs share no mutable state and may
//! execute concurrently.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::barrier::{eval_rcbf, in_restricted_set};
use crate::filter::{control_midpoint, control_min_deviation, midpoint_raw, phi_bounds};
use crate::plant::QuadAltitudeParams;
use crate::{
    ActuationLimits, BoxProfile, Error, RcbfParams, Result, State2, DEFAULT_VIOLATION_TOL,
    SIM_MEMBERSHIP_TOL,
};

/// Fixed-step integration scheme. RK4 is the default and is exact for this
/// plant under zero-order hold; Euler is kept for cross-checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Euler,
}

/// One integration step of `x1' = x2`, `x2' = u + w` with `u` and `w` held
/// constant. The returned time is advanced by `dt`; the driver overwrites it
/// with `t0 + k·dt` to avoid accumulation drift.
pub fn step(s: &State2, u: f64, w: f64, dt: f64, method: Integrator) -> State2 {
    let a = u + w;
    match method {
        Integrator::Rk4 => {
            // Stage slopes for the state (x1, x2).
            let k1 = (s.x2, a);
            let k2 = (s.x2 + 0.5 * dt * k1.1, a);
            let k3 = (s.x2 + 0.5 * dt * k2.1, a);
            let k4 = (s.x2 + dt * k3.1, a);
            State2 {
                x1: s.x1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                x2: s.x2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
                t: s.t + dt,
            }
        }
        Integrator::Euler => State2 {
            x1: s.x1 + dt * s.x2,
            x2: s.x2 + dt * a,
            t: s.t + dt,
        },
    }
}

/// Disturbance signal shape; the magnitude never exceeds `w_max`.
#[derive(Debug, Clone, PartialEq)]
pub enum DisturbanceKind {
    /// `w(t) = +w_max`, the worst case against the upper bound.
    ConstantMax,
    /// `w(t) = -w_max`.
    ConstantMin,
    /// `w(t) = 0`.
    Zero,
    /// `w(t) = amplitude·sin(2π·t/period)` with `amplitude <= w_max`.
    Sinusoidal { amplitude: f64, period: f64 },
    /// Uniform i.i.d. samples from `[-w_max, w_max]`, one per step.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceModel {
    kind: DisturbanceKind,
    w_max: f64,
}

impl DisturbanceModel {
    pub fn new(kind: DisturbanceKind, w_max: f64) -> Result<Self> {
        if !(w_max >= 0.0 && w_max.is_finite()) {
            return Err(Error::Config(format!(
                "disturbance w_max must be >= 0, got {w_max}"
            )));
        }
        if let DisturbanceKind::Sinusoidal { amplitude, period } = kind {
            if !(amplitude >= 0.0 && amplitude <= w_max) {
                return Err(Error::Config(format!(
                    "sinusoidal amplitude {amplitude} outside [0, w_max={w_max}]"
                )));
            }
            if !(period > 0.0 && period.is_finite()) {
                return Err(Error::Config(format!(
                    "sinusoidal period must be > 0, got {period}"
                )));
            }
        }
        Ok(Self { kind, w_max })
    }

    pub fn kind(&self) -> &DisturbanceKind {
        &self.kind
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn sample<R: Rng>(&self, t: f64, rng: &mut R) -> f64 {
        match self.kind {
            DisturbanceKind::ConstantMax => self.w_max,
            DisturbanceKind::ConstantMin => -self.w_max,
            DisturbanceKind::Zero => 0.0,
            DisturbanceKind::Sinusoidal { amplitude, period } => {
                amplitude * (std::f64::consts::TAU * t / period).sin()
            }
            DisturbanceKind::UniformRandom => {
                if self.w_max == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-self.w_max..=self.w_max)
                }
            }
        }
    }
}

/// Control law applied at each step start.
#[derive(Clone)]
pub enum Controller {
    /// Midpoint of the admissible interval, clamped to the input bounds.
    Midpoint,
    /// Projection of a nominal control profile `t -> u_nom` onto the
    /// admissible interval.
    MinDeviation(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Controller {
    pub fn min_deviation_const(u_nom: f64) -> Self {
        Controller::MinDeviation(Arc::new(move |_| u_nom))
    }
}

impl fmt::Debug for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Controller::Midpoint => write!(f, "Midpoint"),
            Controller::MinDeviation(_) => write!(f, "MinDeviation(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub t_end: f64,
    pub dt: f64,
    pub integrator: Integrator,
    pub violation_tol: f64,
    pub controller: Controller,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            integrator: Integrator::Rk4,
            violation_tol: DEFAULT_VIOLATION_TOL,
            controller: Controller::Midpoint,
            seed: 0,
        }
    }
}

/// Everything one closed-loop run needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub box_profile: BoxProfile,
    pub limits: ActuationLimits,
    pub params: RcbfParams,
    pub initial: State2,
    pub disturbance: DisturbanceModel,
    pub config: SimConfig,
    /// When present, commanded thrust is logged alongside the control.
    pub quad: Option<QuadAltitudeParams>,
}

/// One logged step. Rows are written at every step start plus once at the
/// final time, with the control evaluated but not applied there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub u: f64,
    pub w: f64,
    /// Commanded thrust after actuator saturation; `None` without a thrust
    /// model. The controller clamps in u-space, so saturation here only
    /// trims sub-ulp spill from the affine round trip.
    pub f_thrust: Option<f64>,
    pub h_ub: f64,
    pub h_lb: f64,
    pub rcbf_ub: f64,
    pub rcbf_lb: f64,
    pub phi_lb: f64,
    pub phi_ub: f64,
    pub lo: f64,
    pub hi: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    /// Applied integration steps (records = steps + 1).
    pub steps: usize,
    /// Whether the initial state was in the restricted safe set (checked with
    /// the simulator membership tolerance). The guarantees need it; the run
    /// proceeds either way and this flag records the warning.
    pub initial_in_set: bool,
    pub max_h_ub: f64,
    pub max_h_lb: f64,
    /// Minimum clipped-interval width over the run; negative iff some step
    /// was infeasible.
    pub min_interval_width: f64,
    pub infeasible_steps: usize,
    pub max_abs_u: f64,
    pub f_thrust_min: Option<f64>,
    pub f_thrust_max: Option<f64>,
    /// Both bound constraints stayed at or below `violation_tol`.
    pub invariance_held: bool,
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub records: Vec<TrajectoryRecord>,
    pub summary: RunSummary,
}

/// Run one closed-loop simulation.
///
/// Fails with [`Error::Config`] on an inconsistent scenario (non-positive
/// `dt`, horizon not past the box start time, disturbance magnitude not
/// matching the declared `w_max`, initial state time not at the box start).
/// An empty admissible interval mid-run does not abort: the step logs
/// `feasible = false` and applies the clamped midpoint law anyway, so
/// guarantee-violating parameterizations still produce full trajectories.
pub fn run(sc: &Scenario) -> Result<SimRun> {
    let cfg = &sc.config;
    let t0 = sc.box_profile.t0();
    if !cfg.dt.is_finite() || cfg.dt <= 0.0 {
        return Err(Error::Config(format!(
            "dt must be positive and finite, got {}",
            cfg.dt
        )));
    }
    if !cfg.t_end.is_finite() || cfg.t_end <= t0 {
        return Err(Error::Config(format!(
            "t_end ({}) must be finite and past the box start time ({t0})",
            cfg.t_end
        )));
    }
    if !cfg.violation_tol.is_finite() || cfg.violation_tol < 0.0 {
        return Err(Error::Config(format!(
            "violation_tol must be >= 0, got {}",
            cfg.violation_tol
        )));
    }
    if sc.disturbance.w_max() != sc.limits.w_max {
        return Err(Error::Config(format!(
            "disturbance w_max ({}) does not match actuation w_max ({})",
            sc.disturbance.w_max(),
            sc.limits.w_max
        )));
    }
    if !sc.initial.is_finite() {
        return Err(Error::NonFiniteState {
            x1: sc.initial.x1,
            x2: sc.initial.x2,
            t: sc.initial.t,
        });
    }
    if sc.initial.t != t0 {
        return Err(Error::Config(format!(
            "initial state time ({}) must equal the box start time ({t0})",
            sc.initial.t
        )));
    }

    let steps = ((cfg.t_end - t0) / cfg.dt).round() as usize;
    if steps == 0 {
        return Err(Error::Config("horizon shorter than one step".into()));
    }

    let initial_in_set =
        in_restricted_set(&sc.initial, &sc.box_profile, &sc.params, SIM_MEMBERSHIP_TOL);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::with_capacity(steps + 1);
    let mut state = sc.initial;

    for k in 0..=steps {
        let t = t0 + k as f64 * cfg.dt;
        state.t = t;

        let v = eval_rcbf(&state, &sc.box_profile, &sc.params);
        let fi = phi_bounds(&state, &sc.box_profile, &sc.limits, &sc.params);
        let chosen = match &cfg.controller {
            Controller::Midpoint => {
                control_midpoint(&state, &sc.box_profile, &sc.limits, &sc.params)
            }
            Controller::MinDeviation(nominal) => {
                control_min_deviation(&state, &sc.box_profile, &sc.limits, &sc.params, nominal(t))
            }
        };
        let u = match chosen {
            Ok(u) => u,
            // Off the guaranteed region: keep flying on the clamped midpoint.
            Err(Error::InfeasibleState { .. }) => midpoint_raw(&state, &sc.box_profile, &sc.params)
                .clamp(sc.limits.u_lb, sc.limits.u_ub),
            Err(e) => return Err(e),
        };
        let w = sc.disturbance.sample(t, &mut rng);
        let f_thrust = sc
            .quad
            .as_ref()
            .map(|q| q.thrust_from_u(u).clamp(q.f_min, q.f_max));

        records.push(TrajectoryRecord {
            t,
            x1: state.x1,
            x2: state.x2,
            u,
            w,
            f_thrust,
            h_ub: v.h_ub,
            h_lb: v.h_lb,
            rcbf_ub: v.rcbf_ub,
            rcbf_lb: v.rcbf_lb,
            phi_lb: fi.phi_lb,
            phi_ub: fi.phi_ub,
            lo: fi.lo,
            hi: fi.hi,
            feasible: !fi.empty,
        });

        if k < steps {
            state = step(&state, u, w, cfg.dt, cfg.integrator);
        }
    }

    let summary = summarize(&records, steps, initial_in_set, cfg.violation_tol);
    Ok(SimRun { records, summary })
}

fn summarize(
    records: &[TrajectoryRecord],
    steps: usize,
    initial_in_set: bool,
    violation_tol: f64,
) -> RunSummary {
    let mut max_h_ub = f64::NEG_INFINITY;
    let mut max_h_lb = f64::NEG_INFINITY;
    let mut min_width = f64::INFINITY;
    let mut max_abs_u: f64 = 0.0;
    let mut infeasible = 0;
    let mut f_min = f64::INFINITY;
    let mut f_max = f64::NEG_INFINITY;
    let mut any_thrust = false;
    for r in records {
        max_h_ub = max_h_ub.max(r.h_ub);
        max_h_lb = max_h_lb.max(r.h_lb);
        min_width = min_width.min(r.hi - r.lo);
        max_abs_u = max_abs_u.max(r.u.abs());
        if !r.feasible {
            infeasible += 1;
        }
        if let Some(f) = r.f_thrust {
            any_thrust = true;
            f_min = f_min.min(f);
            f_max = f_max.max(f);
        }
    }
    RunSummary {
        steps,
        initial_in_set,
        max_h_ub,
        max_h_lb,
        min_interval_width: min_width,
        infeasible_steps: infeasible,
        max_abs_u,
        f_thrust_min: any_thrust.then_some(f_min),
        f_thrust_max: any_thrust.then_some(f_max),
        invariance_held: max_h_ub <= violation_tol && max_h_lb <= violation_tol,
    }
}

/// First violation time of each safe-set condition over a record list, plus
/// the input-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvarianceReport {
    pub first_h_ub: Option<f64>,
    pub first_h_lb: Option<f64>,
    pub first_rcbf_ub: Option<f64>,
    pub first_rcbf_lb: Option<f64>,
    pub first_input: Option<f64>,
    pub clean: bool,
}

/// Scan records for the first time each of the four set conditions exceeds
/// `tol`, and for any control outside `[u_lb, u_ub]` (exact comparison; the
/// controller clamps).
pub fn check_invariance(
    records: &[TrajectoryRecord],
    lim: &ActuationLimits,
    tol: f64,
) -> InvarianceReport {
    let mut report = InvarianceReport {
        clean: true,
        ..Default::default()
    };
    for r in records {
        if report.first_h_ub.is_none() && r.h_ub > tol {
            report.first_h_ub = Some(r.t);
        }
        if report.first_h_lb.is_none() && r.h_lb > tol {
            report.first_h_lb = Some(r.t);
        }
        if report.first_rcbf_ub.is_none() && r.rcbf_ub > tol {
            report.first_rcbf_ub = Some(r.t);
        }
        if report.first_rcbf_lb.is_none() && r.rcbf_lb > tol {
            report.first_rcbf_lb = Some(r.t);
        }
        if report.first_input.is_none() && (r.u < lim.u_lb || r.u > lim.u_ub) {
            report.first_input = Some(r.t);
        }
    }
    report.clean = report.first_h_ub.is_none()
        && report.first_h_lb.is_none()
        && report.first_rcbf_ub.is_none()
        && report.first_rcbf_lb.is_none()
        && report.first_input.is_none();
    report
}
