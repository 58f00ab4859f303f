//! Deterministic CSV and JSON emission.
//!
//! Floats in CSV output carry 17 significant digits, enough to round-trip
//! any f64 bit pattern, so identical runs produce byte-identical files.

use std::io::Write;

use serde::Serialize;

use rcbf::sim::{RunSummary, TrajectoryRecord};
use rcbf::sweep::SweepResult;

use crate::scenario::ScenarioConfig;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRAJECTORY_HEADER: &str =
    "t,x1,x2,u,w,f_thrust,h_ub,h_lb,H_ub,H_lb,phi_lb,phi_ub,lo,hi,feasible";

pub fn write_trajectory_csv<W: Write>(
    mut w: W,
    records: &[TrajectoryRecord],
) -> std::io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        let thrust = r.f_thrust.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{thrust},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.x1),
            fmt_f64(r.x2),
            fmt_f64(r.u),
            fmt_f64(r.w),
            fmt_f64(r.h_ub),
            fmt_f64(r.h_lb),
            fmt_f64(r.rcbf_ub),
            fmt_f64(r.rcbf_lb),
            fmt_f64(r.phi_lb),
            fmt_f64(r.phi_ub),
            fmt_f64(r.lo),
            fmt_f64(r.hi),
            u8::from(r.feasible),
        )?;
    }
    w.flush()
}

pub const GRID_HEADER: &str = "x1,x2,in_set,feasible,phi_lb,phi_ub,lo,hi";

pub fn write_grid_csv<W: Write>(mut w: W, sweep: &SweepResult) -> std::io::Result<()> {
    writeln!(w, "{GRID_HEADER}")?;
    for c in &sweep.cells {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(c.x1),
            fmt_f64(c.x2),
            u8::from(c.in_set),
            u8::from(c.feasible),
            fmt_f64(c.phi_lb),
            fmt_f64(c.phi_ub),
            fmt_f64(c.lo),
            fmt_f64(c.hi),
        )?;
    }
    w.flush()
}

#[derive(Debug, Serialize)]
pub struct ParamsReport {
    pub u_lb: f64,
    pub u_ub: f64,
    pub w_max: f64,
    pub a_max: f64,
    pub alpha: f64,
    pub alpha_min: f64,
    pub velocity_bound: f64,
    pub initial_in_set: bool,
    pub resolved_config: ScenarioConfig,
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub invariance_held: bool,
    pub steps: usize,
    pub initial_in_set: bool,
    pub max_h_ub: f64,
    pub max_h_lb: f64,
    pub max_abs_u: f64,
    pub min_interval_width: f64,
    pub infeasible_steps: usize,
    pub f_thrust_min: Option<f64>,
    pub f_thrust_max: Option<f64>,
    pub alpha_min: f64,
    pub resolved_config: ScenarioConfig,
}

impl SimulateReport {
    pub fn new(summary: &RunSummary, alpha_min: f64, resolved_config: ScenarioConfig) -> Self {
        Self {
            invariance_held: summary.invariance_held,
            steps: summary.steps,
            initial_in_set: summary.initial_in_set,
            max_h_ub: summary.max_h_ub,
            max_h_lb: summary.max_h_lb,
            max_abs_u: summary.max_abs_u,
            min_interval_width: summary.min_interval_width,
            infeasible_steps: summary.infeasible_steps,
            f_thrust_min: summary.f_thrust_min,
            f_thrust_max: summary.f_thrust_max,
            alpha_min,
            resolved_config,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub cells: usize,
    pub in_set: usize,
    pub in_set_infeasible: usize,
    pub n1: usize,
    pub n2: usize,
    pub t_eval: f64,
    pub x1_range: (f64, f64),
    pub x2_range: (f64, f64),
    pub resolved_config: ScenarioConfig,
}
