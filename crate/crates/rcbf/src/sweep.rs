//! State-space grids of set membership and input feasibility at a fixed time.
//!
//! Cells are sampled at their centers. Evaluation is embarrassingly parallel;
//! [`run_sweep`] uses rayon when the `parallel` feature is enabled (the
//! default) and is bitwise identical to the sequential [`run_sweep_seq`]
//! either way, with cells in row-major order (`x1` outer, `x2` inner).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::barrier::{in_restricted_set, velocity_bound};
use crate::filter::phi_bounds;
use crate::{ActuationLimits, BoxProfile, Error, RcbfParams, Result, State2, COMPARISON_TOL};

/// Rectangular grid over `(x1, x2)` evaluated at time `t_eval`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x1_range: (f64, f64),
    pub x2_range: (f64, f64),
    pub n1: usize,
    pub n2: usize,
    pub t_eval: f64,
}

impl GridSpec {
    pub fn new(
        x1_range: (f64, f64),
        x2_range: (f64, f64),
        n1: usize,
        n2: usize,
        t_eval: f64,
    ) -> Result<Self> {
        let ok_range = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok_range(x1_range) || !ok_range(x2_range) || n1 < 2 || n2 < 2 || !t_eval.is_finite() {
            return Err(Error::Config(format!(
                "invalid grid: x1 {x1_range:?}, x2 {x2_range:?}, {n1}x{n2} cells"
            )));
        }
        Ok(Self {
            x1_range,
            x2_range,
            n1,
            n2,
            t_eval,
        })
    }

    fn center(&self, i1: usize, i2: usize) -> (f64, f64) {
        let x1 = self.x1_range.0
            + (i1 as f64 + 0.5) * (self.x1_range.1 - self.x1_range.0) / self.n1 as f64;
        let x2 = self.x2_range.0
            + (i2 as f64 + 0.5) * (self.x2_range.1 - self.x2_range.0) / self.n2 as f64;
        (x1, x2)
    }
}

/// Per-cell result. Feasibility is evaluated everywhere; the guarantee is
/// only claimed on in-set cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub x1: f64,
    pub x2: f64,
    pub in_set: bool,
    pub feasible: bool,
    pub phi_lb: f64,
    pub phi_ub: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepCounts {
    pub cells: usize,
    pub in_set: usize,
    pub in_set_infeasible: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub cells: Vec<GridCell>,
    pub counts: SweepCounts,
}

fn eval_cell(
    spec: &GridSpec,
    idx: usize,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> GridCell {
    let (x1, x2) = spec.center(idx / spec.n2, idx % spec.n2);
    let s = State2::new(x1, x2, spec.t_eval);
    let fi = phi_bounds(&s, bx, lim, p);
    GridCell {
        x1,
        x2,
        in_set: in_restricted_set(&s, bx, p, 0.0),
        feasible: fi.lo <= fi.hi + COMPARISON_TOL,
        phi_lb: fi.phi_lb,
        phi_ub: fi.phi_ub,
        lo: fi.lo,
        hi: fi.hi,
    }
}

fn finish(cells: Vec<GridCell>) -> SweepResult {
    let in_set = cells.iter().filter(|c| c.in_set).count();
    let in_set_infeasible = cells.iter().filter(|c| c.in_set && !c.feasible).count();
    SweepResult {
        counts: SweepCounts {
            cells: cells.len(),
            in_set,
            in_set_infeasible,
        },
        cells,
    }
}

/// Evaluate the grid, in parallel when the `parallel` feature is enabled.
/// Output ordering and values are identical to [`run_sweep_seq`].
pub fn run_sweep(
    spec: &GridSpec,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> SweepResult {
    assert!(
        spec.n1 >= 2 && spec.n2 >= 2,
        "grid spec must come from GridSpec::new"
    );
    #[cfg(feature = "parallel")]
    {
        let cells: Vec<GridCell> = (0..spec.n1 * spec.n2)
            .into_par_iter()
            .map(|idx| eval_cell(spec, idx, bx, lim, p))
            .collect();
        finish(cells)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_seq(spec, bx, lim, p)
    }
}

/// Sequential fallback; also the reference for order-independence checks.
pub fn run_sweep_seq(
    spec: &GridSpec,
    bx: &BoxProfile,
    lim: &ActuationLimits,
    p: &RcbfParams,
) -> SweepResult {
    assert!(
        spec.n1 >= 2 && spec.n2 >= 2,
        "grid spec must come from GridSpec::new"
    );
    let cells: Vec<GridCell> = (0..spec.n1 * spec.n2)
        .map(|idx| eval_cell(spec, idx, bx, lim, p))
        .collect();
    finish(cells)
}

/// Grid covering the restricted safe set at `t_eval` with a relative margin:
/// `x1` spans the box widened by `margin` times its width, `x2` spans the
/// bound rate plus/minus `(1 + margin)` times the membership velocity bound.
/// 400x400 cells by default.
pub fn default_grid(bx: &BoxProfile, p: &RcbfParams, margin: f64, t_eval: f64) -> Result<GridSpec> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::Config(format!(
            "grid margin must be >= 0, got {margin}"
        )));
    }
    let width = bx.width();
    let vb = velocity_bound(bx, p);
    let rate = bx.rate(t_eval);
    GridSpec::new(
        (
            bx.lower(t_eval) - margin * width,
            bx.upper(t_eval) + margin * width,
        ),
        (rate - (1.0 + margin) * vb, rate + (1.0 + margin) * vb),
        400,
        400,
        t_eval,
    )
}
