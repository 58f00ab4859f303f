//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The quadrotor-altitude scenario used throughout: box [0, 20] m climbing at
//! 1 m/s, unit mass, level roll, -5 degree pitch, thrust in [-15, 15] N,
//! vertical disturbance up to 5 m/s².

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rcbf::barrier::{eval_rcbf, in_restricted_set, velocity_bound};
use rcbf::filter::{
    alpha_min, control_midpoint, control_min_deviation, derive_a_max, phi_bounds, rcbf_rates,
    rcbf_rates_worst_case, slack,
};
use rcbf::plant::QuadAltitudeParams;
use rcbf::sim::{self, DisturbanceKind, DisturbanceModel, Scenario, SimConfig};
use rcbf::sweep::{run_sweep, GridSpec};
use rcbf::{ActuationLimits, BoxProfile, RcbfParams, State2};

fn quad_model() -> QuadAltitudeParams {
    QuadAltitudeParams::new(1.0, 9.81, 0.0, -5.0_f64.to_radians(), -15.0, 15.0, 5.0).unwrap()
}

fn quad_box() -> BoxProfile {
    BoxProfile::affine(0.0, 20.0, 1.0, 0.0).unwrap()
}

fn quad_limits() -> ActuationLimits {
    quad_model().actuation_limits().unwrap()
}

fn quad_scenario(alpha: f64, t_end: f64, dt: f64) -> Scenario {
    let limits = quad_limits();
    Scenario {
        box_profile: quad_box(),
        limits,
        params: RcbfParams::new(derive_a_max(&limits, 0.0).unwrap(), alpha).unwrap(),
        initial: State2::new(5.0, 0.0, 0.0),
        disturbance: DisturbanceModel::new(DisturbanceKind::ConstantMax, limits.w_max).unwrap(),
        config: SimConfig::new(t_end, dt),
        quad: Some(quad_model()),
    }
}

fn verdict(criterion: &str, ok: bool) {
    println!(
        "[acceptance] {criterion}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion failed: {criterion}");
}

#[test]
fn criterion_01_input_bound_mapping() {
    let (u_lb, u_ub) = quad_model().u_bounds();
    let ok = (u_lb - (-5.13)).abs() <= 0.01 && (u_ub - 24.75).abs() <= 0.01;
    verdict(
        "1: thrust interval maps to (-5.13, 24.75) m/s² within 0.01",
        ok,
    );
}

#[test]
fn criterion_02_deceleration_margin() {
    let a_max = derive_a_max(&quad_limits(), 0.0).unwrap();
    let ok = (a_max - 0.1329).abs() <= 5e-4;
    verdict("2: derived a_max equals 0.1329 m/s² within 5e-4", ok);
}

#[test]
fn criterion_03_minimum_gain() {
    let lim = quad_limits();
    let a_max = derive_a_max(&lim, 0.0).unwrap();
    let min = alpha_min(&quad_box(), &lim, a_max).unwrap();
    let ok = (min - 8.6737).abs() <= 1e-3;
    verdict("3: minimum gain equals 8.6737 within 1e-3", ok);
}

#[test]
fn criterion_04_closed_loop_invariance_by_gain() {
    let start = Instant::now();
    let strong = sim::run(&quad_scenario(8.7, 30.0, 1e-3)).unwrap();
    let mut weak_all_violate = true;
    for alpha in [2.0, 4.0, 6.0] {
        let out = sim::run(&quad_scenario(alpha, 30.0, 1e-3)).unwrap();
        weak_all_violate &= !out.summary.invariance_held;
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = strong.summary.invariance_held && weak_all_violate && elapsed <= 5.0;
    verdict(
        &format!(
            "4: 30 s runs -- alpha 8.7 holds the bounds, alpha 2/4/6 violate \
             ({elapsed:.2} s <= 5 s)"
        ),
        ok,
    );
}

#[test]
fn criterion_05_thrust_stays_saturated_range() {
    let out = sim::run(&quad_scenario(8.7, 30.0, 1e-3)).unwrap();
    let ok = out
        .records
        .iter()
        .all(|r| r.f_thrust.is_some_and(|f| (-15.0..=15.0).contains(&f)));
    verdict("5: every logged thrust lies in [-15, 15] N", ok);
}

#[test]
fn criterion_06_feasibility_sweep() {
    let bx = quad_box();
    let lim = quad_limits();
    let a_max = derive_a_max(&lim, 0.0).unwrap();
    let spec = GridSpec::new((0.0, 20.0), (-3.0, 5.0), 400, 400, 0.0).unwrap();
    let start = Instant::now();
    let strong = run_sweep(&spec, &bx, &lim, &RcbfParams::new(a_max, 8.7).unwrap());
    let weak = run_sweep(&spec, &bx, &lim, &RcbfParams::new(a_max, 2.0).unwrap());
    let elapsed = start.elapsed().as_secs_f64();
    let ok = strong.counts.in_set_infeasible == 0
        && weak.counts.in_set_infeasible > 0
        && strong.counts.in_set > 0
        && elapsed <= 2.0;
    verdict(
        &format!(
            "6: 400x400 sweep -- no in-set holes at alpha 8.7 ({} in-set cells), \
             {} holes at alpha 2.0 ({elapsed:.2} s <= 2 s)",
            strong.counts.in_set, weak.counts.in_set_infeasible
        ),
        ok,
    );
}

fn sample_in_set(rng: &mut ChaCha8Rng, bx: &BoxProfile, p: &RcbfParams) -> State2 {
    let vb = velocity_bound(bx, p);
    loop {
        let s = State2::new(
            rng.gen_range(bx.l_lb0() - 10.0..=bx.l_ub0() + 10.0),
            rng.gen_range(bx.rate(0.0) - 2.0 * vb..=bx.rate(0.0) + 2.0 * vb),
            0.0,
        );
        if in_restricted_set(&s, bx, p, 0.0) {
            return s;
        }
    }
}

#[test]
fn criterion_07_interval_nonempty_at_minimum_gain() {
    let bx = quad_box();
    let lim = quad_limits();
    let a_max = derive_a_max(&lim, 0.0).unwrap();
    let alpha = alpha_min(&bx, &lim, a_max).unwrap() * (1.0 + 1e-6);
    let p = RcbfParams::new(a_max, alpha).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    for _ in 0..100_000 {
        let s = sample_in_set(&mut rng, &bx, &p);
        let fi = phi_bounds(&s, &bx, &lim, &p);
        ok &= !fi.empty && fi.lo >= lim.u_lb - 1e-9 && fi.hi <= lim.u_ub + 1e-9;
    }
    verdict(
        "7: feasible interval nonempty and inside the input bounds at 1e5 in-set states",
        ok,
    );
}

#[test]
fn criterion_08_speed_bound() {
    let bx = quad_box();
    let lim = quad_limits();
    let a_max = derive_a_max(&lim, 0.0).unwrap();
    let p = RcbfParams::new(a_max, alpha_min(&bx, &lim, a_max).unwrap() * (1.0 + 1e-6)).unwrap();
    let vb = (2.0 * a_max * bx.width()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sampled_ok = true;
    for _ in 0..100_000 {
        let s = sample_in_set(&mut rng, &bx, &p);
        sampled_ok &= (s.x2 - bx.rate(0.0)).abs() <= vb + 1e-12;
    }
    let run = sim::run(&quad_scenario(8.7, 30.0, 1e-3)).unwrap();
    let max_rel = run
        .records
        .iter()
        .map(|r| (r.x2 - quad_box().rate(r.t)).abs())
        .fold(0.0f64, f64::max);
    let closed_loop_ok = max_rel <= vb + 1e-3;
    verdict(
        &format!(
            "8: |x2 - l_dot| <= {vb:.4} on 1e5 in-set states (1e-12 slack) and along the \
             guaranteed run (max {max_rel:.4}, 1e-3 slack)"
        ),
        sampled_ok && closed_loop_ok,
    );
}

#[test]
fn criterion_09_oracle_equivalences() {
    let bx = quad_box();
    let lim = quad_limits();
    let a_max = derive_a_max(&lim, 0.0).unwrap();
    let p = RcbfParams::new(a_max, 8.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // (a) worst-case disturbance closed form vs 101-point sampled maximum.
    let mut ok_a = true;
    for _ in 0..200 {
        let s = sample_in_set(&mut rng, &bx, &p);
        let u = rng.gen_range(lim.u_lb..=lim.u_ub);
        let closed = rcbf_rates_worst_case(&s, &bx, &lim, &p, u);
        let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for k in 0..=100 {
            let w = -lim.w_max + 2.0 * lim.w_max * k as f64 / 100.0;
            let r = rcbf_rates(&s, &bx, &p, u, w);
            best.0 = best.0.max(r.0);
            best.1 = best.1.max(r.1);
        }
        ok_a &= (closed.0 - best.0).abs() < 1e-10 && (closed.1 - best.1).abs() < 1e-10;
    }

    // (b) min-deviation projection vs brute-force argmin on a 1e4-point grid.
    let mut ok_b = true;
    let n = 10_000;
    let du = (lim.u_ub - lim.u_lb) / n as f64;
    for _ in 0..50 {
        let s = sample_in_set(&mut rng, &bx, &p);
        let u_nom = rng.gen_range(lim.u_lb - 2.0..=lim.u_ub + 2.0);
        let analytic = control_min_deviation(&s, &bx, &lim, &p, u_nom).unwrap();
        let mut best: Option<f64> = None;
        for k in 0..=n {
            let u = lim.u_lb + k as f64 * du;
            let g = slack(&s, &bx, &lim, &p, u);
            if g.g_ub <= 0.0 && g.g_lb <= 0.0 {
                let better = best.is_none_or(|b: f64| (u - u_nom).abs() < (b - u_nom).abs());
                if better {
                    best = Some(u);
                }
            }
        }
        ok_b &= best.is_some_and(|b| (analytic - b).abs() <= du + 1e-12);
    }

    // (c) midpoint law vs the raw interval average.
    let mut ok_c = true;
    let mut checked_c = 0;
    while checked_c < 2_000 {
        let s = sample_in_set(&mut rng, &bx, &p);
        if (s.x2 - bx.rate(s.t)).abs() < 1e-2 {
            continue;
        }
        let fi = phi_bounds(&s, &bx, &lim, &p);
        let average = (0.5 * (fi.phi_lb + fi.phi_ub)).clamp(lim.u_lb, lim.u_ub);
        ok_c &= (average - control_midpoint(&s, &bx, &lim, &p).unwrap()).abs() < 1e-9;
        checked_c += 1;
    }

    // (d) analytic barrier rate vs centered finite differences, order >= 1.9.
    let fd_box = BoxProfile::with_profile(
        0.0,
        10.0,
        0.0,
        |t: f64| 0.5 * (0.7 * t).sin(),
        |t: f64| 0.35 * (0.7 * t).cos(),
        |t: f64| -0.245 * (0.7 * t).sin(),
        0.245,
    )
    .unwrap();
    let fd_p = RcbfParams::new(0.5, 3.0).unwrap();
    let state_at = |t: f64| State2::new(3.0 + 2.0 * (0.3 * t).sin(), 0.6 * (0.3 * t).cos(), t);
    let mut errs = [0.0f64; 2];
    for (i, dt) in [1e-3, 1e-4].into_iter().enumerate() {
        for t in [0.0f64, 1.0, 2.0, 3.0, 5.0] {
            let accel = -0.18 * (0.3 * t).sin();
            let w = 0.1 * t.sin();
            let analytic = rcbf_rates(&state_at(t), &fd_box, &fd_p, accel - w, w);
            let plus = eval_rcbf(&state_at(t + dt), &fd_box, &fd_p);
            let minus = eval_rcbf(&state_at(t - dt), &fd_box, &fd_p);
            errs[i] = errs[i]
                .max(((plus.rcbf_ub - minus.rcbf_ub) / (2.0 * dt) - analytic.0).abs())
                .max(((plus.rcbf_lb - minus.rcbf_lb) / (2.0 * dt) - analytic.1).abs());
        }
    }
    let order = (errs[0] / errs[1]).log10();
    let ok_d = order >= 1.9;

    verdict(
        &format!(
            "9: oracle equivalences -- (a) worst-case disturbance {}, (b) projection {}, \
             (c) midpoint {}, (d) rate FD order {order:.2}",
            if ok_a { "ok" } else { "FAIL" },
            if ok_b { "ok" } else { "FAIL" },
            if ok_c { "ok" } else { "FAIL" },
        ),
        ok_a && ok_b && ok_c && ok_d,
    );
}

#[test]
fn criterion_10_algebraic_identities() {
    let bx = quad_box();
    let lim = quad_limits();
    let p = RcbfParams::new(derive_a_max(&lim, 0.0).unwrap(), 8.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sum_ok = true;
    for _ in 0..100_000 {
        let s = State2::new(
            rng.gen_range(-20.0..=40.0),
            rng.gen_range(-8.0..=8.0),
            rng.gen_range(0.0..=30.0),
        );
        let v = eval_rcbf(&s, &bx, &p);
        sum_ok &= (v.rcbf_ub + v.rcbf_lb - (bx.lower(s.t) - bx.upper(s.t))).abs() < 1e-12;
    }
    let mut exact_ok = true;
    for _ in 0..10_000 {
        let t = rng.gen_range(0.0..=30.0);
        let s = State2::new(rng.gen_range(-20.0..=40.0), bx.rate(t), t);
        let v = eval_rcbf(&s, &bx, &p);
        exact_ok &= v.rcbf_ub == v.h_ub && v.rcbf_lb == v.h_lb;
    }
    verdict(
        "10: barrier sum identity at 1e5 states (1e-12) and exact h-equality at matched rate",
        sum_ok && exact_ok,
    );
}
