//! `rcbf` — safety-filter scenarios from the command line.
//!
//! Three subcommands over one JSON scenario file: `params` derives and checks
//! the filter parameters, `simulate` runs the closed loop and writes a
//! trajectory CSV plus a summary JSON, `sweep` maps set membership and input
//! feasibility over a state-space grid. Exit codes: 0 success, 2 bad
//! configuration, 3 parameter infeasibility, 4 I/O failure.

mod output;
mod scenario;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use rcbf::barrier::{in_restricted_set, velocity_bound};
use rcbf::sweep::{default_grid, run_sweep, GridSpec};
use rcbf::SIM_MEMBERSHIP_TOL;

use output::{ParamsReport, SimulateReport, SweepReport};
use scenario::{Resolved, ScenarioConfig, Setting};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration (exit 2).
    Config(String),
    /// Scenario is well formed but the filter parameters are infeasible
    /// (exit 3).
    Parameter(String),
    /// File system failure (exit 4).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parameter(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Parameter(m) => write!(f, "parameter error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl From<rcbf::Error> for CliError {
    fn from(e: rcbf::Error) -> Self {
        match e {
            rcbf::Error::NonPositiveMargin { .. } | rcbf::Error::DegenerateBox => {
                CliError::Parameter(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "rcbf",
    version,
    about = "Robust safety filter for a moving box constraint on a second-order system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive and print the filter parameters for a scenario
    Params {
        /// Scenario JSON file
        config: PathBuf,
        /// Override the barrier gain
        #[arg(long)]
        alpha: Option<f64>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Run the closed loop and emit a trajectory CSV plus a summary JSON
    Simulate {
        /// Scenario JSON file
        config: PathBuf,
        /// Override the barrier gain
        #[arg(long)]
        alpha: Option<f64>,
        /// Override the horizon (s)
        #[arg(long)]
        t_end: Option<f64>,
        /// Override the step size (s)
        #[arg(long)]
        dt: Option<f64>,
        /// Trajectory CSV path (omit to skip the trajectory file)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the summary here instead of stdout
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Grid membership and feasibility over the state space at a fixed time
    Sweep {
        /// Scenario JSON file
        config: PathBuf,
        /// Override the barrier gain
        #[arg(long)]
        alpha: Option<f64>,
        /// Grid cells along x1 (default 400)
        #[arg(long)]
        n1: Option<usize>,
        /// Grid cells along x2 (default 400)
        #[arg(long)]
        n2: Option<usize>,
        /// Evaluation time (default: the box start time)
        #[arg(long)]
        t: Option<f64>,
        /// Grid CSV path (omit to skip the grid file)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the counts here instead of stdout
        #[arg(long)]
        out_json: Option<PathBuf>,
        /// Worker threads for the sweep (env RCBF_THREADS as fallback;
        /// thread count never changes output bytes)
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Params {
            config,
            alpha,
            out_json,
        } => cmd_params(&config, alpha, out_json.as_deref()),
        Command::Simulate {
            config,
            alpha,
            t_end,
            dt,
            out,
            out_json,
        } => cmd_simulate(
            &config,
            alpha,
            t_end,
            dt,
            out.as_deref(),
            out_json.as_deref(),
        ),
        Command::Sweep {
            config,
            alpha,
            n1,
            n2,
            t,
            out,
            out_json,
            threads,
        } => cmd_sweep(
            &config,
            alpha,
            n1,
            n2,
            t,
            out.as_deref(),
            out_json.as_deref(),
            threads,
        ),
    }
}

fn load_resolved(path: &Path, alpha: Option<f64>) -> Result<(Resolved, ScenarioConfig), CliError> {
    let mut cfg = scenario::load(path)?;
    if let Some(a) = alpha {
        cfg.rcbf.alpha = Setting::Value(a);
    }
    let resolved = scenario::resolve(&cfg)?;
    Ok((resolved, cfg))
}

fn emit_json<T: serde::Serialize>(report: &T, out_json: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Config(format!("serializing report: {e}")))?;
    match out_json {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn create_out(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_params(path: &Path, alpha: Option<f64>, out_json: Option<&Path>) -> Result<(), CliError> {
    let (r, _) = load_resolved(path, alpha)?;
    let report = ParamsReport {
        u_lb: r.limits.u_lb,
        u_ub: r.limits.u_ub,
        w_max: r.limits.w_max,
        a_max: r.params.a_max,
        alpha: r.params.alpha,
        alpha_min: r.alpha_min,
        velocity_bound: velocity_bound(&r.box_profile, &r.params),
        initial_in_set: in_restricted_set(
            &r.initial,
            &r.box_profile,
            &r.params,
            SIM_MEMBERSHIP_TOL,
        ),
        resolved_config: r.echo,
    };
    emit_json(&report, out_json)
}

fn cmd_simulate(
    path: &Path,
    alpha: Option<f64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    out: Option<&Path>,
    out_json: Option<&Path>,
) -> Result<(), CliError> {
    let mut cfg = scenario::load(path)?;
    if let Some(a) = alpha {
        cfg.rcbf.alpha = Setting::Value(a);
    }
    if let Some(v) = t_end {
        cfg.sim.t_end = v;
    }
    if let Some(v) = dt {
        cfg.sim.dt = v;
    }
    let resolved = scenario::resolve(&cfg)?;
    let run = rcbf::sim::run(&resolved.to_scenario(&cfg.sim)?).map_err(CliError::from)?;
    if let Some(path) = out {
        let mut w = create_out(path)?;
        output::write_trajectory_csv(&mut w, &run.records)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let report = SimulateReport::new(&run.summary, resolved.alpha_min, resolved.echo);
    emit_json(&report, out_json)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    path: &Path,
    alpha: Option<f64>,
    n1: Option<usize>,
    n2: Option<usize>,
    t: Option<f64>,
    out: Option<&Path>,
    out_json: Option<&Path>,
    threads: Option<usize>,
) -> Result<(), CliError> {
    let (r, _) = load_resolved(path, alpha)?;
    let t_eval = t.unwrap_or_else(|| r.box_profile.t0());
    let base = default_grid(&r.box_profile, &r.params, 0.2, t_eval).map_err(CliError::from)?;
    let spec = GridSpec::new(
        base.x1_range,
        base.x2_range,
        n1.unwrap_or(base.n1),
        n2.unwrap_or(base.n2),
        t_eval,
    )
    .map_err(CliError::from)?;

    let sweep = with_thread_pool(threads, || {
        run_sweep(&spec, &r.box_profile, &r.limits, &r.params)
    })?;

    if let Some(path) = out {
        let mut w = create_out(path)?;
        output::write_grid_csv(&mut w, &sweep)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let report = SweepReport {
        cells: sweep.counts.cells,
        in_set: sweep.counts.in_set,
        in_set_infeasible: sweep.counts.in_set_infeasible,
        n1: spec.n1,
        n2: spec.n2,
        t_eval: spec.t_eval,
        x1_range: spec.x1_range,
        x2_range: spec.x2_range,
        resolved_config: r.echo,
    };
    emit_json(&report, out_json)
}

/// Run `f` on a dedicated rayon pool when a thread count is requested via
/// flag or `RCBF_THREADS`. Cell ordering is fixed, so the choice only affects
/// wall time, never output bytes.
fn with_thread_pool<T: Send>(
    flag: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var("RCBF_THREADS") {
            Ok(s) => Some(s.parse::<usize>().map_err(|_| {
                CliError::Config(format!(
                    "RCBF_THREADS must be a positive integer, got {s:?}"
                ))
            })?),
            Err(_) => None,
        },
    };
    match threads {
        Some(0) => Err(CliError::Config("thread count must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("building thread pool: {e}")))
            .map(|pool| pool.install(f)),
        None => Ok(f()),
    }
}
