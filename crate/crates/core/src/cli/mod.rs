//! The `kwcopt` command line: `kwcopt <subcommand> --config <path> [--out <dir>]`.
//!
//! Every run writes `meta.json` with the resolved configuration and, on
//! failure, an error record. Exit codes: 0 success, 1 a requested check
//! failed, 2 configuration or output error, 3 solver failure.

mod config;
mod emit;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

pub use config::*;
pub use emit::{fmt_f64, Emitter};

use crate::control::{check_conjugacy, epsilon_continuation, solve_ocp, OcpInstance, OcpReport};
use crate::experiments::{gradcheck_directions, gradient_check, probe_directions, run_suite, SUITES};
use crate::numerics::Trajectory;
use crate::state::{solve_state, StateTrajectory};

/// Largest relative gradient error `gradcheck` accepts.
pub const GRADCHECK_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "kwcopt", version, about = "Pseudo-parabolic KWC state solves, optimal control and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the state system with the configured controls.
    SolveState(Args),
    /// Solve the optimal control problem.
    SolveOcp(Args),
    /// Compare the adjoint gradient with finite differences.
    Gradcheck(Args),
    /// Solve along the configured ε list with warm starts.
    EpsSweep(Args),
    /// Run acceptance suites by name.
    Check(Args),
}

#[derive(Debug, Clone, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output.dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SolveState(_) => "solve-state",
            Command::SolveOcp(_) => "solve-ocp",
            Command::Gradcheck(_) => "gradcheck",
            Command::EpsSweep(_) => "eps-sweep",
            Command::Check(_) => "check",
        }
    }

    fn args(&self) -> &Args {
        match self {
            Command::SolveState(a)
            | Command::SolveOcp(a)
            | Command::Gradcheck(a)
            | Command::EpsSweep(a)
            | Command::Check(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Check,
    Config,
    Output,
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

impl Failure {
    fn new(kind: FailureKind, message: impl ToString) -> Self {
        Failure {
            kind,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Check => 1,
            FailureKind::Config | FailureKind::Output => 2,
            FailureKind::Solver => 3,
        }
    }
}

fn config_err(e: impl ToString) -> Failure {
    Failure::new(FailureKind::Config, e)
}

fn solver_err(e: impl ToString) -> Failure {
    Failure::new(FailureKind::Solver, e)
}

fn output_err(e: impl ToString) -> Failure {
    Failure::new(FailureKind::Output, e)
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: Option<u64>,
    config: Option<&'a RunConfig>,
    exit_code: i32,
    error: Option<&'a Failure>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

/// Runs one command and returns its exit code.
pub fn run(cmd: &Command) -> i32 {
    let args = cmd.args();
    let loaded = RunConfig::load(&args.config).map_err(config_err);
    let out = args
        .out
        .clone()
        .or_else(|| loaded.as_ref().ok().map(|c| c.output.dir.clone()))
        .unwrap_or_else(|| OutputSpec::default().dir);
    let emitter = match Emitter::new(&out) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let result = loaded.as_ref().map_err(Clone::clone).and_then(|cfg| dispatch(cmd, cfg, &emitter));
    let failure = result.err();
    let code = failure.as_ref().map_or(0, Failure::exit_code);
    let cfg = loaded.as_ref().ok();
    let meta = Meta {
        tool: "kwcopt",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cmd.name(),
        seed: cfg.map(|c| c.seed),
        config: cfg,
        exit_code: code,
        error: failure.as_ref(),
    };
    if let Err(msg) = emitter.json("meta.json", &meta) {
        eprintln!("error: {msg}");
        return 2;
    }
    if let Some(f) = &failure {
        eprintln!("error ({:?}): {}", f.kind, f.message);
    }
    code
}

fn dispatch(cmd: &Command, cfg: &RunConfig, out: &Emitter) -> Result<(), Failure> {
    cfg.validate().map_err(config_err)?;
    match cmd {
        Command::Check(_) => return check(cfg, out),
        Command::EpsSweep(_) => {
            cfg.eps_levels().map_err(config_err)?;
        }
        _ => {}
    }
    let inst = cfg.instance().map_err(config_err)?;
    match cmd {
        Command::SolveState(_) => solve_state_cmd(cfg, &inst, out),
        Command::SolveOcp(_) => solve_ocp_cmd(cfg, &inst, out),
        Command::Gradcheck(_) => gradcheck(cfg, &inst, out),
        Command::EpsSweep(_) => eps_sweep(cfg, &inst, out),
        Command::Check(_) => unreachable!("handled above"),
    }
}

fn energy_csv(out: &Emitter, st: &StateTrajectory) -> Result<(), Failure> {
    let tg = st.eta.time();
    let rows = st.energy.iter().enumerate().map(|(i, e)| vec![fmt_f64(tg.t(i)), fmt_f64(*e)]);
    out.csv("energy.csv", &["t", "energy"], rows).map_err(output_err)
}

fn write_fields(cfg: &RunConfig, inst: &OcpInstance, out: &Emitter, named: &[(&str, &Trajectory)]) -> Result<(), Failure> {
    let grid = inst.state.ops.grid();
    for (name, w) in named {
        out.fields(name, grid, w, cfg.output.field_stride).map_err(output_err)?;
    }
    Ok(())
}

fn solve_state_cmd(cfg: &RunConfig, inst: &OcpInstance, out: &Emitter) -> Result<(), Failure> {
    let st = solve_state(&inst.state).map_err(solver_err)?;
    energy_csv(out, &st)?;
    write_fields(cfg, inst, out, &[("eta", &st.eta), ("theta", &st.theta)])?;
    let increase = st.energy.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let newton: Vec<_> = st
        .steps
        .iter()
        .map(|s| json!([s.eta_iterations, s.eta_residual, s.theta_iterations, s.theta_residual]))
        .collect();
    out.json(
        "diagnostics.json",
        &json!({
            "max_energy_increase": increase,
            "newton_columns": ["eta_iterations", "eta_residual", "theta_iterations", "theta_residual"],
            "newton": newton,
        }),
    )
    .map_err(output_err)
}

fn cost_rows(report: &OcpReport, prefix: &[String]) -> Vec<Vec<String>> {
    report
        .history
        .iter()
        .map(|h| {
            prefix
                .iter()
                .cloned()
                .chain([
                    h.iteration.to_string(),
                    fmt_f64(h.cost),
                    fmt_f64(h.residual),
                    fmt_f64(h.step),
                    h.halvings.to_string(),
                ])
                .collect()
        })
        .collect()
}

const COST_HEADER: [&str; 5] = ["iter", "cost", "residual", "step", "halvings"];

fn solve_ocp_cmd(cfg: &RunConfig, inst: &OcpInstance, out: &Emitter) -> Result<(), Failure> {
    let rep = solve_ocp(inst, &cfg.optimizer, None).map_err(solver_err)?;
    out.csv("cost.csv", &COST_HEADER, cost_rows(&rep, &[])).map_err(output_err)?;
    energy_csv(out, &rep.state)?;
    write_fields(
        cfg,
        inst,
        out,
        &[
            ("eta", &rep.state.eta),
            ("theta", &rep.state.theta),
            ("u", &rep.u),
            ("v", &rep.v),
            ("p", &rep.adjoint.p),
            ("z", &rep.adjoint.z),
        ],
    )?;
    let at_opt = inst.state.with_controls(rep.u.clone(), rep.v.clone());
    let [u, v, h, k] = probe_directions(&at_opt);
    let conj = check_conjugacy(&at_opt, &rep.state, (&u, &v), (&h, &k)).map_err(solver_err)?;
    let res = rep.residuals;
    out.json(
        "diagnostics.json",
        &json!({
            "stop": rep.stop,
            "cost": rep.cost(),
            "residuals": res,
            "terminal_adjoint": rep.adjoint.terminal,
            "conjugacy": conj,
        }),
    )
    .map_err(output_err)?;
    println!("{:?}: cost {} residuals {:?}", rep.stop, fmt_f64(rep.cost()), res);
    if !rep.converged() || !res.satisfied(cfg.optimizer.tol) {
        return Err(Failure::new(
            FailureKind::Check,
            format!(
                "optimality residuals not within {}: fixed point {}, linear {}, VI slack {} ({:?})",
                cfg.optimizer.tol,
                fmt_f64(res.fixed_point),
                fmt_f64(res.linear),
                fmt_f64(res.vi_slack),
                rep.stop
            ),
        ));
    }
    Ok(())
}

fn gradcheck(cfg: &RunConfig, inst: &OcpInstance, out: &Emitter) -> Result<(), Failure> {
    let (du, dv) = gradcheck_directions(&inst.state);
    let rows = gradient_check(&inst.state, (&du, &dv), &cfg.fd_deltas).map_err(solver_err)?;
    out.csv(
        "gradcheck.csv",
        &["delta", "adjoint", "fd", "fd_half", "richardson", "relative_error"],
        rows.iter().map(|r| {
            [r.delta, r.adjoint, r.fd, r.fd_half, r.richardson, r.relative_error]
                .iter()
                .map(|x| fmt_f64(*x))
                .collect()
        }),
    )
    .map_err(output_err)?;
    out.json("diagnostics.json", &json!({ "gradcheck": rows })).map_err(output_err)?;
    let worst = rows.iter().map(|r| r.relative_error).fold(0.0, |m: f64, e| if e.is_nan() { f64::NAN } else { m.max(e) });
    println!("max relative error {}", fmt_f64(worst));
    if !(worst <= GRADCHECK_TOL) {
        return Err(Failure::new(
            FailureKind::Check,
            format!("relative gradient error {} exceeds {GRADCHECK_TOL}", fmt_f64(worst)),
        ));
    }
    Ok(())
}

fn eps_sweep(cfg: &RunConfig, inst: &OcpInstance, out: &Emitter) -> Result<(), Failure> {
    let eps = cfg.eps_levels().map_err(config_err)?;
    let rep = epsilon_continuation(inst, eps, &cfg.optimizer).map_err(config_err)?;
    let d = &rep.diagnostics;
    let blank_first = |v: &[f64], i: usize| if i == 0 { String::new() } else { fmt_f64(v[i - 1]) };
    out.csv(
        "eps.csv",
        &["eps", "cost", "converged", "cost_gap", "control_distance", "sgr_gap", "direction_excess"],
        (0..d.eps.len()).map(|i| {
            vec![
                fmt_f64(d.eps[i]),
                fmt_f64(d.costs[i]),
                d.converged[i].to_string(),
                blank_first(&d.cost_gaps, i),
                blank_first(&d.control_distances, i),
                fmt_f64(d.sgr_gap[i]),
                fmt_f64(d.direction_excess[i]),
            ]
        }),
    )
    .map_err(output_err)?;
    let mut header = vec!["eps"];
    header.extend(COST_HEADER);
    let rows = rep.levels.iter().flat_map(|l| cost_rows(&l.report, &[fmt_f64(l.eps)]));
    out.csv("cost.csv", &header, rows).map_err(output_err)?;
    out.json(
        "diagnostics.json",
        &json!({
            "continuation": d,
            "failure": rep.failure.as_ref().map(ToString::to_string),
        }),
    )
    .map_err(output_err)?;
    if let Some(e) = rep.failure {
        return Err(solver_err(e));
    }
    let bad = d.sgr_gap.iter().chain(&d.direction_excess).any(|x| !(*x <= 1e-12));
    if bad {
        return Err(Failure::new(FailureKind::Check, "ϖ bounds violated"));
    }
    Ok(())
}

fn check(cfg: &RunConfig, out: &Emitter) -> Result<(), Failure> {
    let names: Vec<&str> = if cfg.suites.is_empty() {
        SUITES.to_vec()
    } else {
        cfg.suites.iter().map(String::as_str).collect()
    };
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
        return Err(Failure::new(FailureKind::Config, format!("unknown suite {bad}; expected one of {SUITES:?}")));
    }
    let mut reports = Vec::new();
    for n in names {
        let r = run_suite(n).map_err(solver_err)?;
        println!("{}", r.line());
        reports.push(r);
    }
    out.csv(
        "check.csv",
        &["suite", "title", "passed"],
        reports.iter().map(|r| vec![r.name.clone(), r.title.clone(), r.passed.to_string()]),
    )
    .map_err(output_err)?;
    out.json("diagnostics.json", &json!({ "suites": reports })).map_err(output_err)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(FailureKind::Check, format!("failed suites: {}", failed.join(", "))))
    }
}

/// Path of `meta.json` under `dir`.
pub fn meta_path(dir: &Path) -> PathBuf {
    dir.join("meta.json")
}
