// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Eight subcommands cover the simulator surface: `steady`, `cycle`,
//! `qfunc`, `sweep-eps`, `sweep-delta`, `tongue`, `eopt`, and `selftest`.
//! Physical inputs come from flags, falling back to an optional JSON config
//! file (`--config`), then to built-in defaults; flags always win. Outputs
//! go to `--out` or stdout, as CSV with `#` metadata lines or as a JSON
//! envelope (`--format`), and contain no timestamps or host details, so
//! reruns are byte-identical.
//!
//! Exit codes: 0 success, 1 parameter or configuration error, 2 numerical
//! failure (including flagged sweep cells and selftest failures).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bloch::{steady_state, steady_state_numeric};
use crate::cycle::{simulate_ensemble, EnsembleConfig};
use crate::error::{Result, SqzError};
use crate::io::{
    write_envelope_json, write_grid_csv, write_phase_grid_csv, write_trajectories_csv, CheckRecord,
    Data, Envelope, MetaBlock,
};
use crate::metrics::{epsilon_opt, phase_grid, s_max, OptRoute};
use crate::params::SystemParams;
use crate::selftest::{self, SelftestReport};
use crate::sweep::{sweep_s_vs_delta, sweep_s_vs_eps, tongue, SweepGrid};

/// Runs the CLI on the given argument vector (including the program name)
/// and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help to stdout and errors to stderr on `print`.
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sqzsync: error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("sqzsync:   caused by: {s}");
                source = s.source();
            }
            if e.is_usage() {
                1
            } else {
                2
            }
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sqzsync",
    version,
    about = "Phase synchronization of a driven two-level system in a squeezed thermal reservoir",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Steady state of the dissipative Bloch dynamics with its
    /// synchronization summary (JSON)
    Steady(SteadyArgs),
    /// Ensemble of angular trajectories converging onto the limit cycle,
    /// with planar projection (CSV)
    Cycle(CycleArgs),
    /// Husimi Q distribution of the steady state on an angular grid (CSV)
    Qfunc(QfuncArgs),
    /// Synchronization measure S(phi) versus drive strength (CSV)
    SweepEps(SweepEpsArgs),
    /// Synchronization measure S(phi) versus detuning (CSV)
    SweepDelta(SweepDeltaArgs),
    /// Synchronization tongue: S_max over the (eps, delta) plane (CSV)
    Tongue(TongueArgs),
    /// Optimal drive strength maximizing S_max (JSON)
    Eopt(SteadyArgs),
    /// Built-in invariant suite (text report; JSON with --format json)
    Selftest(SelftestArgs),
}

/// Output format of a subcommand.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// Physical inputs plus output controls shared by every subcommand.
#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Thermal occupation n >= 0 of the reservoir
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// Squeezing strength r >= 0 of the reservoir
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Squeezing angle Phi in radians (normalized into [0, 2pi))
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Detuning Delta between the drive and the level splitting
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Drive strength eps >= 0
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Rate unit gamma0 > 0; all rates are quoted in these units
    #[arg(long, allow_negative_numbers = true)]
    gamma0: Option<f64>,
    /// JSON file with default values for any flag of this command
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format (each command has a natural default)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct SteadyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CycleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of trajectories
    #[arg(long)]
    count: Option<usize>,
    /// Seed for the uniform initial-state sampler
    #[arg(long)]
    seed: Option<u64>,
    /// Integration horizon
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    /// Fixed integration step
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Free precession frequency of the undriven azimuth
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
}

#[derive(Args, Debug)]
struct QfuncArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Polar nodes over [0, pi], endpoints included
    #[arg(long)]
    n_theta: Option<usize>,
    /// Azimuthal nodes over [0, 2pi), endpoint excluded
    #[arg(long)]
    n_phi: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepEpsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Smallest drive strength of the sweep
    #[arg(long, allow_negative_numbers = true)]
    eps_min: Option<f64>,
    /// Largest drive strength of the sweep
    #[arg(long, allow_negative_numbers = true)]
    eps_max: Option<f64>,
    /// Number of drive-strength nodes
    #[arg(long)]
    n_eps: Option<usize>,
    /// Azimuthal nodes over [0, 2pi)
    #[arg(long)]
    n_phi: Option<usize>,
    /// Worker threads (default: available cores)
    #[arg(long, env = "SQZSYNC_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepDeltaArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Smallest detuning of the sweep
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    /// Largest detuning of the sweep
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Number of detuning nodes
    #[arg(long)]
    n_delta: Option<usize>,
    /// Azimuthal nodes over [0, 2pi)
    #[arg(long)]
    n_phi: Option<usize>,
    /// Worker threads (default: available cores)
    #[arg(long, env = "SQZSYNC_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct TongueArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Smallest drive strength
    #[arg(long, allow_negative_numbers = true)]
    eps_min: Option<f64>,
    /// Largest drive strength
    #[arg(long, allow_negative_numbers = true)]
    eps_max: Option<f64>,
    /// Number of drive-strength nodes
    #[arg(long)]
    n_eps: Option<usize>,
    /// Smallest detuning
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    /// Largest detuning
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    /// Number of detuning nodes
    #[arg(long)]
    n_delta: Option<usize>,
    /// Worker threads (default: available cores)
    #[arg(long, env = "SQZSYNC_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Output file (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format (text report by default)
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Optional JSON config file mirroring the flag names of every subcommand.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<f64>,
    r: Option<f64>,
    phi: Option<f64>,
    delta: Option<f64>,
    eps: Option<f64>,
    gamma0: Option<f64>,
    count: Option<usize>,
    seed: Option<u64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    omega0: Option<f64>,
    n_theta: Option<usize>,
    n_phi: Option<usize>,
    eps_min: Option<f64>,
    eps_max: Option<f64>,
    n_eps: Option<usize>,
    delta_min: Option<f64>,
    delta_max: Option<f64>,
    n_delta: Option<usize>,
    workers: Option<usize>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| SqzError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| SqzError::Config(format!("cannot parse {}: {e}", path.display())))
}

fn resolve_params(c: &CommonArgs, f: &FileConfig) -> Result<SystemParams> {
    SystemParams::with_gamma0(
        c.n.or(f.n).unwrap_or(0.0),
        c.r.or(f.r).unwrap_or(0.0),
        c.phi.or(f.phi).unwrap_or(0.0),
        c.delta.or(f.delta).unwrap_or(0.0),
        c.eps.or(f.eps).unwrap_or(0.0),
        c.gamma0.or(f.gamma0).unwrap_or(1.0),
    )
}

fn pick<T: Copy>(flag: Option<T>, cfg: Option<T>, def: T) -> T {
    flag.or(cfg).unwrap_or(def)
}

fn resolve_workers(flag: Option<usize>, cfg: Option<usize>) -> usize {
    flag.or(cfg).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    })
}

fn with_output(out: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn json_only(format: Option<Format>, command: &str) -> Result<()> {
    if format == Some(Format::Csv) {
        return Err(SqzError::Config(format!(
            "{command} emits a JSON envelope; CSV is not available here"
        )));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Steady(a) => cmd_steady(a),
        Cmd::Cycle(a) => cmd_cycle(a),
        Cmd::Qfunc(a) => cmd_qfunc(a),
        Cmd::SweepEps(a) => cmd_sweep_eps(a),
        Cmd::SweepDelta(a) => cmd_sweep_delta(a),
        Cmd::Tongue(a) => cmd_tongue(a),
        Cmd::Eopt(a) => cmd_eopt(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    }
}

fn cmd_steady(a: SteadyArgs) -> Result<i32> {
    json_only(a.common.format, "steady")?;
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let state = steady_state(&p)?;
    let numeric = steady_state_numeric(&p)?;
    let peak = s_max(&state);
    let env = Envelope::new(
        "steady",
        &p,
        Data::Steady {
            state,
            numeric,
            route_agreement: state.max_abs_diff(&numeric),
            s_max: peak.value,
            phi_star: peak.phi_star,
            no_preference: peak.no_preference,
            husimi_peak: (1.0 + state.norm()) / (4.0 * std::f64::consts::PI),
        },
    );
    with_output(a.common.out.as_deref(), |w| write_envelope_json(w, &env))?;
    Ok(0)
}

fn cmd_eopt(a: SteadyArgs) -> Result<i32> {
    json_only(a.common.format, "eopt")?;
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let opt = epsilon_opt(&p)?;
    let env = Envelope::new(
        "eopt",
        &p,
        Data::EpsilonOpt {
            eps: opt.eps,
            s_max: opt.s_max,
            route: match opt.route {
                OptRoute::Closed => "closed".to_string(),
                OptRoute::Numeric => "numeric".to_string(),
            },
        },
    );
    with_output(a.common.out.as_deref(), |w| write_envelope_json(w, &env))?;
    Ok(0)
}

fn cmd_cycle(a: CycleArgs) -> Result<i32> {
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let ec = EnsembleConfig {
        count: pick(a.count, cfg.count, 200),
        seed: pick(a.seed, cfg.seed, 42),
        t_end: pick(a.t_end, cfg.t_end, 20.0),
        dt: pick(a.dt, cfg.dt, 0.01),
        omega0: pick(a.omega0, cfg.omega0, 0.0),
    };
    if ec.count == 0 {
        return Err(SqzError::InvalidParam {
            field: "count",
            value: 0.0,
            reason: "ensemble needs at least one trajectory",
        });
    }
    let run = simulate_ensemble(&p, &ec)?;
    let clamped = run.paths.iter().filter(|path| path.clamped).count();
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut meta = MetaBlock::new("cycle");
            meta.push_params(&p);
            meta.push("seed", ec.seed);
            meta.push("count", ec.count);
            meta.push_f64("t_end", ec.t_end);
            meta.push_f64("dt", ec.dt);
            meta.push_f64("omega0", ec.omega0);
            meta.push("clamped_paths", clamped);
            with_output(a.common.out.as_deref(), |w| {
                write_trajectories_csv(w, &meta, &run)
            })?;
        }
        Format::Json => {
            let env = Envelope::new(
                "cycle",
                &p,
                Data::from_ensemble(&run, ec.dt, ec.t_end, ec.omega0),
            );
            with_output(a.common.out.as_deref(), |w| write_envelope_json(w, &env))?;
        }
    }
    Ok(0)
}

fn cmd_qfunc(a: QfuncArgs) -> Result<i32> {
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let n_theta = pick(a.n_theta, cfg.n_theta, 181);
    let n_phi = pick(a.n_phi, cfg.n_phi, 361);
    let state = steady_state(&p)?;
    let grid = phase_grid(&state, n_theta, n_phi)?;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let peak = s_max(&state);
            let mut meta = MetaBlock::new("qfunc");
            meta.push_params(&p);
            meta.push("n_theta", n_theta);
            meta.push("n_phi", n_phi);
            meta.push_f64("state_x", state.x);
            meta.push_f64("state_y", state.y);
            meta.push_f64("state_z", state.z);
            meta.push_f64("s_max", peak.value);
            meta.push_f64("phi_star", peak.phi_star);
            with_output(a.common.out.as_deref(), |w| {
                write_phase_grid_csv(w, &meta, &grid)
            })?;
        }
        Format::Json => {
            let env = Envelope::new("qfunc", &p, Data::from_phase_grid(&grid));
            with_output(a.common.out.as_deref(), |w| write_envelope_json(w, &env))?;
        }
    }
    Ok(0)
}

/// Writes a sweep result in the requested format and converts flagged cells
/// into a warning plus exit code 2.
fn emit_sweep(
    command: &str,
    p: &SystemParams,
    grid: &SweepGrid,
    extra_meta: &[(&str, String)],
    out: Option<&Path>,
    format: Format,
) -> Result<i32> {
    match format {
        Format::Csv => {
            let mut meta = MetaBlock::new(command);
            meta.push_params(p);
            meta.push("x_name", grid.x.name);
            meta.push_f64("x_min", grid.x.values[0]);
            meta.push_f64("x_max", *grid.x.values.last().expect("non-empty axis"));
            meta.push("x_count", grid.x.len());
            meta.push("y_name", grid.y.name);
            meta.push_f64("y_min", grid.y.values[0]);
            meta.push_f64("y_max", *grid.y.values.last().expect("non-empty axis"));
            meta.push("y_count", grid.y.len());
            for (k, v) in extra_meta {
                meta.push(k, v);
            }
            meta.push_flags(&grid.flagged);
            with_output(out, |w| write_grid_csv(w, &meta, grid))?;
        }
        Format::Json => {
            let env = Envelope::new(command, p, Data::from_sweep(grid));
            with_output(out, |w| write_envelope_json(w, &env))?;
        }
    }
    if grid.flagged.is_empty() {
        Ok(0)
    } else {
        eprintln!(
            "sqzsync: warning: {} cells disagree between the analytic and numeric \
             steady-state routes; see the flagged metadata",
            grid.flagged.len()
        );
        Ok(2)
    }
}

fn cmd_sweep_eps(a: SweepEpsArgs) -> Result<i32> {
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let eps_min = pick(a.eps_min, cfg.eps_min, 0.0);
    let eps_max = pick(a.eps_max, cfg.eps_max, 4.0);
    let n_eps = pick(a.n_eps, cfg.n_eps, 200);
    let n_phi = pick(a.n_phi, cfg.n_phi, 256);
    let workers = resolve_workers(a.workers, cfg.workers);
    let grid = sweep_s_vs_eps(&p, eps_min, eps_max, n_eps, n_phi, workers)?;
    emit_sweep(
        "sweep-eps",
        &p,
        &grid,
        &[("n_phi", n_phi.to_string())],
        a.common.out.as_deref(),
        a.common.format.unwrap_or(Format::Csv),
    )
}

fn cmd_sweep_delta(a: SweepDeltaArgs) -> Result<i32> {
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let delta_min = pick(a.delta_min, cfg.delta_min, -4.0);
    let delta_max = pick(a.delta_max, cfg.delta_max, 4.0);
    let n_delta = pick(a.n_delta, cfg.n_delta, 200);
    let n_phi = pick(a.n_phi, cfg.n_phi, 256);
    let workers = resolve_workers(a.workers, cfg.workers);
    let grid = sweep_s_vs_delta(&p, delta_min, delta_max, n_delta, n_phi, workers)?;
    emit_sweep(
        "sweep-delta",
        &p,
        &grid,
        &[("n_phi", n_phi.to_string())],
        a.common.out.as_deref(),
        a.common.format.unwrap_or(Format::Csv),
    )
}

fn cmd_tongue(a: TongueArgs) -> Result<i32> {
    let cfg = load_config(a.common.config.as_deref())?;
    let p = resolve_params(&a.common, &cfg)?;
    let eps_min = pick(a.eps_min, cfg.eps_min, 0.0);
    let eps_max = pick(a.eps_max, cfg.eps_max, 4.0);
    let n_eps = pick(a.n_eps, cfg.n_eps, 100);
    let delta_min = pick(a.delta_min, cfg.delta_min, -2.0);
    let delta_max = pick(a.delta_max, cfg.delta_max, 2.0);
    let n_delta = pick(a.n_delta, cfg.n_delta, 101);
    let workers = resolve_workers(a.workers, cfg.workers);
    let grid = tongue(
        &p, eps_min, eps_max, n_eps, delta_min, delta_max, n_delta, workers,
    )?;
    emit_sweep(
        "tongue",
        &p,
        &grid,
        &[],
        a.common.out.as_deref(),
        a.common.format.unwrap_or(Format::Csv),
    )
}

fn cmd_selftest(a: SelftestArgs) -> Result<i32> {
    if a.format == Some(Format::Csv) {
        return Err(SqzError::Config(
            "selftest emits a text report by default or a JSON envelope with \
             --format json; CSV is not available here"
                .to_string(),
        ));
    }
    let report = selftest::run();
    match a.format {
        Some(Format::Json) => {
            let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0).expect("defaults are valid");
            let env = Envelope::new(
                "selftest",
                &p,
                Data::Selftest {
                    passed: report.passed(),
                    failed: report.failed(),
                    checks: report
                        .checks
                        .iter()
                        .map(|c| CheckRecord {
                            name: c.name.to_string(),
                            pass: c.pass,
                            detail: c.detail.clone(),
                        })
                        .collect(),
                    findings: report.findings.clone(),
                },
            );
            with_output(a.out.as_deref(), |w| write_envelope_json(w, &env))?;
        }
        _ => {
            with_output(a.out.as_deref(), |w| render_selftest_text(w, &report))?;
        }
    }
    Ok(if report.all_passed() { 0 } else { 2 })
}

fn render_selftest_text(w: &mut dyn Write, report: &SelftestReport) -> Result<()> {
    for c in &report.checks {
        writeln!(
            w,
            "{} {}: {}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        )?;
    }
    for f in &report.findings {
        writeln!(w, "note {f}")?;
    }
    writeln!(
        w,
        "selftest: {} checks, {} failed",
        report.checks.len(),
        report.failed()
    )?;
    Ok(())
}
