// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic CSV and JSON output.
//!
//! Every artifact embeds the tool name, version, command, physical inputs,
//! and derived reservoir quantities, and nothing else: no timestamps, paths,
//! or worker counts, so repeated runs produce byte-identical files. Floats
//! are printed with the shortest representation that parses back to the
//! same bits; CSV uses LF line endings on every platform.

use std::fmt::Display;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cycle::{steady_theta, EnsembleRun};
use crate::error::Result;
use crate::metrics::PhaseGrid;
use crate::params::{squeeze_db, SystemParams};
use crate::state::BlochVector;
use crate::sweep::SweepGrid;

/// Flagged-cell lists longer than this are truncated in CSV metadata
/// (the count line always carries the full number).
const MAX_FLAG_LINES: usize = 100;

/// Formats a float with the shortest digits that round-trip exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Top-level JSON artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: SystemParams,
    pub derived: Derived,
    pub data: Data,
}

impl Envelope {
    pub fn new(command: &str, p: &SystemParams, data: Data) -> Self {
        Envelope {
            tool: "sqzsync".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params: *p,
            derived: Derived::from_params(p),
            data,
        }
    }
}

/// Reservoir quantities derived from the inputs, repeated in every artifact
/// so downstream tooling never has to recompute them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub n_eff: f64,
    pub m_re: f64,
    pub m_im: f64,
    pub gamma: f64,
    pub theta_s: f64,
    pub r_s: f64,
    pub squeeze_db: f64,
}

impl Derived {
    pub fn from_params(p: &SystemParams) -> Self {
        let res = p.reservoir();
        let theta_s = steady_theta(res.n_eff);
        Derived {
            n_eff: res.n_eff,
            m_re: res.m.re,
            m_im: res.m.im,
            gamma: res.gamma,
            theta_s,
            r_s: 0.5 * (1.0 + theta_s.cos()),
            squeeze_db: squeeze_db(p.r),
        }
    }
}

/// Command-specific payload of an [`Envelope`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Data {
    /// Steady state with its synchronization summary.
    Steady {
        state: BlochVector,
        numeric: BlochVector,
        route_agreement: f64,
        s_max: f64,
        phi_star: f64,
        no_preference: bool,
        husimi_peak: f64,
    },
    /// Optimal drive strength.
    EpsilonOpt { eps: f64, s_max: f64, route: String },
    /// Rectangular grid of values over two named axes;
    /// `values[iy][ix]` belongs to `(x[ix], y[iy])`.
    Grid {
        x_name: String,
        x: Vec<f64>,
        y_name: String,
        y: Vec<f64>,
        values: Vec<Vec<f64>>,
        flagged: Vec<(usize, usize)>,
    },
    /// Ensemble of angular trajectories.
    Ensemble {
        seed: Option<u64>,
        dt: f64,
        t_end: f64,
        omega0: f64,
        times: Vec<f64>,
        paths: Vec<PathRecord>,
    },
    /// Invariant-suite report.
    Selftest {
        passed: usize,
        failed: usize,
        checks: Vec<CheckRecord>,
        findings: Vec<String>,
    },
}

impl Data {
    /// Converts a sweep result into the grid payload.
    pub fn from_sweep(grid: &SweepGrid) -> Self {
        Data::Grid {
            x_name: grid.x.name.to_string(),
            x: grid.x.values.clone(),
            y_name: grid.y.name.to_string(),
            y: grid.y.values.clone(),
            values: grid.values.clone(),
            flagged: grid.flagged.clone(),
        }
    }

    /// Converts a Husimi grid into the grid payload (`x = theta`,
    /// `y = phi`; the stored rows are transposed to the `values[iy][ix]`
    /// convention).
    pub fn from_phase_grid(grid: &PhaseGrid) -> Self {
        let values = (0..grid.phi.len())
            .map(|j| grid.values.iter().map(|row| row[j]).collect())
            .collect();
        Data::Grid {
            x_name: "theta".to_string(),
            x: grid.theta.clone(),
            y_name: "phi".to_string(),
            y: grid.phi.clone(),
            values,
            flagged: Vec::new(),
        }
    }

    /// Converts an ensemble run into the trajectory payload.
    pub fn from_ensemble(run: &EnsembleRun, dt: f64, t_end: f64, omega0: f64) -> Self {
        Data::Ensemble {
            seed: run.seed,
            dt,
            t_end,
            omega0,
            times: run.times.clone(),
            paths: run
                .paths
                .iter()
                .map(|p| PathRecord {
                    theta0: p.initial.theta,
                    phi0: p.initial.phi,
                    clamped: p.clamped,
                    theta: p.angles.iter().map(|s| s.theta).collect(),
                    phi: p.angles.iter().map(|s| s.phi).collect(),
                })
                .collect(),
        }
    }
}

/// One trajectory inside [`Data::Ensemble`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub theta0: f64,
    pub phi0: f64,
    pub clamped: bool,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

/// One selftest check inside [`Data::Selftest`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Writes an envelope as pretty-printed JSON with a trailing newline.
pub fn write_envelope_json(w: &mut dyn Write, env: &Envelope) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, env)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Ordered `key = value` metadata rendered as `#` comment lines ahead of
/// CSV data.
#[derive(Clone, Debug, Default)]
pub struct MetaBlock {
    pairs: Vec<(String, String)>,
}

impl MetaBlock {
    /// Starts a block with tool, version, and command lines.
    pub fn new(command: &str) -> Self {
        let mut block = MetaBlock::default();
        block.push("tool", "sqzsync");
        block.push("version", env!("CARGO_PKG_VERSION"));
        block.push("command", command);
        block
    }

    /// Appends one key/value line.
    pub fn push(&mut self, key: &str, value: impl Display) {
        self.pairs.push((key.to_string(), value.to_string()));
    }

    /// Appends a float with round-trip formatting.
    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, fmt_f64(value));
    }

    /// Appends the physical inputs and derived reservoir quantities.
    pub fn push_params(&mut self, p: &SystemParams) {
        self.push_f64("n", p.n);
        self.push_f64("r", p.r);
        self.push_f64("phi", p.phi);
        self.push_f64("delta", p.delta);
        self.push_f64("eps", p.eps);
        self.push_f64("gamma0", p.gamma0);
        let d = Derived::from_params(p);
        self.push_f64("n_eff", d.n_eff);
        self.push_f64("m_re", d.m_re);
        self.push_f64("m_im", d.m_im);
        self.push_f64("gamma", d.gamma);
        self.push_f64("theta_s", d.theta_s);
        self.push_f64("r_s", d.r_s);
        self.push_f64("squeeze_db", d.squeeze_db);
    }

    /// Appends flagged-cell information for a sweep.
    pub fn push_flags(&mut self, flagged: &[(usize, usize)]) {
        self.push("flagged_cells", flagged.len());
        if !flagged.is_empty() {
            let mut list: Vec<String> = flagged
                .iter()
                .take(MAX_FLAG_LINES)
                .map(|(iy, ix)| format!("{iy}:{ix}"))
                .collect();
            if flagged.len() > MAX_FLAG_LINES {
                list.push("...".to_string());
            }
            self.push("flagged", list.join(";"));
        }
    }

    fn write(&self, w: &mut dyn Write) -> Result<()> {
        for (k, v) in &self.pairs {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// Writes a sweep grid as long-format CSV: metadata, a
/// `<x>,<y>,value` header, then one row per cell (y-major).
pub fn write_grid_csv(w: &mut dyn Write, meta: &MetaBlock, grid: &SweepGrid) -> Result<()> {
    meta.write(w)?;
    writeln!(w, "{},{},value", grid.x.name, grid.y.name)?;
    for (iy, row) in grid.values.iter().enumerate() {
        for (ix, &v) in row.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(grid.x.values[ix]),
                fmt_f64(grid.y.values[iy]),
                fmt_f64(v)
            )?;
        }
    }
    Ok(())
}

/// Writes a Husimi grid as long-format CSV with a `theta,phi,value` header
/// (theta-major rows).
pub fn write_phase_grid_csv(w: &mut dyn Write, meta: &MetaBlock, grid: &PhaseGrid) -> Result<()> {
    meta.write(w)?;
    writeln!(w, "theta,phi,value")?;
    for (i, row) in grid.values.iter().enumerate() {
        for (j, &q) in row.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_f64(grid.theta[i]),
                fmt_f64(grid.phi[j]),
                fmt_f64(q)
            )?;
        }
    }
    Ok(())
}

/// Writes ensemble trajectories as long-format CSV with a
/// `path,t,theta,phi,x,y` header; `x, y` are the planar projection.
pub fn write_trajectories_csv(
    w: &mut dyn Write,
    meta: &MetaBlock,
    run: &EnsembleRun,
) -> Result<()> {
    meta.write(w)?;
    writeln!(w, "path,t,theta,phi,x,y")?;
    for (idx, path) in run.paths.iter().enumerate() {
        for (s, (t, (x, y))) in path.angles.iter().zip(run.times.iter().zip(path.points())) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                idx,
                fmt_f64(*t),
                fmt_f64(s.theta),
                fmt_f64(s.phi),
                fmt_f64(x),
                fmt_f64(y)
            )?;
        }
    }
    Ok(())
}
