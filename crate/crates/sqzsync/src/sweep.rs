// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic parameter sweeps of the synchronization measure.
//!
//! Every sweep evaluates steady states through both the closed form and the
//! linear solve; cells where the routes disagree beyond [`ROUTE_TOL`] are
//! flagged rather than silently accepted. Columns are distributed over a
//! dedicated rayon pool and reassembled in index order, so results are
//! bitwise identical for any worker count.

use rayon::prelude::*;

use crate::bloch::{steady_state_analytic, steady_state_numeric};
use crate::error::{Result, SqzError};
use crate::metrics::{s_max, sync_measure};
use crate::params::SystemParams;
use crate::state::BlochVector;

/// Component-wise agreement required between the analytic and numeric
/// steady-state routes before a cell is flagged.
pub const ROUTE_TOL: f64 = 1e-6;

/// Named coordinate axis of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values over `[min, max]`, both ends included.
    pub fn linspace(name: &'static str, min: f64, max: f64, count: usize) -> Result<Axis> {
        if count < 2 {
            return Err(SqzError::InvalidParam {
                field: "count",
                value: count as f64,
                reason: "axis needs at least 2 nodes",
            });
        }
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(SqzError::InvalidParam {
                field: "range",
                value: min,
                reason: "axis range must be finite with min < max",
            });
        }
        // Lerp form: endpoints are hit exactly, and symmetric ranges get an
        // exactly antisymmetric node set (with an exact zero at the center),
        // which keeps parity checks on swept grids sharp.
        let denom = (count - 1) as f64;
        Ok(Axis {
            name,
            values: (0..count)
                .map(|i| (min * (denom - i as f64) + max * i as f64) / denom)
                .collect(),
        })
    }

    /// `count` azimuthal nodes over `[0, 2 pi)`, endpoint excluded.
    pub fn periodic(name: &'static str, count: usize) -> Result<Axis> {
        if count < 4 {
            return Err(SqzError::InvalidParam {
                field: "count",
                value: count as f64,
                reason: "periodic axis needs at least 4 nodes",
            });
        }
        let step = 2.0 * std::f64::consts::PI / count as f64;
        Ok(Axis {
            name,
            values: (0..count).map(|i| i as f64 * step).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Rectangular sweep result: `values[iy][ix]` belongs to
/// `(x.values[ix], y.values[iy])`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub x: Axis,
    pub y: Axis,
    pub values: Vec<Vec<f64>>,
    /// `(iy, ix)` cells where the two steady-state routes disagreed beyond
    /// [`ROUTE_TOL`], in row-major order.
    pub flagged: Vec<(usize, usize)>,
}

impl SweepGrid {
    /// Indices and value of the grid maximum (first occurrence wins).
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0usize, 0usize, f64::NEG_INFINITY);
        for (iy, row) in self.values.iter().enumerate() {
            for (ix, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (iy, ix, v);
                }
            }
        }
        best
    }
}

/// Steady state via both routes: the preferred value plus the other route's
/// result when available.
fn steady_both(p: &SystemParams) -> Result<(BlochVector, Option<BlochVector>)> {
    match steady_state_analytic(p) {
        Ok(a) => Ok((a, Some(steady_state_numeric(p)?))),
        Err(SqzError::DegenerateDenominator) => Ok((steady_state_numeric(p)?, None)),
        Err(e) => Err(e),
    }
}

fn run_pool<T: Send>(workers: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return Err(SqzError::InvalidParam {
            field: "workers",
            value: 0.0,
            reason: "worker count must be >= 1",
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SqzError::Io(std::io::Error::other(e)))?;
    pool.install(job)
}

fn cell_err(x: f64, y: f64, e: SqzError) -> SqzError {
    SqzError::SweepCell {
        x,
        y,
        source: Box::new(e),
    }
}

/// `S(phi)` of the steady state as the drive strength varies.
///
/// x axis: `eps` over `[eps_min, eps_max]` with `n_eps` nodes; y axis: `phi`
/// with `n_phi` periodic nodes.
pub fn sweep_s_vs_eps(
    p: &SystemParams,
    eps_min: f64,
    eps_max: f64,
    n_eps: usize,
    n_phi: usize,
    workers: usize,
) -> Result<SweepGrid> {
    if eps_min < 0.0 {
        return Err(SqzError::InvalidParam {
            field: "eps_min",
            value: eps_min,
            reason: "drive strength must be >= 0",
        });
    }
    let x = Axis::linspace("eps", eps_min, eps_max, n_eps)?;
    let y = Axis::periodic("phi", n_phi)?;
    let base = *p;
    let columns = run_pool(workers, || {
        x.values
            .par_iter()
            .map(|&eps| {
                let pc = base.with_eps(eps).map_err(|e| cell_err(eps, f64::NAN, e))?;
                column_s_of_phi(&pc, eps, &y.values)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble_from_columns(x, y, columns))
}

/// `S(phi)` of the steady state as the detuning varies.
///
/// x axis: `delta` over `[delta_min, delta_max]`; y axis: `phi`.
pub fn sweep_s_vs_delta(
    p: &SystemParams,
    delta_min: f64,
    delta_max: f64,
    n_delta: usize,
    n_phi: usize,
    workers: usize,
) -> Result<SweepGrid> {
    let x = Axis::linspace("delta", delta_min, delta_max, n_delta)?;
    let y = Axis::periodic("phi", n_phi)?;
    let base = *p;
    let columns = run_pool(workers, || {
        x.values
            .par_iter()
            .map(|&delta| {
                let pc = base
                    .with_delta(delta)
                    .map_err(|e| cell_err(delta, f64::NAN, e))?;
                column_s_of_phi(&pc, delta, &y.values)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(assemble_from_columns(x, y, columns))
}

/// Synchronization tongue: `S_max` of the steady state over the
/// `(eps, delta)` plane. x axis: `eps`; y axis: `delta`.
// The argument list mirrors the CLI flags one-to-one.
#[allow(clippy::too_many_arguments)]
pub fn tongue(
    p: &SystemParams,
    eps_min: f64,
    eps_max: f64,
    n_eps: usize,
    delta_min: f64,
    delta_max: f64,
    n_delta: usize,
    workers: usize,
) -> Result<SweepGrid> {
    if eps_min < 0.0 {
        return Err(SqzError::InvalidParam {
            field: "eps_min",
            value: eps_min,
            reason: "drive strength must be >= 0",
        });
    }
    let x = Axis::linspace("eps", eps_min, eps_max, n_eps)?;
    let y = Axis::linspace("delta", delta_min, delta_max, n_delta)?;
    let base = *p;
    let rows = run_pool(workers, || {
        y.values
            .par_iter()
            .map(|&delta| {
                let mut row = Vec::with_capacity(x.values.len());
                let mut flags = Vec::new();
                for (ix, &eps) in x.values.iter().enumerate() {
                    let pc = base
                        .with_delta(delta)
                        .and_then(|q| q.with_eps(eps))
                        .map_err(|e| cell_err(eps, delta, e))?;
                    let (used, other) = steady_both(&pc).map_err(|e| cell_err(eps, delta, e))?;
                    let value = s_max(&used).value;
                    if let Some(o) = other {
                        if (value - s_max(&o).value).abs() > ROUTE_TOL {
                            flags.push(ix);
                        }
                    }
                    row.push(value);
                }
                Ok((row, flags))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut values = Vec::with_capacity(rows.len());
    let mut flagged = Vec::new();
    for (iy, (row, flags)) in rows.into_iter().enumerate() {
        values.push(row);
        flagged.extend(flags.into_iter().map(|ix| (iy, ix)));
    }
    flagged.sort_unstable();
    Ok(SweepGrid {
        x,
        y,
        values,
        flagged,
    })
}

/// One sweep column: `S(phi)` for every `phi`, plus the row indices where
/// the two steady-state routes disagree.
fn column_s_of_phi(p: &SystemParams, x_coord: f64, phis: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    let (used, other) = steady_both(p).map_err(|e| cell_err(x_coord, f64::NAN, e))?;
    let mut col = Vec::with_capacity(phis.len());
    let mut flags = Vec::new();
    for (iy, &phi) in phis.iter().enumerate() {
        let value = sync_measure(&used, phi);
        if let Some(o) = other {
            if (value - sync_measure(&o, phi)).abs() > ROUTE_TOL {
                flags.push(iy);
            }
        }
        col.push(value);
    }
    Ok((col, flags))
}

fn assemble_from_columns(x: Axis, y: Axis, columns: Vec<(Vec<f64>, Vec<usize>)>) -> SweepGrid {
    let mut values = vec![vec![0.0; x.len()]; y.len()];
    let mut flagged = Vec::new();
    for (ix, (col, flags)) in columns.into_iter().enumerate() {
        for (iy, v) in col.into_iter().enumerate() {
            values[iy][ix] = v;
        }
        flagged.extend(flags.into_iter().map(|iy| (iy, ix)));
    }
    flagged.sort_unstable();
    SweepGrid {
        x,
        y,
        values,
        flagged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::steady_state;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn params(n: f64, r: f64) -> SystemParams {
        SystemParams::new(n, r, 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn linspace_axis_hits_both_endpoints() {
        let a = Axis::linspace("eps", 0.0, 4.0, 100).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a.values[0], 0.0);
        assert_relative_eq!(a.values[99], 4.0, max_relative = 1e-15);
        let d = Axis::linspace("delta", -2.0, 2.0, 101).unwrap();
        assert_eq!(d.values[50], 0.0);
        assert!(Axis::linspace("x", 0.0, 1.0, 1).is_err());
        assert!(Axis::linspace("x", 1.0, 0.0, 5).is_err());
        assert!(Axis::linspace("x", 0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn periodic_axis_excludes_the_endpoint() {
        let a = Axis::periodic("phi", 256).unwrap();
        assert_eq!(a.len(), 256);
        assert_eq!(a.values[0], 0.0);
        assert!(*a.values.last().unwrap() < 2.0 * PI);
        assert!(Axis::periodic("phi", 3).is_err());
    }

    #[test]
    fn eps_sweep_matches_direct_evaluation() {
        let p = params(0.0, 1.5);
        let grid = sweep_s_vs_eps(&p, 0.0, 2.0, 5, 8, 2).unwrap();
        assert_eq!(grid.values.len(), 8);
        assert_eq!(grid.values[0].len(), 5);
        assert!(grid.flagged.is_empty());
        // eps = 0 column is identically zero: no drive, no phase preference.
        for row in &grid.values {
            assert_eq!(row[0], 0.0);
        }
        // Spot-check an interior cell against a direct computation.
        let eps = grid.x.values[3];
        let phi = grid.y.values[5];
        let v = steady_state(&p.with_eps(eps).unwrap()).unwrap();
        assert_relative_eq!(
            grid.values[5][3],
            sync_measure(&v, phi),
            max_relative = 1e-14
        );
    }

    #[test]
    fn delta_sweep_matches_direct_evaluation() {
        let p = SystemParams::new(1.0, 0.5, 0.0, 0.0, 0.7).unwrap();
        let grid = sweep_s_vs_delta(&p, -2.0, 2.0, 9, 8, 2).unwrap();
        assert!(grid.flagged.is_empty());
        let delta = grid.x.values[2];
        let phi = grid.y.values[7];
        let v = steady_state(&p.with_delta(delta).unwrap()).unwrap();
        assert_relative_eq!(
            grid.values[7][2],
            sync_measure(&v, phi),
            max_relative = 1e-14
        );
    }

    #[test]
    fn tongue_is_even_in_detuning_without_squeezing_phase() {
        let p = params(1.0, 0.8);
        let grid = tongue(&p, 0.0, 2.0, 6, -1.0, 1.0, 11, 2).unwrap();
        assert!(grid.flagged.is_empty());
        let ny = grid.y.len();
        for iy in 0..ny {
            for ix in 0..grid.x.len() {
                let a = grid.values[iy][ix];
                let b = grid.values[ny - 1 - iy][ix];
                assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "parity violated at iy={iy} ix={ix}"
                );
            }
        }
        // No drive means no synchronization anywhere along eps = 0.
        for iy in 0..ny {
            assert_eq!(grid.values[iy][0], 0.0);
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let p = params(0.5, 1.0);
        let one = tongue(&p, 0.0, 3.0, 7, -1.5, 1.5, 9, 1).unwrap();
        let four = tongue(&p, 0.0, 3.0, 7, -1.5, 1.5, 9, 4).unwrap();
        assert_eq!(one, four);
        let a = sweep_s_vs_eps(&p, 0.0, 2.0, 11, 16, 1).unwrap();
        let b = sweep_s_vs_eps(&p, 0.0, 2.0, 11, 16, 3).unwrap();
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (va, vb) in ra.iter().zip(rb) {
                assert_eq!(va.to_bits(), vb.to_bits());
            }
        }
    }

    #[test]
    fn argmax_reports_first_maximum_deterministically() {
        let p = params(1.0, 1.5);
        let grid = tongue(&p, 0.0, 3.0, 31, -1.0, 1.0, 21, 2).unwrap();
        let (iy, ix, val) = grid.argmax();
        assert!(val > 0.0);
        for row in &grid.values {
            for &v in row {
                assert!(v <= val);
            }
        }
        // The squeezed-thermal ridge peaks on resonance.
        assert_eq!(grid.y.values[iy], 0.0);
        assert!(grid.x.values[ix] > 0.0);
    }

    #[test]
    fn invalid_requests_are_rejected() {
        let p = params(0.0, 0.0);
        assert!(sweep_s_vs_eps(&p, -0.5, 2.0, 5, 8, 1).is_err());
        assert!(sweep_s_vs_eps(&p, 0.0, 2.0, 5, 8, 0).is_err());
        assert!(tongue(&p, 0.0, 2.0, 1, -1.0, 1.0, 5, 1).is_err());
        assert!(tongue(&p, -1.0, 2.0, 5, -1.0, 1.0, 5, 1).is_err());
    }
}
