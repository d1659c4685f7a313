// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulator for phase synchronization of a driven two-level system relaxing
//! into a squeezed thermal reservoir.
//!
//! The crate models a spin-1/2 driven by a weak near-resonant signal while
//! dissipating into a broadband reservoir with thermal occupation `n` and
//! squeezing `(r, Phi)`. It provides:
//!
//! * closed-form and numeric steady states of the dissipative Bloch dynamics
//!   ([`bloch`]),
//! * limit-cycle geometry and stochastic-free angular trajectories of the
//!   undriven and driven system ([`cycle`]),
//! * Husimi `Q` distributions, the phase-synchronization measure `S(phi)`,
//!   and the optimal drive strength ([`metrics`]),
//! * deterministic parameter sweeps including the synchronization tongue
//!   ([`sweep`]),
//! * serialization to CSV and JSON ([`io`]) and a CLI front end ([`cli`]),
//! * a built-in invariant suite ([`selftest`]).
//!
//! Rates are expressed in units of the bare emission rate `gamma0` (default 1).

// Frozen reference values keep their full decimal expansions even where a
// shorter literal would parse to the same f64.
#![allow(clippy::excessive_precision)]

pub mod bloch;
pub mod cli;
pub mod cycle;
pub mod error;
pub mod io;
pub mod metrics;
pub mod params;
pub mod selftest;
pub mod state;
pub mod sweep;

pub use bloch::{steady_state, steady_state_analytic, steady_state_numeric, AffineGenerator};
pub use error::{Result, SqzError};
pub use params::{squeeze_db, squeeze_from_db, Reservoir, SystemParams};
pub use state::{BlochVector, DensityMatrix, Mat2};
