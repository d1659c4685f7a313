// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error taxonomy shared across the crate.
//!
//! Parameter and configuration problems are reported as [`SqzError::InvalidParam`]
//! or [`SqzError::Config`]; everything else is a numerical or I/O failure. The
//! CLI maps the first group to exit code 1 and the rest to exit code 2.

use thiserror::Error;

/// Unified error type for the simulator.
#[derive(Debug, Error)]
pub enum SqzError {
    /// A physical or numerical input violated its precondition.
    #[error("invalid parameter {field} = {value}: {reason}")]
    InvalidParam {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A Bloch vector left the unit ball beyond rounding tolerance.
    #[error("Bloch vector norm {norm} exceeds 1")]
    BlochNormExceeded { norm: f64 },

    /// A matrix failed the density-matrix checks (hermiticity, unit trace,
    /// positivity).
    #[error("not a density matrix: {reason}")]
    NotADensityMatrix { reason: &'static str },

    /// Fixed-step integration was requested with a step too large for the
    /// generator's stiffness (dt * ||A||_inf > 1).
    #[error("integration step too large: dt * ||A|| = {stability:.6} > 1")]
    StepTooLarge { stability: f64 },

    /// The Bloch generator has no unique fixed point.
    #[error("generator is singular (|det A| = {det:e})")]
    SingularGenerator { det: f64 },

    /// The closed-form steady-state denominator vanished.
    #[error("steady-state denominator is degenerate")]
    DegenerateDenominator,

    /// Angular dynamics were evaluated inside the guard band around a
    /// coordinate pole of the sphere.
    #[error("polar angle {theta} lies within {guard} of a coordinate pole")]
    PoleSingularity { theta: f64, guard: f64 },

    /// A bounded maximization collapsed onto the search boundary, so no
    /// interior maximum exists in the bracket.
    #[error("no interior maximum found in the search bracket")]
    NoMaximumFound,

    /// The requested closed form only exists on a restricted parameter slice.
    #[error("no closed form at {field} = {value}; use the numeric route")]
    ClosedFormUnavailable { field: &'static str, value: f64 },

    /// A sweep cell failed; carries the grid coordinates of the failure.
    #[error("sweep cell (x = {x}, y = {y}) failed")]
    SweepCell {
        x: f64,
        y: f64,
        #[source]
        source: Box<SqzError>,
    },

    /// Configuration file or CLI usage problem.
    #[error("config: {0}")]
    Config(String),

    /// JSON (de)serialization failure.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Underlying I/O failure.
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SqzError>;

impl SqzError {
    /// True for errors caused by bad user input (CLI exit code 1), false for
    /// numerical or I/O failures (exit code 2).
    pub fn is_usage(&self) -> bool {
        matches!(self, SqzError::InvalidParam { .. } | SqzError::Config(_))
    }
}
