// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dissipative Bloch dynamics of the driven two-level system.
//!
//! The master equation in the frame rotating at the drive frequency reads
//!
//! ```text
//! drho/dt = -(i/2) [Delta sigma_z + eps sigma_y, rho]
//!           - gamma0 M  sigma_+ rho sigma_+
//!           - gamma0 M* sigma_- rho sigma_-
//!           - (gamma0/2) (N+1) (sigma_+ sigma_- rho + rho sigma_+ sigma_- - 2 sigma_- rho sigma_+)
//!           - (gamma0/2)  N    (sigma_- sigma_+ rho + rho sigma_- sigma_+ - 2 sigma_+ rho sigma_-)
//! ```
//!
//! with reservoir quantities `N`, `M`, `gamma = gamma0 (2N + 1)` from
//! [`crate::params`]. Because the right-hand side is linear in `rho` and
//! trace-preserving, the Bloch vector `r = Tr(sigma rho)` obeys the affine
//! equation `dr/dt = A r + b` with
//!
//! ```text
//!     | -gamma/2 - gamma0 Re M    -Delta + gamma0 Im M    eps    |
//! A = |  Delta + gamma0 Im M      -gamma/2 + gamma0 Re M  0      |
//!     | -eps                       0                      -gamma |
//! ```
//!
//! and `b = (0, 0, -gamma0)`. Both routes are implemented and cross-checked:
//! [`lindblad_rhs`] works at the matrix level, [`AffineGenerator::from_params`]
//! uses the closed 3x3 form.
//!
//! The unique fixed point `r_s = -A^{-1} b` is available in closed form
//! ([`steady_state_analytic`]) and by direct linear solve
//! ([`steady_state_numeric`]).

use num_complex::Complex64;

use crate::error::{Result, SqzError};
use crate::params::SystemParams;
use crate::state::{
    bloch_projection, sigma_minus, sigma_plus, sigma_y, sigma_z, BlochVector, DensityMatrix, Mat2,
};

/// `|det A|` below `SINGULAR_TOL * max(1, ||A||)^3` counts as singular.
const SINGULAR_TOL: f64 = 1e-14;
/// `|D|` below `DEGENERATE_TOL * scale(D)` counts as a degenerate denominator.
const DEGENERATE_TOL: f64 = 1e-14;
/// Steady states may exceed unit norm by at most this much.
const STEADY_NORM_TOL: f64 = 1e-9;

/// Master-equation right-hand side `drho/dt` evaluated at `rho`.
///
/// This is the matrix-level ground truth; the affine generator is validated
/// against it. The result is traceless and hermitian up to rounding.
pub fn lindblad_rhs(p: &SystemParams, rho: &DensityMatrix) -> Mat2 {
    let res = p.reservoir();
    let g0 = p.gamma0;
    let sp = sigma_plus();
    let sm = sigma_minus();
    let r = rho.mat();

    // Coherent part: -(i/2) [Delta sigma_z + eps sigma_y, rho].
    let h = sigma_z().scale_re(p.delta).add(&sigma_y().scale_re(p.eps));
    let mut out = h.commutator(r).scale(Complex64::new(0.0, -0.5));

    // Anomalous squeezing terms: -gamma0 M s+ rho s+ - gamma0 M* s- rho s-.
    out = out.sub(&sp.mul(r).mul(&sp).scale(res.m * g0));
    out = out.sub(&sm.mul(r).mul(&sm).scale(res.m.conj() * g0));

    // Downward dissipator at rate gamma0 (N + 1).
    let spsm = sp.mul(&sm);
    let down = spsm
        .mul(r)
        .add(&r.mul(&spsm))
        .sub(&sm.mul(r).mul(&sp).scale_re(2.0));
    out = out.sub(&down.scale_re(0.5 * g0 * (res.n_eff + 1.0)));

    // Upward dissipator at rate gamma0 N.
    let smsp = sm.mul(&sp);
    let up = smsp
        .mul(r)
        .add(&r.mul(&smsp))
        .sub(&sp.mul(r).mul(&sm).scale_re(2.0));
    out.sub(&up.scale_re(0.5 * g0 * res.n_eff))
}

/// Affine Bloch generator: `dr/dt = A r + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineGenerator {
    /// Linear part, row-major.
    pub a: [[f64; 3]; 3],
    /// Constant part.
    pub b: [f64; 3],
}

impl AffineGenerator {
    /// Builds the generator from the closed 3x3 form of the master equation.
    pub fn from_params(p: &SystemParams) -> Self {
        let res = p.reservoir();
        let (g0, g) = (p.gamma0, res.gamma);
        let (mr, mi) = (res.m.re, res.m.im);
        AffineGenerator {
            a: [
                [-0.5 * g - g0 * mr, -p.delta + g0 * mi, p.eps],
                [p.delta + g0 * mi, -0.5 * g + g0 * mr, 0.0],
                [-p.eps, 0.0, -g],
            ],
            b: [0.0, 0.0, -g0],
        }
    }

    /// Rebuilds the generator by projecting [`lindblad_rhs`] onto the Pauli
    /// basis. Used as an independent cross-check of [`Self::from_params`].
    pub fn from_master_equation(p: &SystemParams) -> Self {
        let proj = |v: BlochVector| -> [f64; 3] {
            let rho = DensityMatrix::from_bloch(&v).expect("basis state is physical");
            bloch_projection(&lindblad_rhs(p, &rho))
        };
        let b = proj(BlochVector::new(0.0, 0.0, 0.0));
        let mut a = [[0.0; 3]; 3];
        for (k, unit) in [
            BlochVector::new(1.0, 0.0, 0.0),
            BlochVector::new(0.0, 1.0, 0.0),
            BlochVector::new(0.0, 0.0, 1.0),
        ]
        .iter()
        .enumerate()
        {
            let col = proj(*unit);
            for i in 0..3 {
                a[i][k] = col[i] - b[i];
            }
        }
        AffineGenerator { a, b }
    }

    /// Evaluates `A r + b`.
    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.b;
        for (out_i, row) in out.iter_mut().zip(&self.a) {
            for (a_ij, r_j) in row.iter().zip(&r) {
                *out_i += a_ij * r_j;
            }
        }
        out
    }

    /// Matrix infinity norm of the linear part (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        self.a
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Determinant of the linear part.
    pub fn det(&self) -> f64 {
        linalg::det3(&self.a)
    }

    /// Largest real part among the eigenvalues of `A`. Negative values mean
    /// every trajectory contracts onto the unique fixed point.
    pub fn max_re_eigenvalue(&self) -> f64 {
        let a = &self.a;
        let c2 = -(a[0][0] + a[1][1] + a[2][2]);
        let c1 = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
            + a[1][1] * a[2][2]
            - a[1][2] * a[2][1];
        let c0 = -linalg::det3(a);
        linalg::cubic_roots(c2, c1, c0)
            .iter()
            .map(|z| z.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest component-wise deviation from another generator.
    pub fn max_abs_diff(&self, rhs: &AffineGenerator) -> f64 {
        let mut max = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                max = max.max((self.a[i][j] - rhs.a[i][j]).abs());
            }
            max = max.max((self.b[i] - rhs.b[i]).abs());
        }
        max
    }
}

/// Time-ordered Bloch trajectory produced by [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Sample times, starting at 0, spaced by the integration step.
    pub times: Vec<f64>,
    /// Bloch vector at each sample time.
    pub states: Vec<BlochVector>,
}

impl Trajectory {
    /// The last recorded state.
    pub fn last(&self) -> BlochVector {
        *self.states.last().expect("trajectory is never empty")
    }
}

/// Integrates `dr/dt = A r + b` from `r0` with classical fixed-step RK4.
///
/// Runs `round(t_end / dt)` steps of exactly `dt` and records every sample,
/// including `t = 0`. Fails with [`SqzError::StepTooLarge`] when
/// `dt * ||A||_inf > 1`, the regime where fixed-step RK4 loses accuracy and
/// can destabilize.
pub fn integrate(
    gen: &AffineGenerator,
    r0: BlochVector,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(SqzError::InvalidParam {
            field: "dt",
            value: dt,
            reason: "step must be finite and > 0",
        });
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(SqzError::InvalidParam {
            field: "t_end",
            value: t_end,
            reason: "horizon must be finite and >= 0",
        });
    }
    let stability = dt * gen.inf_norm();
    if stability > 1.0 {
        return Err(SqzError::StepTooLarge { stability });
    }
    let n = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut r = r0.to_array();
    times.push(0.0);
    states.push(r0);
    for i in 1..=n {
        r = rk4_step(|x| gen.apply(x), r, dt);
        times.push(i as f64 * dt);
        states.push(BlochVector::from_array(r));
    }
    Ok(Trajectory { times, states })
}

/// A sensible default step for a given generator: `0.01 / max(gamma, 1)`
/// expressed through the generator norm, clamped into the stable region.
pub fn default_dt(gen: &AffineGenerator) -> f64 {
    0.01 / gen.inf_norm().max(1.0)
}

/// One classical Runge-Kutta step of size `dt` for `dx/dt = f(x)`.
pub(crate) fn rk4_step<F>(f: F, x: [f64; 3], dt: f64) -> [f64; 3]
where
    F: Fn([f64; 3]) -> [f64; 3],
{
    let add =
        |a: [f64; 3], b: [f64; 3], s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
    let k1 = f(x);
    let k2 = f(add(x, k1, 0.5 * dt));
    let k3 = f(add(x, k2, 0.5 * dt));
    let k4 = f(add(x, k3, dt));
    let mut out = x;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Steady state by solving `A r = -b` with partial-pivot elimination.
pub fn steady_state_numeric(p: &SystemParams) -> Result<BlochVector> {
    let gen = AffineGenerator::from_params(p);
    let det = gen.det();
    let scale = gen.inf_norm().max(1.0);
    if det.abs() < SINGULAR_TOL * scale.powi(3) {
        return Err(SqzError::SingularGenerator { det: det.abs() });
    }
    let rhs = [-gen.b[0], -gen.b[1], -gen.b[2]];
    let x = linalg::solve3(&gen.a, &rhs).ok_or(SqzError::SingularGenerator { det: det.abs() })?;
    // The solve must reproduce the fixed-point equation to rounding accuracy.
    debug_assert!({
        let resid = gen.apply(x);
        resid.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            <= 1e-10 * scale * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    });
    checked_steady(BlochVector::from_array(x))
}

/// Steady state from the closed-form expressions
///
/// ```text
/// r_x = 2 gamma0 eps [gamma - 2 gamma0 Re M] / D
/// r_y = 4 gamma0 eps [Delta + gamma0 Im M] / D
/// r_z = -gamma0 [4 (|M|^2 - Delta^2) - gamma^2] / D
/// D   = gamma [4 (gamma0^2 |M|^2 - Delta^2) - gamma^2] + 2 eps^2 [2 gamma0 Re M - gamma]
/// ```
///
/// At the default rate unit `gamma0 = 1` this agrees with the linear solve to
/// rounding accuracy; the built-in selftest documents the scaling behaviour of
/// the `r_z` numerator away from `gamma0 = 1`.
pub fn steady_state_analytic(p: &SystemParams) -> Result<BlochVector> {
    let res = p.reservoir();
    let (g0, g) = (p.gamma0, res.gamma);
    let (mr, mi) = (res.m.re, res.m.im);
    let m2 = res.m.norm_sqr();
    let d = g * (4.0 * (g0 * g0 * m2 - p.delta * p.delta) - g * g)
        + 2.0 * p.eps * p.eps * (2.0 * g0 * mr - g);
    let d_scale = g * (4.0 * (g0 * g0 * m2 + p.delta * p.delta) + g * g)
        + 2.0 * p.eps * p.eps * (2.0 * g0 * mr.abs() + g);
    if d.abs() <= DEGENERATE_TOL * d_scale {
        return Err(SqzError::DegenerateDenominator);
    }
    let rx = 2.0 * g0 * p.eps * (g - 2.0 * g0 * mr) / d;
    let ry = 4.0 * g0 * p.eps * (p.delta + g0 * mi) / d;
    let rz = -g0 * (4.0 * (m2 - p.delta * p.delta) - g * g) / d;
    checked_steady(BlochVector::new(rx, ry, rz))
}

/// Steady state, preferring the closed form and falling back to the linear
/// solve when the denominator degenerates.
pub fn steady_state(p: &SystemParams) -> Result<BlochVector> {
    match steady_state_analytic(p) {
        Err(SqzError::DegenerateDenominator) => steady_state_numeric(p),
        other => other,
    }
}

/// Steady state through both routes at once, reporting whether they agree to
/// `tol` component-wise. Sweeps use this to flag suspicious cells.
pub fn steady_state_checked(p: &SystemParams, tol: f64) -> Result<(BlochVector, bool)> {
    match steady_state_analytic(p) {
        Ok(analytic) => {
            let numeric = steady_state_numeric(p)?;
            Ok((analytic, analytic.max_abs_diff(&numeric) <= tol))
        }
        Err(SqzError::DegenerateDenominator) => Ok((steady_state_numeric(p)?, false)),
        Err(e) => Err(e),
    }
}

fn checked_steady(v: BlochVector) -> Result<BlochVector> {
    let norm = v.norm();
    if !norm.is_finite() || norm > 1.0 + STEADY_NORM_TOL {
        return Err(SqzError::BlochNormExceeded { norm });
    }
    Ok(v)
}

/// Small dense linear-algebra helpers, sized for the 3x3 Bloch problem.
pub(crate) mod linalg {
    /// Determinant by cofactor expansion.
    pub fn det3(a: &[[f64; 3]; 3]) -> f64 {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    }

    /// Solves `a x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot vanishes exactly.
    // The elimination kernel reads one row while updating another, so index
    // loops are the workable form here.
    #[allow(clippy::needless_range_loop)]
    pub fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
        let mut m = [[0.0f64; 4]; 3];
        for i in 0..3 {
            m[i][..3].copy_from_slice(&a[i]);
            m[i][3] = b[i];
        }
        for col in 0..3 {
            let pivot_row = (col..3)
                .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
                .expect("non-empty range");
            if m[pivot_row][col] == 0.0 {
                return None;
            }
            m.swap(col, pivot_row);
            for row in (col + 1)..3 {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
        let mut x = [0.0f64; 3];
        for i in (0..3).rev() {
            let mut s = m[i][3];
            for j in (i + 1)..3 {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        Some(x)
    }

    /// All roots of `z^3 + c2 z^2 + c1 z + c0 = 0` as `(re, im)` pairs,
    /// via the depressed cubic with the trigonometric method for three real
    /// roots and Cardano otherwise.
    pub fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [(f64, f64); 3] {
        let shift = c2 / 3.0;
        let p = c1 - c2 * c2 / 3.0;
        let q = c0 - c1 * c2 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;
        let disc = 0.25 * q * q + p * p * p / 27.0;
        if disc > 0.0 {
            // One real root, one conjugate pair. Pick the larger-magnitude
            // cube-root branch to avoid cancellation.
            let s = disc.sqrt();
            let u = if q <= 0.0 {
                (-0.5 * q + s).cbrt()
            } else {
                (-0.5 * q - s).cbrt()
            };
            let v = if u != 0.0 { -p / (3.0 * u) } else { 0.0 };
            let real = u + v;
            let re_pair = -0.5 * real;
            let im_pair = 0.5 * 3.0f64.sqrt() * (u - v).abs();
            [
                (real - shift, 0.0),
                (re_pair - shift, im_pair),
                (re_pair - shift, -im_pair),
            ]
        } else if p == 0.0 {
            // disc <= 0 with p = 0 forces q = 0: a real triple root.
            [(-shift, 0.0); 3]
        } else {
            // Three real roots (p < 0 here).
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let phase = arg.acos() / 3.0;
            let mut out = [(0.0, 0.0); 3];
            for (k, slot) in out.iter_mut().enumerate() {
                let t = m * (phase - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                *slot = (t - shift, 0.0);
            }
            out
        }
    }
}
