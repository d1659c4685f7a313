// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Phase-space diagnostics: Husimi `Q` distribution, the synchronization
//! measure `S(phi)`, and the optimal drive strength.
//!
//! For a two-level state with Bloch vector `r = (x, y, z)` the Husimi
//! distribution over spin coherent states `|theta, phi>` is
//!
//! ```text
//! Q(theta, phi) = [1 + (x cos phi + y sin phi) sin theta + z cos theta] / (4 pi)
//! ```
//!
//! which integrates to one over the sphere. Projecting out the polar angle
//! and subtracting the flat background gives the phase distribution
//!
//! ```text
//! S(phi) = Integral_0^pi Q(theta, phi) sin(theta) dtheta - 1/(2 pi)
//!        = (x cos phi + y sin phi) / 8
//! ```
//!
//! whose maximum `S_max = sqrt(x^2 + y^2) / 8` at `phi* = atan2(y, x)`
//! quantifies phase locking: `S = 0` for a phase-symmetric state, positive
//! values mean phase preference. Both `Q` and `S` are computed twice, from
//! the closed forms above and by direct expectation values or quadrature,
//! and the two routes are cross-checked in tests and the selftest.

use num_complex::Complex64;

use crate::bloch::steady_state;
use crate::error::{Result, SqzError};
use crate::params::SystemParams;
use crate::state::{BlochVector, DensityMatrix};

/// Coherences below this are treated as "no phase preference".
const NO_PREFERENCE_TOL: f64 = 0.0;

/// Closed-form Husimi distribution of the Bloch vector `r` at `(theta, phi)`.
pub fn husimi_q(r: &BlochVector, theta: f64, phi: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    (1.0 + (r.x * phi.cos() + r.y * phi.sin()) * sin_t + r.z * cos_t) / (4.0 * std::f64::consts::PI)
}

/// Husimi distribution as the spin-coherent-state expectation value
/// `<theta, phi| rho |theta, phi> / (2 pi)`, the operator-level ground truth
/// for [`husimi_q`].
pub fn husimi_q_operator(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    // |theta, phi> = cos(theta/2) |1> + sin(theta/2) e^{i phi} |0>.
    let c0 = Complex64::new((0.5 * theta).cos(), 0.0);
    let c1 = Complex64::from_polar((0.5 * theta).sin(), phi);
    let m = rho.mat();
    let ket = [c0, c1];
    let mut val = Complex64::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            val += ket[i].conj() * m.0[i][j] * ket[j];
        }
    }
    val.re / (2.0 * std::f64::consts::PI)
}

/// Closed-form synchronization measure `S(phi) = (x cos phi + y sin phi) / 8`.
pub fn sync_measure(r: &BlochVector, phi: f64) -> f64 {
    (r.x * phi.cos() + r.y * phi.sin()) / 8.0
}

/// Synchronization measure by polar quadrature of the operator-level Husimi
/// distribution: `Integral Q(theta, phi) sin(theta) dtheta - 1/(2 pi)` with
/// composite Simpson on `n_theta` uniform nodes (inclusive of both poles).
pub fn sync_measure_integral(rho: &DensityMatrix, phi: f64, n_theta: usize) -> Result<f64> {
    if n_theta < 3 {
        return Err(SqzError::InvalidParam {
            field: "n_theta",
            value: n_theta as f64,
            reason: "polar quadrature needs at least 3 nodes",
        });
    }
    let h = std::f64::consts::PI / (n_theta - 1) as f64;
    let integrand: Vec<f64> = (0..n_theta)
        .map(|i| {
            let theta = i as f64 * h;
            husimi_q_operator(rho, theta, phi) * theta.sin()
        })
        .collect();
    Ok(simpson_uniform(&integrand, h) - 0.5 / std::f64::consts::PI)
}

/// Peak of the synchronization measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMax {
    /// `S_max = sqrt(x^2 + y^2) / 8 >= 0`.
    pub value: f64,
    /// Locked phase `phi* = atan2(y, x)` wrapped into `[0, 2pi)`; zero when
    /// there is no preference.
    pub phi_star: f64,
    /// True when the state is phase-symmetric (`x = y = 0`), so `phi_star`
    /// is meaningless.
    pub no_preference: bool,
}

/// Maximum of `S(phi)` and its locked phase for the Bloch vector `r`.
pub fn s_max(r: &BlochVector) -> SMax {
    let amp = r.x.hypot(r.y);
    if amp <= NO_PREFERENCE_TOL {
        return SMax {
            value: 0.0,
            phi_star: 0.0,
            no_preference: true,
        };
    }
    let mut phi_star = r.y.atan2(r.x).rem_euclid(2.0 * std::f64::consts::PI);
    if phi_star >= 2.0 * std::f64::consts::PI {
        phi_star = 0.0;
    }
    SMax {
        value: amp / 8.0,
        phi_star,
        no_preference: false,
    }
}

/// `S_max` of the steady state at the given parameters.
pub fn steady_s_max(p: &SystemParams) -> Result<SMax> {
    Ok(s_max(&steady_state(p)?))
}

/// Husimi distribution sampled on a regular angular grid.
///
/// `theta` covers `[0, pi]` inclusively, `phi` covers `[0, 2 pi)` with the
/// endpoint excluded (the distribution is periodic); `values[i][j]`
/// corresponds to `(theta[i], phi[j])`.
#[derive(Clone, Debug)]
pub struct PhaseGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl PhaseGrid {
    /// Total mass `Integral Q sin(theta) dtheta dphi`: Simpson in `theta`,
    /// periodic rectangle rule in `phi`. Equals 1 up to quadrature error.
    pub fn normalization(&self) -> f64 {
        let d_phi = 2.0 * std::f64::consts::PI / self.phi.len() as f64;
        let h = std::f64::consts::PI / (self.theta.len() - 1) as f64;
        let polar: Vec<f64> = self
            .values
            .iter()
            .zip(&self.theta)
            .map(|(row, theta)| row.iter().sum::<f64>() * d_phi * theta.sin())
            .collect();
        simpson_uniform(&polar, h)
    }

    /// Indices and value of the grid maximum; the first occurrence wins in
    /// row-major order, which keeps the result deterministic.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0usize, 0usize, f64::NEG_INFINITY);
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        best
    }

    /// Marginal phase distribution `Integral Q sin(theta) dtheta` for each
    /// `phi` node (Simpson in `theta`).
    pub fn phi_marginal(&self) -> Vec<f64> {
        let h = std::f64::consts::PI / (self.theta.len() - 1) as f64;
        (0..self.phi.len())
            .map(|j| {
                let col: Vec<f64> = self
                    .values
                    .iter()
                    .zip(&self.theta)
                    .map(|(row, theta)| row[j] * theta.sin())
                    .collect();
                simpson_uniform(&col, h)
            })
            .collect()
    }
}

/// Samples the closed-form Husimi distribution of `r` on an
/// `n_theta x n_phi` grid.
pub fn phase_grid(r: &BlochVector, n_theta: usize, n_phi: usize) -> Result<PhaseGrid> {
    if n_theta < 3 {
        return Err(SqzError::InvalidParam {
            field: "n_theta",
            value: n_theta as f64,
            reason: "grid needs at least 3 polar nodes",
        });
    }
    if n_phi < 4 {
        return Err(SqzError::InvalidParam {
            field: "n_phi",
            value: n_phi as f64,
            reason: "grid needs at least 4 azimuthal nodes",
        });
    }
    let theta: Vec<f64> = (0..n_theta)
        .map(|i| i as f64 * std::f64::consts::PI / (n_theta - 1) as f64)
        .collect();
    let phi: Vec<f64> = (0..n_phi)
        .map(|j| j as f64 * 2.0 * std::f64::consts::PI / n_phi as f64)
        .collect();
    let values = theta
        .iter()
        .map(|&t| phi.iter().map(|&f| husimi_q(r, t, f)).collect())
        .collect();
    Ok(PhaseGrid { theta, phi, values })
}

/// Synchronization measure sampled on `n_phi` azimuthal nodes in `[0, 2 pi)`.
#[derive(Clone, Debug)]
pub struct SyncCurve {
    pub phi: Vec<f64>,
    pub values: Vec<f64>,
    /// Peak information for the same state.
    pub peak: SMax,
}

/// Samples `S(phi)` for the Bloch vector `r`.
pub fn sync_curve(r: &BlochVector, n_phi: usize) -> Result<SyncCurve> {
    if n_phi < 4 {
        return Err(SqzError::InvalidParam {
            field: "n_phi",
            value: n_phi as f64,
            reason: "curve needs at least 4 azimuthal nodes",
        });
    }
    let phi: Vec<f64> = (0..n_phi)
        .map(|j| j as f64 * 2.0 * std::f64::consts::PI / n_phi as f64)
        .collect();
    let values = phi.iter().map(|&f| sync_measure(r, f)).collect();
    Ok(SyncCurve {
        phi,
        values,
        peak: s_max(r),
    })
}

impl SyncCurve {
    /// Periodic rectangle-rule integral over `[0, 2 pi)`; zero up to
    /// rounding because `S` has zero mean.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * 2.0 * std::f64::consts::PI / self.phi.len() as f64
    }
}

/// How an optimal drive strength was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptRoute {
    /// Closed form on the resonant, phase-aligned slice.
    Closed,
    /// Golden-section maximization of `S_max(eps)`.
    Numeric,
}

/// Optimal drive strength together with the peak it achieves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonOpt {
    /// Maximizing drive strength.
    pub eps: f64,
    /// `S_max` of the steady state at that drive.
    pub s_max: f64,
    /// Which route produced the value.
    pub route: OptRoute,
}

/// Closed-form optimal drive on the slice `Delta = 0`, `Phi = 0`, where the
/// squeezing correlation is real and non-positive:
///
/// ```text
/// eps_opt = sqrt(gamma (gamma - 2 gamma0 |M|)) / sqrt(2)
/// ```
///
/// reducing to `gamma / sqrt(2)` without squeezing. Errors with
/// [`SqzError::ClosedFormUnavailable`] off that slice.
pub fn epsilon_opt_closed(p: &SystemParams) -> Result<f64> {
    if p.delta != 0.0 {
        return Err(SqzError::ClosedFormUnavailable {
            field: "delta",
            value: p.delta,
        });
    }
    if p.phi != 0.0 {
        return Err(SqzError::ClosedFormUnavailable {
            field: "phi",
            value: p.phi,
        });
    }
    let res = p.reservoir();
    // gamma - 2 gamma0 |M| = gamma0 (2n+1)^2 / (2N+1+2|M|) > 0 always.
    let gap = res.gamma - 2.0 * p.gamma0 * res.m.norm();
    Ok((0.5 * res.gamma * gap).sqrt())
}

/// Numerically optimal drive: golden-section maximization of
/// `S_max(steady_state(eps))` over `eps` in `(0, 10 gamma]`, interval
/// converged to `1e-8 * gamma`. Errors with [`SqzError::NoMaximumFound`]
/// when the maximum collapses onto a bracket boundary.
pub fn epsilon_opt_numeric(p: &SystemParams) -> Result<f64> {
    let gamma = p.reservoir().gamma;
    let f = |eps: f64| -> Result<f64> { Ok(steady_s_max(&p.with_eps(eps)?)?.value) };
    golden_max(f, 0.0, 10.0 * gamma, 1e-8 * gamma)
}

/// Optimal drive strength: closed form on its slice, golden section
/// elsewhere.
pub fn epsilon_opt(p: &SystemParams) -> Result<EpsilonOpt> {
    let (eps, route) = match epsilon_opt_closed(p) {
        Ok(v) => (v, OptRoute::Closed),
        Err(SqzError::ClosedFormUnavailable { .. }) => (epsilon_opt_numeric(p)?, OptRoute::Numeric),
        Err(e) => return Err(e),
    };
    let s = steady_s_max(&p.with_eps(eps)?)?.value;
    Ok(EpsilonOpt {
        eps,
        s_max: s,
        route,
    })
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
/// The argmax must be interior: landing within `10 * tol` of either bracket
/// end reports [`SqzError::NoMaximumFound`].
pub(crate) fn golden_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    if x - lo <= 10.0 * tol || hi - x <= 10.0 * tol {
        return Err(SqzError::NoMaximumFound);
    }
    Ok(x)
}

/// Composite Simpson rule on uniformly spaced samples with spacing `h`.
/// Even interval counts use plain Simpson; odd counts finish with a 3/8
/// segment; one interval degrades to the trapezoid rule.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        2 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            if n.is_multiple_of(2) {
                simpson_even(values, h)
            } else {
                // Simpson on the first n-3 intervals, 3/8 rule on the rest.
                let split = values.len() - 4;
                let head = if split > 0 {
                    simpson_even(&values[..=split], h)
                } else {
                    0.0
                };
                let t = &values[split..];
                head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
            }
        }
    }
}

fn simpson_even(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}
