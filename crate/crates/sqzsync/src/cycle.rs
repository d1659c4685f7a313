// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Limit-cycle geometry and angular trajectories on the Bloch sphere.
//!
//! In spherical coordinates `(theta, phi)` the semiclassical phase-space flow
//! of the dissipative two-level system is
//!
//! ```text
//! dtheta/dt = gamma0 / sin(theta) + gamma cos(theta) / sin(theta) + drive(t) sin(phi)
//! dphi/dt   = omega0 + gamma0 [Im M cos(2 phi) + Re M sin(2 phi)] + drive(t) cos(phi) cot(theta)
//! drive(t)  = -2 eps cos(omega_L t + pi/2),   omega_L = omega0 + Delta
//! ```
//!
//! Without a drive the polar motion closes onto the latitude
//! `theta_s = arccos(-1 / (2N + 1))`; stereographic-free planar projection
//! `x = (1 + cos theta) cos(phi) / 2`, `y = (1 + cos theta) sin(phi) / 2`
//! turns that latitude into a circle of radius `r_s = (1 + cos theta_s) / 2`.
//!
//! Ensembles of initial states are integrated with fixed-step RK4. For
//! `eps = 0` the substitution `u = cos(theta)` removes the pole singularities
//! exactly (`du/dt = -(gamma0 + gamma u)` is linear); for `eps > 0` the flow
//! is integrated in Cartesian Bloch coordinates of the drive-synchronized
//! rotating frame and converted back to angles, which avoids the mixed-frame
//! drive term entirely.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{integrate, rk4_step, AffineGenerator};
use crate::error::{Result, SqzError};
use crate::params::SystemParams;
use crate::state::BlochVector;

/// Guard band around the coordinate poles of the sphere.
pub const THETA_POLE: f64 = 1e-6;

/// Point on the sphere: polar angle `theta` in `[0, pi]`, azimuth `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularState {
    pub theta: f64,
    pub phi: f64,
}

impl AngularState {
    pub fn new(theta: f64, phi: f64) -> Self {
        AngularState { theta, phi }
    }
}

/// Stationary latitude `theta_s = arccos(-1 / (2N + 1))` of the undriven flow.
pub fn steady_theta(n_eff: f64) -> f64 {
    (-1.0 / (2.0 * n_eff + 1.0)).acos()
}

/// Planar radius `(1 + cos theta) / 2` of the latitude `theta` under the
/// projection used for limit-cycle plots.
pub fn limit_cycle_radius(theta: f64) -> f64 {
    0.5 * (1.0 + theta.cos())
}

/// Projects a spherical point to the plane:
/// `x = (1 + cos theta) cos(phi) / 2`, `y = (1 + cos theta) sin(phi) / 2`.
pub fn project_xy(s: AngularState) -> (f64, f64) {
    let r = limit_cycle_radius(s.theta);
    (r * s.phi.cos(), r * s.phi.sin())
}

/// Evaluates the angular flow at time `t`. Fails with
/// [`SqzError::PoleSingularity`] inside the guard band where `csc(theta)`
/// and `cot(theta)` blow up.
pub fn angular_rhs(p: &SystemParams, omega0: f64, t: f64, s: AngularState) -> Result<(f64, f64)> {
    if s.theta < THETA_POLE || s.theta > std::f64::consts::PI - THETA_POLE {
        return Err(SqzError::PoleSingularity {
            theta: s.theta,
            guard: THETA_POLE,
        });
    }
    let res = p.reservoir();
    let omega_l = omega0 + p.delta;
    let drive = -2.0 * p.eps * (omega_l * t + 0.5 * std::f64::consts::PI).cos();
    let (sin_t, cos_t) = s.theta.sin_cos();
    let d_theta = p.gamma0 / sin_t + res.gamma * cos_t / sin_t + drive * s.phi.sin();
    let d_phi = omega0
        + p.gamma0 * (res.m.im * (2.0 * s.phi).cos() + res.m.re * (2.0 * s.phi).sin())
        + drive * s.phi.cos() * cos_t / sin_t;
    Ok((d_theta, d_phi))
}

/// Draws `count` initial states uniformly over the sphere from a seeded
/// ChaCha8 stream: `theta = arccos(1 - 2u)`, `phi = 2 pi v`, with `u` drawn
/// before `v` for each state.
pub fn sample_initial_states(count: usize, seed: u64) -> Vec<AngularState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit = move || (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (0..count)
        .map(|_| {
            let u = unit();
            let v = unit();
            AngularState::new((1.0 - 2.0 * u).acos(), 2.0 * std::f64::consts::PI * v)
        })
        .collect()
}

/// Ensemble integration controls.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleConfig {
    /// Number of trajectories.
    pub count: usize,
    /// Seed for the initial-state sampler.
    pub seed: u64,
    /// Integration horizon.
    pub t_end: f64,
    /// Fixed integration step.
    pub dt: f64,
    /// Free precession frequency of the undriven azimuth (0 selects the
    /// rotating frame throughout).
    pub omega0: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            count: 200,
            seed: 42,
            t_end: 20.0,
            dt: 0.01,
            omega0: 0.0,
        }
    }
}

/// One integrated trajectory of an ensemble.
#[derive(Clone, Debug)]
pub struct EnsemblePath {
    /// Where the path started.
    pub initial: AngularState,
    /// Angles at each sample time; `phi` is wrapped into `[0, 2pi)`.
    pub angles: Vec<AngularState>,
    /// True when a recorded angle was pinned onto the pole guard band. For
    /// flows whose stationary latitude is itself a pole this marks arrival
    /// there; otherwise it indicates an overly large step.
    pub clamped: bool,
}

impl EnsemblePath {
    /// Final state of the path.
    pub fn last(&self) -> AngularState {
        *self.angles.last().expect("path is never empty")
    }

    /// Planar projection of every sample.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.angles.iter().map(|s| project_xy(*s))
    }
}

/// A batch of trajectories sharing sample times.
#[derive(Clone, Debug)]
pub struct EnsembleRun {
    /// Seed used to draw initial states, when they were drawn here.
    pub seed: Option<u64>,
    /// Shared sample times.
    pub times: Vec<f64>,
    /// One path per initial state, in sampling order.
    pub paths: Vec<EnsemblePath>,
}

/// Samples `cfg.count` uniform initial states and integrates them.
pub fn simulate_ensemble(p: &SystemParams, cfg: &EnsembleConfig) -> Result<EnsembleRun> {
    let initial = sample_initial_states(cfg.count, cfg.seed);
    let mut run = simulate_paths(p, &initial, cfg.t_end, cfg.dt, cfg.omega0)?;
    run.seed = Some(cfg.seed);
    Ok(run)
}

/// Integrates the given initial states over `[0, t_end]` with step `dt`.
///
/// `eps = 0` uses the pole-free `u = cos(theta)` chart; `eps > 0` integrates
/// the rotating-frame Bloch equation and extracts angles, so it requires
/// `omega0 = 0` (the rotating frame already co-moves with the drive).
pub fn simulate_paths(
    p: &SystemParams,
    initial: &[AngularState],
    t_end: f64,
    dt: f64,
    omega0: f64,
) -> Result<EnsembleRun> {
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
    if p.eps > 0.0 && omega0 != 0.0 {
        return Err(SqzError::InvalidParam {
            field: "omega0",
            value: omega0,
            reason: "driven ensembles run in the rotating frame; omega0 must be 0",
        });
    }
    let n_steps = (t_end / dt).round() as usize;
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 * dt).collect();
    let paths = if p.eps == 0.0 {
        initial
            .iter()
            .map(|s| integrate_undriven(p, *s, n_steps, dt, omega0))
            .collect::<Result<Vec<_>>>()?
    } else {
        let gen = AffineGenerator::from_params(p);
        initial
            .iter()
            .map(|s| integrate_driven(&gen, *s, t_end, dt))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(EnsembleRun {
        seed: None,
        times,
        paths,
    })
}

/// Undriven flow in the `(u, phi)` chart, `u = cos(theta)`:
/// `du/dt = -(gamma0 + gamma u)`,
/// `dphi/dt = omega0 + gamma0 [Im M cos(2 phi) + Re M sin(2 phi)]`.
fn integrate_undriven(
    p: &SystemParams,
    s0: AngularState,
    n_steps: usize,
    dt: f64,
    omega0: f64,
) -> Result<EnsemblePath> {
    let res = p.reservoir();
    // Jacobian bound of the chart: max(gamma, 2 gamma0 |M|).
    let stiffness = res.gamma.max(2.0 * p.gamma0 * res.m.norm());
    if dt * stiffness > 1.0 {
        return Err(SqzError::StepTooLarge {
            stability: dt * stiffness,
        });
    }
    let f = |x: [f64; 3]| -> [f64; 3] {
        let (u, phi) = (x[0], x[1]);
        [
            -(p.gamma0 + res.gamma * u),
            omega0 + p.gamma0 * (res.m.im * (2.0 * phi).cos() + res.m.re * (2.0 * phi).sin()),
            0.0,
        ]
    };
    let mut x = [s0.theta.cos(), s0.phi, 0.0];
    let mut clamped = false;
    let mut angles = Vec::with_capacity(n_steps + 1);
    angles.push(record_from_chart(x[0], x[1], &mut clamped));
    for _ in 0..n_steps {
        x = rk4_step(f, x, dt);
        angles.push(record_from_chart(x[0], x[1], &mut clamped));
        x[0] = x[0].clamp(-U_GUARD, U_GUARD);
    }
    Ok(EnsemblePath {
        initial: s0,
        angles,
        clamped,
    })
}

/// Cosine of the pole guard: recorded `|cos(theta)|` never exceeds this.
const U_GUARD: f64 = 0.999_999_999_999_5; // cos(THETA_POLE)

fn record_from_chart(u: f64, phi: f64, clamped: &mut bool) -> AngularState {
    let mut uu = u;
    if uu.abs() > U_GUARD {
        uu = uu.clamp(-U_GUARD, U_GUARD);
        *clamped = true;
    }
    AngularState::new(uu.acos(), wrap_phi(phi))
}

/// Driven flow: rotating-frame Bloch integration plus angle extraction.
fn integrate_driven(
    gen: &AffineGenerator,
    s0: AngularState,
    t_end: f64,
    dt: f64,
) -> Result<EnsemblePath> {
    let r0 = BlochVector::from_angles(s0.theta, s0.phi);
    let traj = integrate(gen, r0, t_end, dt)?;
    let angles = traj
        .states
        .iter()
        .map(|v| AngularState::new(v.theta(), v.phi()))
        .collect();
    Ok(EnsemblePath {
        initial: s0,
        angles,
        clamped: false,
    })
}

fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * std::f64::consts::PI);
    if w >= 2.0 * std::f64::consts::PI {
        0.0
    } else {
        w
    }
}
