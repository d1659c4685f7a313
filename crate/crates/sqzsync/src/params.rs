// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Physical inputs and derived reservoir quantities.
//!
//! The model is a two-level system, driven near resonance, that relaxes into
//! a broadband squeezed thermal reservoir. Frequencies and rates are quoted
//! in units of the bare emission rate `gamma0`, which defaults to 1.
//!
//! The reservoir enters the dynamics only through its effective occupation
//! `N`, its squeezing correlation `M`, and the total relaxation rate
//! `gamma = gamma0 * (2N + 1)`:
//!
//! ```text
//! N = n cosh(2r) + sinh^2 r
//! M = -(1/2) sinh(2r) e^{i Phi} (2n + 1)
//! ```
//!
//! These obey `N (N + 1) - |M|^2 = n (n + 1)` exactly, which implies the
//! physicality bound `|M|^2 <= N (N + 1)` with equality only at `n = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqzError};

/// Relative slack for the `|M|^2 <= N(N+1)` consistency assertion.
const RESERVOIR_BOUND_SLACK: f64 = 1e-9;

/// Validated inputs of the driven two-level system.
///
/// Construct with [`SystemParams::new`] (unit `gamma0`) or
/// [`SystemParams::with_gamma0`]; both normalize the squeezing angle into
/// `[0, 2pi)` and reject non-finite or out-of-range values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Thermal occupation of the reservoir, `n >= 0`.
    pub n: f64,
    /// Squeezing strength of the reservoir, `r >= 0`.
    pub r: f64,
    /// Squeezing angle `Phi`, stored normalized to `[0, 2pi)`.
    pub phi: f64,
    /// Detuning `Delta` between the drive and the two-level splitting.
    pub delta: f64,
    /// Drive strength `eps >= 0`.
    pub eps: f64,
    /// Bare emission rate, `gamma0 > 0`. All other rates scale with it.
    pub gamma0: f64,
}

impl SystemParams {
    /// Builds parameters with the default rate unit `gamma0 = 1`.
    pub fn new(n: f64, r: f64, phi: f64, delta: f64, eps: f64) -> Result<Self> {
        Self {
            n,
            r,
            phi,
            delta,
            eps,
            gamma0: 1.0,
        }
        .validated()
    }

    /// Builds parameters with an explicit rate unit `gamma0 > 0`.
    pub fn with_gamma0(
        n: f64,
        r: f64,
        phi: f64,
        delta: f64,
        eps: f64,
        gamma0: f64,
    ) -> Result<Self> {
        Self {
            n,
            r,
            phi,
            delta,
            eps,
            gamma0,
        }
        .validated()
    }

    /// Returns a copy with a different drive strength (used by sweeps).
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        Self { eps, ..*self }.validated()
    }

    /// Returns a copy with a different detuning (used by sweeps).
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self { delta, ..*self }.validated()
    }

    /// Checks every field and normalizes the squeezing angle.
    pub fn validated(mut self) -> Result<Self> {
        check_finite("n", self.n)?;
        check_finite("r", self.r)?;
        check_finite("phi", self.phi)?;
        check_finite("delta", self.delta)?;
        check_finite("eps", self.eps)?;
        check_finite("gamma0", self.gamma0)?;
        if self.n < 0.0 {
            return Err(invalid("n", self.n, "thermal occupation must be >= 0"));
        }
        if self.r < 0.0 {
            return Err(invalid("r", self.r, "squeezing strength must be >= 0"));
        }
        if self.eps < 0.0 {
            return Err(invalid("eps", self.eps, "drive strength must be >= 0"));
        }
        if self.gamma0 <= 0.0 {
            return Err(invalid("gamma0", self.gamma0, "rate unit must be > 0"));
        }
        self.phi = self.phi.rem_euclid(2.0 * std::f64::consts::PI);
        // rem_euclid can return exactly 2pi when phi is a tiny negative number.
        if self.phi >= 2.0 * std::f64::consts::PI {
            self.phi = 0.0;
        }
        let res = self.reservoir_unchecked();
        let bound = res.n_eff * (res.n_eff + 1.0);
        let slack = RESERVOIR_BOUND_SLACK * (1.0 + bound);
        if res.m.norm_sqr() > bound + slack {
            return Err(invalid(
                "r",
                self.r,
                "reservoir violates |M|^2 <= N(N+1); inputs are inconsistent",
            ));
        }
        Ok(self)
    }

    /// Derived reservoir quantities `N`, `M`, and `gamma` for these inputs.
    pub fn reservoir(&self) -> Reservoir {
        self.reservoir_unchecked()
    }

    fn reservoir_unchecked(&self) -> Reservoir {
        let n_eff = self.n * (2.0 * self.r).cosh() + self.r.sinh().powi(2);
        let m = -0.5
            * (2.0 * self.r).sinh()
            * (2.0 * self.n + 1.0)
            * Complex64::from_polar(1.0, self.phi);
        let gamma = self.gamma0 * (2.0 * n_eff + 1.0);
        Reservoir { n_eff, m, gamma }
    }
}

/// Effective reservoir quantities seen by the two-level system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reservoir {
    /// Effective occupation `N = n cosh(2r) + sinh^2 r`.
    pub n_eff: f64,
    /// Squeezing correlation `M = -(1/2) sinh(2r) e^{i Phi} (2n + 1)`.
    pub m: Complex64,
    /// Total relaxation rate `gamma = gamma0 (2N + 1)`.
    pub gamma: f64,
}

impl Reservoir {
    /// Exact invariant `N(N+1) - |M|^2`, equal to `n(n+1)` of the inputs.
    pub fn occupation_invariant(&self) -> f64 {
        self.n_eff * (self.n_eff + 1.0) - self.m.norm_sqr()
    }
}

/// Converts a squeezing strength `r` to decibels of noise reduction,
/// `r_dB = 20 r / ln 10`, so `r = 1.5` is about 13 dB.
pub fn squeeze_db(r: f64) -> f64 {
    r * 20.0 / std::f64::consts::LN_10
}

/// Inverse of [`squeeze_db`].
pub fn squeeze_from_db(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

fn check_finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, value, "must be finite"))
    }
}

fn invalid(field: &'static str, value: f64, reason: &'static str) -> SqzError {
    SqzError::InvalidParam {
        field,
        value,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_reservoir_is_trivial() {
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let res = p.reservoir();
        assert_eq!(res.n_eff, 0.0);
        assert_eq!(res.m, Complex64::new(0.0, 0.0));
        assert_eq!(res.gamma, 1.0);
    }

    #[test]
    fn squeezed_vacuum_reservoir_matches_reference() {
        // n = 0, r = 1.5: the |M|^2 = N(N+1) boundary case.
        let p = SystemParams::new(0.0, 1.5, 0.0, 0.0, 0.0).unwrap();
        let res = p.reservoir();
        assert_relative_eq!(res.n_eff, 4.533830997888883, max_relative = 1e-15);
        assert_relative_eq!(res.m.re, -5.008937463704951, max_relative = 1e-15);
        assert_eq!(res.m.im, 0.0);
        assert_relative_eq!(res.gamma, 10.067661995777766, max_relative = 1e-15);
        assert_relative_eq!(res.m.norm_sqr(), 25.089454515306987, max_relative = 1e-14);
        assert!(res.occupation_invariant().abs() < 1e-13 * res.m.norm_sqr());
    }

    #[test]
    fn squeezed_thermal_reservoir_matches_reference() {
        // n = 1, r = 1.5.
        let p = SystemParams::new(1.0, 1.5, 0.0, 0.0, 0.0).unwrap();
        let res = p.reservoir();
        assert_relative_eq!(res.n_eff, 14.601492993666649, max_relative = 1e-15);
        assert_relative_eq!(res.m.re, -15.026812391114853, max_relative = 1e-15);
        assert_relative_eq!(res.gamma, 30.202985987333298, max_relative = 1e-15);
        assert_relative_eq!(
            res.n_eff * (res.n_eff + 1.0),
            227.80509063776288,
            max_relative = 1e-14
        );
        assert_relative_eq!(res.m.norm_sqr(), 225.80509063776288, max_relative = 1e-14);
        // Thermal photons open a strict gap: invariant equals n(n+1) = 2.
        assert_relative_eq!(res.occupation_invariant(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn thermal_reservoir_matches_reference() {
        let p = SystemParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let res = p.reservoir();
        assert_eq!(res.n_eff, 1.0);
        assert_eq!(res.m, Complex64::new(0.0, 0.0));
        assert_eq!(res.gamma, 3.0);
    }

    #[test]
    fn squeezing_angle_rotates_m_only() {
        let base = SystemParams::new(1.0, 1.5, 0.0, 0.0, 0.0).unwrap();
        let rot = SystemParams::new(1.0, 1.5, 0.7, 0.0, 0.0).unwrap();
        let (a, b) = (base.reservoir(), rot.reservoir());
        assert_eq!(a.n_eff, b.n_eff);
        assert_eq!(a.gamma, b.gamma);
        assert_relative_eq!(a.m.norm(), b.m.norm(), max_relative = 1e-15);
        assert_relative_eq!(
            (b.m / a.m).arg().rem_euclid(2.0 * std::f64::consts::PI),
            0.7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn phi_is_normalized_into_principal_range() {
        let p = SystemParams::new(0.0, 1.0, -1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(
            p.phi,
            2.0 * std::f64::consts::PI - 1.0,
            max_relative = 1e-15
        );
        let q = SystemParams::new(0.0, 1.0, 7.0 * std::f64::consts::PI, 0.0, 0.0).unwrap();
        assert_relative_eq!(q.phi, std::f64::consts::PI, max_relative = 1e-12);
        let r = SystemParams::new(0.0, 1.0, -1e-300, 0.0, 0.0).unwrap();
        assert!((0.0..2.0 * std::f64::consts::PI).contains(&r.phi));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(SystemParams::new(-0.1, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.0, -0.1, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.0, 0.0, 0.0, 0.0, -0.1).is_err());
        assert!(SystemParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::new(0.0, f64::INFINITY, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::with_gamma0(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(SystemParams::with_gamma0(0.0, 0.0, 0.0, 0.0, 0.0, -1.0).is_err());
        assert!(SystemParams::new(0.0, 0.0, 0.0, f64::NEG_INFINITY, 0.0).is_err());
    }

    #[test]
    fn negative_detuning_is_allowed() {
        assert!(SystemParams::new(0.0, 0.0, 0.0, -2.5, 0.3).is_ok());
    }

    #[test]
    fn squeeze_db_matches_reference_points() {
        assert_relative_eq!(squeeze_db(1.5), 13.028834457097555, max_relative = 1e-15);
        assert_relative_eq!(squeeze_db(1.726), 14.991845515300253, max_relative = 1e-15);
        assert_eq!(squeeze_db(0.0), 0.0);
        assert_relative_eq!(
            squeeze_from_db(13.0),
            1.4966803104461297,
            max_relative = 1e-14
        );
        assert_relative_eq!(squeeze_from_db(squeeze_db(0.8)), 0.8, max_relative = 1e-15);
    }

    proptest! {
        /// N(N+1) - |M|^2 = n(n+1) holds for every admissible reservoir.
        #[test]
        fn occupation_invariant_holds(
            n in 0.0..8.0f64,
            r in 0.0..3.0f64,
            phi in 0.0..(2.0 * std::f64::consts::PI),
        ) {
            let p = SystemParams::new(n, r, phi, 0.0, 0.0).unwrap();
            let res = p.reservoir();
            let expect = n * (n + 1.0);
            let scale = 1.0 + res.n_eff * (res.n_eff + 1.0);
            prop_assert!((res.occupation_invariant() - expect).abs() <= 1e-12 * scale);
        }

        /// The physicality bound |M|^2 <= N(N+1) holds with equality only at n = 0.
        #[test]
        fn squeezing_bound_holds(
            n in 0.0..8.0f64,
            r in 0.0..3.0f64,
            phi in 0.0..(2.0 * std::f64::consts::PI),
        ) {
            let res = SystemParams::new(n, r, phi, 0.0, 0.0).unwrap().reservoir();
            let bound = res.n_eff * (res.n_eff + 1.0);
            prop_assert!(res.m.norm_sqr() <= bound + 1e-9 * (1.0 + bound));
            if n > 1e-3 && r > 1e-3 {
                prop_assert!(res.m.norm_sqr() < bound);
            }
        }

        /// gamma always equals gamma0 (2N + 1) and stays positive.
        #[test]
        fn gamma_scales_with_gamma0(
            n in 0.0..4.0f64,
            r in 0.0..2.0f64,
            gamma0 in 0.05..20.0f64,
        ) {
            let res = SystemParams::with_gamma0(n, r, 0.0, 0.0, 0.0, gamma0)
                .unwrap()
                .reservoir();
            prop_assert!(res.gamma > 0.0);
            prop_assert!((res.gamma - gamma0 * (2.0 * res.n_eff + 1.0)).abs()
                <= 1e-12 * res.gamma);
        }
    }
}
