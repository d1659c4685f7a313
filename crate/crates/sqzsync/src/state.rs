// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-level state representations: 2x2 complex matrices, density matrices,
//! and Bloch vectors.
//!
//! Basis convention: index 0 is the excited state `|1>`, index 1 is the
//! ground state `|0>`, so `sigma_z |1> = +|1>` and `sigma_plus = |1><0|` has
//! its single nonzero entry in row 0, column 1. A density matrix `rho` and a
//! Bloch vector `v` are related by `rho = (I + v . sigma) / 2` with
//! `v_k = Tr(sigma_k rho)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqzError};

/// Absolute tolerance for hermiticity and unit-trace checks.
const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues may undershoot zero by this much and still count as positive.
const POSITIVITY_TOL: f64 = 1e-9;
/// Bloch norms may overshoot one by this much and still count as physical.
const BLOCH_NORM_TOL: f64 = 1e-9;

/// Dense 2x2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    /// The zero matrix.
    pub fn zero() -> Self {
        Mat2([[Complex64::ZERO; 2]; 2])
    }

    /// The identity matrix.
    pub fn identity() -> Self {
        Mat2([
            [Complex64::ONE, Complex64::ZERO],
            [Complex64::ZERO, Complex64::ONE],
        ])
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }

    /// Entry-wise sum.
    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    /// Entry-wise difference.
    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    /// Scalar multiple by a complex factor.
    pub fn scale(&self, k: Complex64) -> Mat2 {
        let mut out = *self;
        for row in &mut out.0 {
            for e in row {
                *e *= k;
            }
        }
        out
    }

    /// Scalar multiple by a real factor.
    pub fn scale_re(&self, k: f64) -> Mat2 {
        self.scale(Complex64::new(k, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    /// Trace.
    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &Mat2) -> Mat2 {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Anticommutator `{self, rhs}`.
    pub fn anticommutator(&self, rhs: &Mat2) -> Mat2 {
        self.mul(rhs).add(&rhs.mul(self))
    }

    /// Largest entry-wise absolute deviation from `rhs`.
    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut max = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                max = max.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        max
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Mat2::zero())
    }

    /// Eigenvalues of a hermitian matrix, ascending. The caller must ensure
    /// hermiticity; only the lower triangle's conjugate symmetry is used.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let half_gap = 0.5 * (a - d);
        let s = (half_gap * half_gap + self.0[0][1].norm_sqr()).sqrt();
        let mean = 0.5 * (a + d);
        [mean - s, mean + s]
    }
}

/// Pauli x matrix.
pub fn sigma_x() -> Mat2 {
    Mat2([
        [Complex64::ZERO, Complex64::ONE],
        [Complex64::ONE, Complex64::ZERO],
    ])
}

/// Pauli y matrix.
pub fn sigma_y() -> Mat2 {
    Mat2([
        [Complex64::ZERO, Complex64::new(0.0, -1.0)],
        [Complex64::new(0.0, 1.0), Complex64::ZERO],
    ])
}

/// Pauli z matrix (`+1` on the excited state).
pub fn sigma_z() -> Mat2 {
    Mat2([
        [Complex64::ONE, Complex64::ZERO],
        [Complex64::ZERO, -Complex64::ONE],
    ])
}

/// Raising operator `sigma_plus = |1><0|`.
pub fn sigma_plus() -> Mat2 {
    Mat2([
        [Complex64::ZERO, Complex64::ONE],
        [Complex64::ZERO, Complex64::ZERO],
    ])
}

/// Lowering operator `sigma_minus = |0><1|`.
pub fn sigma_minus() -> Mat2 {
    Mat2([
        [Complex64::ZERO, Complex64::ZERO],
        [Complex64::ONE, Complex64::ZERO],
    ])
}

/// Bloch vector `(x, y, z)` with `x^2 + y^2 + z^2 <= 1` for physical states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Builds a vector without a norm check (callers validate when needed).
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Components as an array, `[x, y, z]`.
    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Builds from an array `[x, y, z]`.
    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }

    /// Unit vector pointing along polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        BlochVector::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        )
    }

    /// Polar angle `theta = atan2(hypot(x, y), z)` in `[0, pi]`.
    pub fn theta(&self) -> f64 {
        self.x.hypot(self.y).atan2(self.z)
    }

    /// Azimuth `phi = atan2(y, x)` wrapped into `[0, 2pi)`.
    pub fn phi(&self) -> f64 {
        let a = self.y.atan2(self.x).rem_euclid(2.0 * std::f64::consts::PI);
        if a >= 2.0 * std::f64::consts::PI {
            0.0
        } else {
            a
        }
    }

    /// Largest component-wise deviation from `rhs`.
    pub fn max_abs_diff(&self, rhs: &BlochVector) -> f64 {
        (self.x - rhs.x)
            .abs()
            .max((self.y - rhs.y).abs())
            .max((self.z - rhs.z).abs())
    }
}

/// Validated density matrix of the two-level system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace, and positivity of `m`.
    pub fn new(m: Mat2) -> Result<Self> {
        if m.max_abs_diff(&m.adjoint()) > DENSITY_TOL {
            return Err(SqzError::NotADensityMatrix {
                reason: "matrix is not hermitian",
            });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(SqzError::NotADensityMatrix {
                reason: "trace is not 1",
            });
        }
        let [lo, _] = m.hermitian_eigenvalues();
        if lo < -POSITIVITY_TOL {
            return Err(SqzError::NotADensityMatrix {
                reason: "matrix has a negative eigenvalue",
            });
        }
        Ok(DensityMatrix { m })
    }

    /// `rho = (I + v . sigma) / 2`; fails if `|v| > 1` beyond tolerance.
    pub fn from_bloch(v: &BlochVector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + BLOCH_NORM_TOL {
            return Err(SqzError::BlochNormExceeded { norm });
        }
        let m = Mat2([
            [
                Complex64::new(0.5 * (1.0 + v.z), 0.0),
                Complex64::new(0.5 * v.x, -0.5 * v.y),
            ],
            [
                Complex64::new(0.5 * v.x, 0.5 * v.y),
                Complex64::new(0.5 * (1.0 - v.z), 0.0),
            ],
        ]);
        Ok(DensityMatrix { m })
    }

    /// Pure state `|theta, phi> = cos(theta/2) |1> + sin(theta/2) e^{i phi} |0>`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let c = Complex64::new((0.5 * theta).cos(), 0.0);
        let s = Complex64::from_polar((0.5 * theta).sin(), phi);
        let m = Mat2([[c * c.conj(), c * s.conj()], [s * c.conj(), s * s.conj()]]);
        DensityMatrix { m }
    }

    /// The underlying matrix.
    pub fn mat(&self) -> &Mat2 {
        &self.m
    }

    /// Bloch components `v_k = Tr(sigma_k rho)`.
    pub fn to_bloch(&self) -> BlochVector {
        BlochVector::from_array(bloch_projection(&self.m))
    }
}

/// Projects any 2x2 matrix onto the Pauli basis: `[Tr(sigma_x m), Tr(sigma_y m),
/// Tr(sigma_z m)]`, real parts. For hermitian input the traces are already real.
pub fn bloch_projection(m: &Mat2) -> [f64; 3] {
    let x = (m.0[1][0] + m.0[0][1]).re;
    let y = (Complex64::new(0.0, 1.0) * m.0[0][1] - Complex64::new(0.0, 1.0) * m.0[1][0]).re;
    let z = (m.0[0][0] - m.0[1][1]).re;
    [x, y, z]
}
