//! Small dense complex matrices for one- and two-qubit operators.
//!
//! Two-qubit operators act on Alice ⊗ Bob with basis index `2·a + b` for the
//! ket `|a, b⟩`, Alice being the left tensor factor. Single-qubit basis states
//! are photon-number (Fock) states `|0⟩`, `|1⟩`, with `σ_z = |1⟩⟨1| − |0⟩⟨0|`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `max |M − M†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Most negative eigenvalue an effect operator may have before it is rejected.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

/// Row-major 4×4 complex matrix on Alice ⊗ Bob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[Complex64; 4]; 4]);

/// Single-qubit operator (Bob's conditioned states, effects, observables).
pub type QubitOperator = Matrix2;

/// Two-qubit density operator.
pub type TwoQubitState = Matrix4;

#[inline]
fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Index of `|a, b⟩` in the two-qubit basis.
#[inline]
pub const fn basis_index(a: usize, b: usize) -> usize {
    2 * a + b
}

impl Matrix2 {
    pub const fn zeros() -> Self {
        Self([[ZERO; 2]; 2])
    }

    pub const fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self([[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]])
    }

    /// `|k⟩⟨k|` for a Fock state `k ∈ {0, 1}`.
    pub fn projector(k: usize) -> Self {
        let mut m = Self::zeros();
        m.0[k][k] = ONE;
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        Self([[ZERO, Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::from_real([[-1.0, 0.0], [0.0, 1.0]])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = &self.0;
        Self([[f(m[0][0]), f(m[0][1])], [f(m[1][0]), f(m[1][1])]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn max_asymmetry(&self) -> f64 {
        let d = *self - self.adjoint();
        d.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    /// `(M + M†)/2`; strips quadrature round-off from nearly Hermitian results.
    pub fn symmetrize(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// `Tr[self · other]`.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let (a, b) = (&self.0, &other.0);
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }

    /// Real expectation `Tr[ρ O]` for Hermitian `ρ` and `O`.
    pub fn expectation(&self, observable: &Self) -> f64 {
        self.trace_product(observable).re
    }

    /// Both eigenvalues `(λ_min, λ_max)` of a Hermitian matrix, closed form.
    pub fn eigenvalues_hermitian(&self) -> Result<(f64, f64)> {
        let asym = self.max_asymmetry();
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let off = 0.5 * (self.0[0][1] + self.0[1][0].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
        Ok((mean - radius, mean + radius))
    }

    /// Bloch representation of `M = (t·1 + x σ_x + y σ_y + z σ_z)/2`, normalized by the trace `t`.
    pub fn bloch_vector(&self) -> BlochVector {
        let t = self.trace().re;
        BlochVector::new(
            self.expectation(&Self::pauli_x()) / t,
            self.expectation(&Self::pauli_y()) / t,
            self.expectation(&Self::pauli_z()) / t,
        )
    }

    /// Tensor product `self ⊗ rhs` (self on Alice).
    pub fn kron(&self, rhs: &Self) -> Matrix4 {
        let mut out = Matrix4::zeros();
        for a in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for bp in 0..2 {
                        out.0[basis_index(a, b)][basis_index(ap, bp)] = self.0[a][ap] * rhs.0[b][bp];
                    }
                }
            }
        }
        out
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Matrix2 {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Matrix2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

impl Matrix4 {
    pub const fn zeros() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    /// `|v⟩⟨v|` for an amplitude vector in the `2·a + b` basis.
    pub fn outer(v: &[Complex64; 4]) -> Self {
        let mut m = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - self.0[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    pub fn symmetrize(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// Matrix element `⟨a, b| M |a', b'⟩`.
    pub fn element(&self, (a, b): (usize, usize), (ap, bp): (usize, usize)) -> Complex64 {
        self.0[basis_index(a, b)][basis_index(ap, bp)]
    }

    /// `Tr_A[W]`: Bob's reduced operator.
    pub fn partial_trace_a(&self) -> Matrix2 {
        let mut out = Matrix2::zeros();
        for b in 0..2 {
            for bp in 0..2 {
                out.0[b][bp] = (0..2).map(|a| self.element((a, b), (a, bp))).sum();
            }
        }
        out
    }

    /// `Tr_B[W]`: Alice's reduced operator.
    pub fn partial_trace_b(&self) -> Matrix2 {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for ap in 0..2 {
                out.0[a][ap] = (0..2).map(|b| self.element((a, b), (ap, b))).sum();
            }
        }
        out
    }

    /// `Tr_A[(F ⊗ 1) W]` without checking `F`.
    pub fn contract_alice(&self, effect: &Matrix2) -> Matrix2 {
        let mut out = Matrix2::zeros();
        for b in 0..2 {
            for bp in 0..2 {
                let mut acc = ZERO;
                for a in 0..2 {
                    for app in 0..2 {
                        acc += effect.0[a][app] * self.element((app, b), (a, bp));
                    }
                }
                out.0[b][bp] = acc;
            }
        }
        out
    }

    /// `Tr_A[(F ⊗ 1) W]`: Bob's unnormalized state after Alice's effect `F`.
    pub fn apply_effect_a(&self, effect: &Matrix2) -> Result<Matrix2> {
        let (min, _) = effect.eigenvalues_hermitian()?;
        if min < -PSD_TOL {
            return Err(Error::InvalidEffect(min));
        }
        Ok(self.contract_alice(effect))
    }

    /// `K W K†` for a local operator `K ⊗ 1` on Alice.
    pub fn conjugate_alice(&self, kraus: &Matrix2) -> Self {
        let k = kraus.kron(&Matrix2::identity());
        k * *self * k.adjoint()
    }
}

impl Add for Matrix4 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Matrix4 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        out
    }
}

/// `σ_θ = cos θ σ_x + sin θ σ_y`.
pub fn pauli_theta(theta: f64) -> Matrix2 {
    let phase = Complex64::from_polar(1.0, theta);
    Matrix2([[ZERO, phase.conj()], [phase, ZERO]])
}

/// Largest eigenvalue of a Hermitian 2×2 matrix.
pub fn eig_max_hermitian2(m: &Matrix2) -> Result<f64> {
    m.eigenvalues_hermitian().map(|(_, max)| max)
}

/// Free-function form of [`Matrix4::partial_trace_a`].
pub fn partial_trace_a(w: &Matrix4) -> Matrix2 {
    w.partial_trace_a()
}

/// Free-function form of [`Matrix4::apply_effect_a`].
pub fn apply_effect_a(w: &Matrix4, effect: &Matrix2) -> Result<Matrix2> {
    w.apply_effect_a(effect)
}

/// Real Bloch vector `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Pure state on the ring of latitude `z` at azimuth `phi`.
    pub fn on_ring(z: f64, phi: f64) -> Self {
        let radius = (1.0 - z * z).max(0.0).sqrt();
        Self::new(radius * phi.cos(), radius * phi.sin(), z)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Length of the projection onto the equatorial plane.
    pub fn equatorial_radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `⟨σ_θ⟩` for this state.
    pub fn equatorial_component(&self, theta: f64) -> f64 {
        self.x * theta.cos() + self.y * theta.sin()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + 1e-12
    }

    /// Density operator `(1 + v·σ)/2`.
    pub fn density_matrix(&self) -> Matrix2 {
        (Matrix2::identity() + Matrix2::pauli_x().scale(self.x) + Matrix2::pauli_y().scale(self.y)
            + Matrix2::pauli_z().scale(self.z))
        .scale(0.5)
    }
}
