//! Independent reference computations built directly on nalgebra.
//!
//! Nothing here calls into the library's linear-algebra layer: states are rebuilt
//! from their definitions and compared against the library's closed forms.
#![allow(dead_code)]

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, Vector4};

pub type C = Complex<f64>;
pub type M4 = Matrix4<C>;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// `(1−η)|00⟩⟨00| + η|ψ⟩⟨ψ|` with `ψ = √χ|01⟩ − √(1−χ)|10⟩`, basis index `2a + b`.
/// Accepts η outside [0, 1] so the bisection oracle can bracket past the physical range.
pub fn oracle_state(eta: f64, chi: f64) -> M4 {
    let vac = Vector4::new(c(1.0), c(0.0), c(0.0), c(0.0));
    let psi = Vector4::new(c(0.0), c(chi.sqrt()), c(-(1.0 - chi).sqrt()), c(0.0));
    vac * vac.adjoint() * c(1.0 - eta) + psi * psi.adjoint() * c(eta)
}

/// Alice-side amplitude damping with transmission `eta_h`.
pub fn oracle_lossy_state(eta: f64, chi: f64, eta_h: f64) -> M4 {
    let w = oracle_state(eta, chi);
    let id = Matrix2::<C>::identity();
    let lose = Matrix2::new(c(0.0), c((1.0 - eta_h).sqrt()), c(0.0), c(0.0));
    let keep = Matrix2::new(c(1.0), c(0.0), c(0.0), c(eta_h.sqrt()));
    let mut out = M4::zeros();
    for k in [lose, keep] {
        let big = k.kronecker(&id);
        out += big * w * big.adjoint();
    }
    out
}

pub fn hermitian_eigenvalues(m: &M4) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &M4) -> f64 {
    hermitian_eigenvalues(m)[0]
}

fn pauli() -> [Matrix2<C>; 3] {
    let i = C::new(0.0, 1.0);
    [
        Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
        Matrix2::new(c(0.0), -i, i, c(0.0)),
        Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)),
    ]
}

/// Wootters concurrence from a subnormalized eigen-decomposition `ρ = Σ|v_i⟩⟨v_i|`:
/// the λ's are the singular values of `τ_ij = ⟨v_i|(σ_y⊗σ_y)|v_j*⟩`, and
/// `C = max(0, λ1 − λ2 − λ3 − λ4)`. Numerically null eigenvectors are dropped,
/// which avoids square roots of rounding noise.
pub fn wootters_concurrence(rho: &M4) -> f64 {
    let sy = pauli()[1];
    let yy = sy.kronecker(&sy);
    let herm = (rho + rho.adjoint()) * c(0.5);
    let eig = herm.symmetric_eigen();
    let support: Vec<Vector4<C>> = (0..4)
        .filter(|&k| eig.eigenvalues[k] > 1e-13)
        .map(|k| eig.eigenvectors.column(k) * c(eig.eigenvalues[k].sqrt()))
        .collect();
    let n = support.len();
    let tau = nalgebra::DMatrix::<C>::from_fn(n, n, |i, j| (support[i].adjoint() * yy * support[j].conjugate())[(0, 0)]);
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.resize(4, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// Horodecki quantity: sum of the two largest eigenvalues of `TᵀT`,
/// `T_ij = Tr[ρ σ_i⊗σ_j]`. The maximal CHSH value is `2√M`.
pub fn horodecki_m(rho: &M4) -> f64 {
    let s = pauli();
    let t = Matrix3::from_fn(|i, j| (rho * s[i].kronecker(&s[j])).trace().re);
    let mut ev: Vec<f64> = (t.transpose() * t).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev[0] + ev[1]
}

/// Smallest η at which `M(W_η^χ) = 1`, by bisection on `[0, 4]`; `None` if no crossing there.
pub fn horodecki_threshold(chi: f64) -> Option<f64> {
    let f = |eta: f64| horodecki_m(&oracle_state(eta, chi)) - 1.0;
    let (mut lo, mut hi) = (0.0, 4.0);
    if f(hi) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Converts the library's dense 4×4 layout into nalgebra form.
pub fn to_nalgebra(m: &[[num_complex::Complex64; 4]; 4]) -> M4 {
    M4::from_fn(|i, j| C::new(m[i][j].re, m[i][j].im))
}
