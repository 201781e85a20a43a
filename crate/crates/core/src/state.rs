//! The split single-photon state family and Alice-side loss.

use num_complex::Complex64;

use crate::error::{check_probability, Error, Result};
use crate::linalg::{basis_index, Matrix2, Matrix4, TwoQubitState};

/// `(1 − η)|00⟩⟨00| + η|ψ^χ⟩⟨ψ^χ|` with `|ψ^χ⟩ = √χ|0,1⟩ − √(1−χ)|1,0⟩`,
/// optionally followed by photon loss on Alice's mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPhotonState {
    pub eta: f64,
    pub chi: f64,
    /// Homodyne efficiency of the loss already applied, if any.
    pub loss_eta_h: Option<f64>,
    pub matrix: TwoQubitState,
}

impl SplitPhotonState {
    pub fn loss_applied(&self) -> bool {
        self.loss_eta_h.is_some()
    }

    /// `⟨a,b|W|a',b'⟩` (real part; every entry of this family is real).
    pub fn entry(&self, ket: (usize, usize), bra: (usize, usize)) -> f64 {
        self.matrix.element(ket, bra).re
    }

    /// Bob's reduced state `Tr_A[W]`.
    pub fn bob_reduced(&self) -> Matrix2 {
        self.matrix.partial_trace_a()
    }

    /// Alice's reduced state `Tr_B[W]`.
    pub fn alice_reduced(&self) -> Matrix2 {
        self.matrix.partial_trace_b()
    }
}

/// Prepares `W_η^χ`.
pub fn make_state(eta: f64, chi: f64) -> Result<SplitPhotonState> {
    check_probability("eta", eta)?;
    check_probability("chi", chi)?;
    let mut vacuum = [Complex64::new(0.0, 0.0); 4];
    vacuum[basis_index(0, 0)] = Complex64::new(1.0, 0.0);
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    psi[basis_index(0, 1)] = Complex64::new(chi.sqrt(), 0.0);
    psi[basis_index(1, 0)] = Complex64::new(-(1.0 - chi).sqrt(), 0.0);
    let matrix = Matrix4::outer(&vacuum).scale(1.0 - eta) + Matrix4::outer(&psi).scale(eta);
    Ok(SplitPhotonState {
        eta,
        chi,
        loss_eta_h: None,
        matrix,
    })
}

/// Applies photon loss `1 − η_h` on Alice's mode through the Kraus pair
/// `M_lose = √(1−η_h)|0⟩⟨1|`, `M_keep = |0⟩⟨0| + √η_h|1⟩⟨1|`.
pub fn apply_alice_loss(state: &SplitPhotonState, eta_h: f64) -> Result<SplitPhotonState> {
    check_probability("eta_h", eta_h)?;
    if state.loss_applied() {
        return Err(Error::State("Alice-side loss has already been applied"));
    }
    let lose = Matrix2::from_real([[0.0, (1.0 - eta_h).sqrt()], [0.0, 0.0]]);
    let keep = Matrix2::from_real([[1.0, 0.0], [0.0, eta_h.sqrt()]]);
    let matrix = state.matrix.conjugate_alice(&lose) + state.matrix.conjugate_alice(&keep);
    Ok(SplitPhotonState {
        loss_eta_h: Some(eta_h),
        matrix,
        ..state.clone()
    })
}

/// `2η√(χ(1−χ))`.
pub fn concurrence(state: &SplitPhotonState) -> Result<f64> {
    if state.loss_applied() {
        return Err(Error::State("concurrence is defined for the loss-free state"));
    }
    Ok(2.0 * state.eta * (state.chi * (1.0 - state.chi)).sqrt())
}

/// η above which the transverse correlations alone, `T_xx² + T_yy² = 8η²χ(1−χ)`,
/// exceed 1: `1/[2√(2χ(1−χ))]`, `+∞` at χ ∈ {0, 1}.
pub fn chsh_threshold_transverse(chi: f64) -> f64 {
    if chi <= 0.0 || chi >= 1.0 {
        return f64::INFINITY;
    }
    1.0 / (2.0 * (2.0 * chi * (1.0 - chi)).sqrt())
}

/// Minimum η for a CHSH violation to be possible, `+∞` at χ ∈ {0, 1}.
///
/// The correlation matrix of `W` is diagonal with `T_xx² = T_yy² = 4η²χ(1−χ)` and
/// `T_zz² = (1−2η)²`, so the sum of its two largest squared entries exceeds 1 once
/// either `8η²χ(1−χ) > 1` or `(1−2η)² + 4η²χ(1−χ) > 1`. The second boundary,
/// `η = 1/(1 + χ(1−χ))`, is the lower one for strongly unbalanced splits
/// (`χ(1−χ) < (√2 − 1)²`).
pub fn chsh_threshold(chi: f64) -> f64 {
    if chi <= 0.0 || chi >= 1.0 {
        return f64::INFINITY;
    }
    let c = chi * (1.0 - chi);
    chsh_threshold_transverse(chi).min(1.0 / (1.0 + c))
}

pub fn chsh_possible(eta: f64, chi: f64) -> bool {
    eta > chsh_threshold(chi)
}
