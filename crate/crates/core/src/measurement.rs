//! Alice's measurements: homodyne detection on the lossy state and inefficient
//! photodetection on the loss-free state, with Bob's conditioned states.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::linalg::{pauli_theta, Matrix2};
use crate::quadrature::gaussian;
use crate::state::SplitPhotonState;

/// Homodyne effect for LO phase `theta` and outcome `r`:
/// `G(r)·(|0⟩⟨0| + r σ_θ + r²|1⟩⟨1|)` with `G` the standard normal density.
pub fn homodyne_effect(theta: f64, r: f64) -> Matrix2 {
    let poly = Matrix2::projector(0) + pauli_theta(theta).scale(r) + Matrix2::projector(1).scale(r * r);
    poly.scale(gaussian(r))
}

/// Bob's unnormalized state `Tr_A[F^θ(r) W]` and its trace, Alice's outcome density at `r`.
pub fn conditioned_state_homodyne(state: &SplitPhotonState, theta: f64, r: f64) -> Result<(Matrix2, f64)> {
    if !state.loss_applied() {
        return Err(Error::State("homodyne conditioning expects the lossy state"));
    }
    let rho = state.matrix.contract_alice(&homodyne_effect(theta, r));
    let density = rho.trace().re;
    Ok((rho, density))
}

/// Alice's homodyne outcome density is `w0·G(r) + w1·r²G(r)`, independent of θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureWeights {
    pub w0: f64,
    pub w1: f64,
}

impl MixtureWeights {
    pub fn density(&self, r: f64) -> f64 {
        (self.w0 + self.w1 * r * r) * gaussian(r)
    }
}

/// Splits Alice's outcome density into its vacuum and one-photon parts;
/// `w1` is Alice's reduced one-photon population.
pub fn homodyne_marginal_density(state: &SplitPhotonState) -> MixtureWeights {
    let alice = state.alice_reduced();
    MixtureWeights {
        w0: alice.0[0][0].re,
        w1: alice.0[1][1].re,
    }
}

/// Click (`+`) / no-click (`−`) statistics of Alice's photodetector, with Bob's
/// conditional `⟨σ_z⟩` in each branch. A `None` conditional marks a branch of zero probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotodetectionOutcome {
    pub p_plus: f64,
    pub p_minus: f64,
    pub z_plus: Option<f64>,
    pub z_minus: Option<f64>,
}

impl PhotodetectionOutcome {
    /// Alice always reports `+1` for the σ_z setting; Bob sees his unconditioned `⟨σ_z⟩`.
    pub fn trivial(z: f64) -> Self {
        Self {
            p_plus: 1.0,
            p_minus: 0.0,
            z_plus: Some(z),
            z_minus: None,
        }
    }

    pub fn branches(&self) -> [(f64, Option<f64>); 2] {
        [(self.p_plus, self.z_plus), (self.p_minus, self.z_minus)]
    }

    /// `℘₊√(1−z₊²) + ℘₋√(1−z₋²)`.
    pub fn nonlinear_factor(&self) -> f64 {
        self.branches()
            .iter()
            .map(|&(p, z)| match z {
                Some(z) => p * (1.0 - z * z).max(0.0).sqrt(),
                None => 0.0,
            })
            .sum()
    }

    /// `℘₊z₊ + ℘₋z₋`, the unconditioned `⟨σ_z⟩`.
    pub fn mean_z(&self) -> f64 {
        self.branches().iter().map(|&(p, z)| p * z.unwrap_or(0.0)).sum()
    }
}

/// `F₊ = η_p|1⟩⟨1|` and `F₋ = 1 − F₊`.
pub fn photodetection_effects(eta_p: f64) -> (Matrix2, Matrix2) {
    let click = Matrix2::projector(1).scale(eta_p);
    (click, Matrix2::identity() - click)
}

/// Photodetection statistics on the loss-free state.
pub fn photodetect(state: &SplitPhotonState, eta_p: f64) -> Result<PhotodetectionOutcome> {
    check_probability("eta_p", eta_p)?;
    if state.loss_applied() {
        return Err(Error::State("photodetection acts on the loss-free state"));
    }
    let (eta, chi) = (state.eta, state.chi);
    let p_plus = eta * eta_p * (1.0 - chi);
    let p_minus = 1.0 - p_plus;
    let z_plus = (p_plus > 0.0).then_some(-1.0);
    let z_minus = (p_minus > 0.0).then(|| (2.0 * eta * chi - p_minus) / p_minus);
    Ok(PhotodetectionOutcome {
        p_plus,
        p_minus,
        z_plus,
        z_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{GaussLegendre, DEFAULT_NODES, R_MAX};
    use crate::state::{apply_alice_loss, make_state};
    use std::f64::consts::PI;

    fn lossy(eta: f64, chi: f64, eta_h: f64) -> SplitPhotonState {
        apply_alice_loss(&make_state(eta, chi).unwrap(), eta_h).unwrap()
    }

    fn integrate_matrix(rule: &GaussLegendre, f: impl Fn(f64) -> Matrix2) -> Matrix2 {
        let mut acc = Matrix2::zeros();
        for (r, w) in rule.points(-R_MAX, R_MAX) {
            acc += f(r).scale(w);
        }
        acc
    }

    fn max_diff(a: &Matrix2, b: &Matrix2) -> f64 {
        (*a - *b).0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn effect_at_origin() {
        let f = homodyne_effect(0.7, 0.0);
        let expected = Matrix2::projector(0).scale(1.0 / (2.0 * PI).sqrt());
        assert!(max_diff(&f, &expected) < 1e-16);
    }

    #[test]
    fn effect_is_rank_one_at_unit_outcome() {
        let f = homodyne_effect(0.0, 1.0);
        let (lo, hi) = f.eigenvalues_hermitian().unwrap();
        assert!(lo.abs() < 1e-15);
        assert!((hi - 2.0 * gaussian(1.0)).abs() < 1e-15);
    }

    #[test]
    fn effect_psd_on_grid() {
        for i in 0..40 {
            for j in 0..81 {
                let theta = -PI + i as f64 * PI / 20.0;
                let r = -8.0 + j as f64 * 0.2;
                let (lo, _) = homodyne_effect(theta, r).eigenvalues_hermitian().unwrap();
                assert!(lo >= -1e-12);
            }
        }
    }

    #[test]
    fn povm_completeness() {
        let rule = GaussLegendre::new(DEFAULT_NODES);
        for &theta in &[0.0, 0.4, -1.3, PI / 2.0] {
            let total = integrate_matrix(&rule, |r| homodyne_effect(theta, r));
            assert!(max_diff(&total, &Matrix2::identity()) < 1e-8);
        }
    }

    #[test]
    fn vacuum_sees_gaussian_noise() {
        let w = lossy(0.0, 0.5, 0.9);
        for &r in &[-2.0, 0.0, 0.3, 3.1] {
            let (rho, p) = conditioned_state_homodyne(&w, 0.2, r).unwrap();
            assert!(max_diff(&rho, &Matrix2::projector(0).scale(gaussian(r))) < 1e-16);
            assert!((p - gaussian(r)).abs() < 1e-16);
        }
    }

    #[test]
    fn conditioning_requires_loss_flag() {
        assert!(conditioned_state_homodyne(&make_state(0.5, 0.5).unwrap(), 0.0, 0.0).is_err());
    }

    #[test]
    fn total_probability_recovers_bob_marginal() {
        let rule = GaussLegendre::new(DEFAULT_NODES);
        let w = lossy(0.64, 0.3, 0.86);
        for &theta in &[0.0, 1.0, -0.5] {
            let total = integrate_matrix(&rule, |r| conditioned_state_homodyne(&w, theta, r).unwrap().0);
            assert!(max_diff(&total, &w.bob_reduced()) < 1e-8);
            let mass = rule.integrate(-R_MAX, R_MAX, |r| conditioned_state_homodyne(&w, theta, r).unwrap().1);
            assert!((mass - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn marginal_weights() {
        assert_eq!(homodyne_marginal_density(&lossy(0.0, 0.5, 0.86)), MixtureWeights { w0: 1.0, w1: 0.0 });
        let mw = homodyne_marginal_density(&lossy(1.0, 0.0, 1.0));
        assert_eq!((mw.w0, mw.w1), (0.0, 1.0));
        let mw = homodyne_marginal_density(&lossy(0.64, 0.5, 0.86));
        assert!((mw.w1 - 0.2752).abs() < 1e-15);
        assert!((mw.w0 + mw.w1 - 1.0).abs() < 1e-15);
        // density agrees with the trace of the conditioned state
        let w = lossy(0.64, 0.5, 0.86);
        for &r in &[-1.5, 0.2, 2.5] {
            let (_, p) = conditioned_state_homodyne(&w, 0.9, r).unwrap();
            assert!((p - mw.density(r)).abs() < 1e-15);
        }
    }

    #[test]
    fn rotational_covariance() {
        let w = lossy(0.7, 0.3, 0.8);
        for &r in &[-2.0, -0.3, 0.8, 1.9] {
            let (rho0, _) = conditioned_state_homodyne(&w, 0.0, r).unwrap();
            let reference = rho0.expectation(&pauli_theta(0.0));
            for k in 0..24 {
                let theta = -PI / 2.0 + k as f64 * PI / 23.0;
                let (rho, _) = conditioned_state_homodyne(&w, theta, r).unwrap();
                assert!((rho.expectation(&pauli_theta(theta)) - reference).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn photodetection_closed_form() {
        let pd = photodetect(&make_state(0.64, 0.5).unwrap(), 0.3).unwrap();
        assert!((pd.p_plus - 0.096).abs() < 1e-15);
        assert_eq!(pd.z_plus, Some(-1.0));
        assert!((pd.z_minus.unwrap() - (-0.292_035_398_230_088_5)).abs() < 1e-12);

        let pd = photodetect(&make_state(0.64, 0.3).unwrap(), 0.0).unwrap();
        assert_eq!(pd.p_plus, 0.0);
        assert_eq!(pd.z_plus, None);
        assert!((pd.z_minus.unwrap() - (2.0 * 0.64 * 0.3 - 1.0)).abs() < 1e-15);

        assert!(photodetect(&lossy(0.5, 0.5, 0.5), 0.3).is_err());
    }

    #[test]
    fn photodetection_matches_operator_route() {
        for &(eta, chi, eta_p) in &[(0.64, 0.5, 0.3), (0.9, 0.08, 0.7), (0.3, 0.92, 1.0), (1.0, 0.0, 1.0)] {
            let w = make_state(eta, chi).unwrap();
            let pd = photodetect(&w, eta_p).unwrap();
            let (fp, fm) = photodetection_effects(eta_p);
            for ((p, z), f) in pd.branches().into_iter().zip([fp, fm]) {
                let rho = w.matrix.apply_effect_a(&f).unwrap();
                let mass = rho.trace().re;
                assert!((mass - p).abs() < 1e-14);
                if let Some(z) = z {
                    let zz = rho.expectation(&Matrix2::pauli_z()) / mass;
                    assert!((zz - z).abs() < 1e-12, "{zz} vs {z}");
                    // conditioned states are σ_z mixtures
                    assert!(rho.0[0][1].norm() < 1e-15);
                }
            }
            let unconditioned = w.bob_reduced().expectation(&Matrix2::pauli_z());
            assert!((pd.mean_z() - unconditioned).abs() < 1e-12);
            assert!((pd.p_plus + pd.p_minus - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn nonlinear_factor_of_trivial_outcome() {
        assert_eq!(PhotodetectionOutcome::trivial(0.0).nonlinear_factor(), 1.0);
        assert!((PhotodetectionOutcome::trivial(0.6).nonlinear_factor() - 0.8).abs() < 1e-15);
    }
}
