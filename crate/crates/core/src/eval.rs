//! Quantum predictions for the steering inequality and the parameter-space
//! feasibility conditions.

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use crate::bounds::{bound, Outcome};
use crate::error::{check_probability, Result};
use crate::linalg::Matrix2;
use crate::measurement::{conditioned_state_homodyne, photodetect, PhotodetectionOutcome};
use crate::params::{ExperimentParams, SettingCount};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES, R_MAX};
use crate::state::{apply_alice_loss, make_state, SplitPhotonState};

/// `√(2/π)·η·√η_h`: the equatorial correlation of the evenly split photon
/// when Alice reports `a(r) = −sign(r)`.
pub fn quantum_correlation(eta: f64, eta_h: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    check_probability("eta_h", eta_h)?;
    Ok(FRAC_2_PI.sqrt() * eta * eta_h.sqrt())
}

/// `2√(2/π)·η·√(η_h χ(1−χ))`, the same correlation for an arbitrary split.
pub fn quantum_correlation_split(eta: f64, chi: f64, eta_h: f64) -> Result<f64> {
    check_probability("eta", eta)?;
    check_probability("chi", chi)?;
    check_probability("eta_h", eta_h)?;
    Ok(2.0 * FRAC_2_PI.sqrt() * eta * (eta_h * chi * (1.0 - chi)).sqrt())
}

/// `r ↦ Tr[ρ̃_B^0(r) σ_x]`, the density-weighted correlation Alice can exploit at phase 0.
pub fn correlation_kernel(state: &SplitPhotonState, r: f64) -> Result<f64> {
    let (rho, _) = conditioned_state_homodyne(state, 0.0, r)?;
    Ok(rho.expectation(&Matrix2::pauli_x()))
}

/// Pointwise maximizer of `∫ dr a(r) k(r)` over dichotomic `a`: `a(r) = sign k(r)`.
/// Where the kernel vanishes Alice's choice is irrelevant; `+1` is reported.
pub fn optimal_sign_strategy<K>(kernel: K) -> impl Fn(f64) -> Outcome
where
    K: Fn(f64) -> f64,
{
    move |r| Outcome::from_sign(kernel(r))
}

/// `a(r) = −sign(r)`, optimal for the split-photon family.
pub fn anti_sign_report(r: f64) -> Outcome {
    if r > 0.0 {
        Outcome::Minus
    } else {
        Outcome::Plus
    }
}

/// `∫ dr a(r) Tr[ρ̃_B^0(r) σ_x]` by Gauss–Legendre on `[−8, 8]`, split at `breakpoints`
/// (the points where `a` may switch sign).
pub fn correlation_quadrature(
    state: &SplitPhotonState,
    report: impl Fn(f64) -> Outcome,
    breakpoints: &[f64],
) -> Result<f64> {
    let rule = GaussLegendre::new(DEFAULT_NODES);
    let mut edges: Vec<f64> = breakpoints.iter().copied().filter(|b| b.abs() < R_MAX).collect();
    edges.push(-R_MAX);
    edges.push(R_MAX);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let mut piece = 0.0;
        for (r, w) in rule.points(pair[0], pair[1]) {
            piece += w * report(r).as_f64() * correlation_kernel(state, r)?;
        }
        total += piece;
    }
    Ok(total)
}

/// Quadrature route to the equatorial correlation for `a(r) = −sign(r)`.
pub fn quantum_correlation_quadrature(eta: f64, chi: f64, eta_h: f64) -> Result<f64> {
    let state = apply_alice_loss(&make_state(eta, chi)?, eta_h)?;
    correlation_quadrature(&state, anti_sign_report, &[0.0])
}

/// `f(n)·[℘₊√(1−z₊²) + ℘₋√(1−z₋²)]`.
pub fn nonlinear_rhs(n: SettingCount, pd: &PhotodetectionOutcome) -> Result<f64> {
    Ok(bound(n)? * pd.nonlinear_factor())
}

/// The same right-hand side after substituting the photodetection statistics:
/// `f(n)·√(4ηχ[1 − ηχ − ηη_p(1−χ)])`.
pub fn nonlinear_rhs_closed_form(params: &ExperimentParams) -> Result<f64> {
    let ExperimentParams { eta, chi, eta_p, .. } = *params;
    let inner = 4.0 * eta * chi * (1.0 - eta * chi - eta * eta_p * (1.0 - chi));
    Ok(bound(params.n_settings)? * inner.max(0.0).sqrt())
}

/// Bracketed left-hand side of a feasibility condition and whether it exceeds 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub lhs_value: f64,
    pub satisfied: bool,
}

impl ConditionCheck {
    fn above_one(lhs_value: f64) -> Self {
        Self {
            lhs_value,
            satisfied: lhs_value > 1.0,
        }
    }
}

/// `η[χ + (1−χ)(η_p + (2/π)η_h/f(n)²)] > 1` guarantees a violation.
pub fn sufficient_condition(params: &ExperimentParams) -> Result<ConditionCheck> {
    let f = bound(params.n_settings)?;
    let ExperimentParams {
        eta, chi, eta_h, eta_p, ..
    } = *params;
    Ok(ConditionCheck::above_one(
        eta * (chi + (1.0 - chi) * (eta_p + FRAC_2_PI * eta_h / (f * f))),
    ))
}

/// `η[χ + (1−χ)(η_p + 2η_h)] > 1` is required for any demonstration.
pub fn necessary_condition(params: &ExperimentParams) -> ConditionCheck {
    let ExperimentParams {
        eta, chi, eta_h, eta_p, ..
    } = *params;
    ConditionCheck::above_one(eta * (chi + (1.0 - chi) * (eta_p + 2.0 * eta_h)))
}

/// The weaker budget requirement `η_p + 2η_h > 1` (Alice's detectors alone).
pub fn detector_budget_condition(params: &ExperimentParams) -> ConditionCheck {
    ConditionCheck::above_one(params.eta_p + 2.0 * params.eta_h)
}

/// η above which the evenly split photon violates the continuum inequality: `4/(2 + πη_h + 2η_p)`.
pub fn even_split_threshold(eta_h: f64, eta_p: f64) -> Result<f64> {
    check_probability("eta_h", eta_h)?;
    check_probability("eta_p", eta_p)?;
    Ok(4.0 / (2.0 + PI * eta_h + 2.0 * eta_p))
}

/// η above which the sufficient condition holds for the remaining parameters (ignores `params.eta`).
pub fn eta_threshold(params: &ExperimentParams) -> Result<f64> {
    let unit = ExperimentParams {
        eta: 1.0,
        ..params.clone()
    };
    let coefficient = sufficient_condition(&unit)?.lhs_value;
    Ok(if coefficient > 0.0 { 1.0 / coefficient } else { f64::INFINITY })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Violated,
    NotViolated,
}

/// Predicted inequality sides, margins, and feasibility verdicts for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringReport {
    pub params: ExperimentParams,
    /// Quantum equatorial correlation (same for every setting count).
    pub lhs: f64,
    /// LHS bound at the configured setting count.
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
    /// Bound and margin with the continuum of settings, for comparison.
    pub rhs_infinite: f64,
    pub margin_infinite: f64,
    pub photodetection: PhotodetectionOutcome,
    pub sufficient: ConditionCheck,
    pub necessary: ConditionCheck,
    pub detector_budget: ConditionCheck,
    pub concurrence: f64,
    /// χ ∈ {0, 1}: Alice and Bob share no entanglement; the verdict is forced to not violated.
    pub unentangled: bool,
}

/// Evaluates both sides of the nonlinear inequality with homodyne equatorial
/// settings and photodetection for the σ_z setting.
pub fn evaluate_inequality(params: &ExperimentParams) -> Result<SteeringReport> {
    let params = params.clone().validated()?;
    let state = make_state(params.eta, params.chi)?;
    let pd = photodetect(&state, params.eta_p)?;
    let lhs = quantum_correlation_split(params.eta, params.chi, params.eta_h)?;
    let rhs = nonlinear_rhs(params.n_settings, &pd)?;
    let rhs_infinite = nonlinear_rhs(SettingCount::Infinite, &pd)?;
    let margin = lhs - rhs;
    let unentangled = params.is_unentangled_split();
    let verdict = if margin > 0.0 && !unentangled {
        Verdict::Violated
    } else {
        Verdict::NotViolated
    };
    Ok(SteeringReport {
        lhs,
        rhs,
        margin,
        verdict,
        rhs_infinite,
        margin_infinite: lhs - rhs_infinite,
        photodetection: pd,
        sufficient: sufficient_condition(&params)?,
        necessary: necessary_condition(&params),
        detector_budget: detector_budget_condition(&params),
        concurrence: crate::state::concurrence(&state)?,
        unentangled,
        params,
    })
}
