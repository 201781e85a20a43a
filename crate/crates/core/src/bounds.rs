//! Local-hidden-state side of the steering inequalities.
//!
//! For `n` equatorial settings the phases are `θ_i = iπ/n`, `i = 0..n`. The
//! bound `f(n)` is the largest eigenvalue of `(1/n)Σ α_i σ_{θ_i}` maximized over
//! sign patterns `α`; it decreases from 1 at `n = 1` towards `2/π`.
//!
//! Explicit LHS ensembles here use the "nearest half" response rule: for the
//! setting `θ` Alice reports `+1` when the state she sent lies in the half of the
//! Bloch sphere around `+σ_θ`. A state exactly orthogonal to the axis is
//! assigned `+1`; it contributes zero correlation either way.

use std::f64::consts::{FRAC_2_PI, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_max_hermitian2, pauli_theta, BlochVector, Matrix2};
use crate::measurement::PhotodetectionOutcome;
use crate::params::SettingCount;

/// Largest `n` accepted by [`f_n_bruteforce`] (2^(n−1) sign patterns).
pub const BRUTE_FORCE_LIMIT: u32 = 20;

/// A dichotomic report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Outcome {
    pub fn from_sign(x: f64) -> Self {
        if x >= 0.0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }
}

/// `max λ_max` of the equatorial operator for a setting count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub n: SettingCount,
    pub value: f64,
}

/// Bound for the continuum of equatorial settings.
pub fn c_plane() -> f64 {
    FRAC_2_PI
}

/// Closed form `f(n) = (1/n)(|sin(nπ/2)| + 2 Σ_{k=1}^{⌊n/2⌋} sin((2k−1)π/(2n)))`.
pub fn f_n(n: u32) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            range: "n ≥ 1",
        });
    }
    let nf = n as f64;
    // |sin(nπ/2)| is exactly 0 or 1
    let edge = if n % 2 == 1 { 1.0 } else { 0.0 };
    let sum: f64 = (1..=n / 2)
        .map(|k| ((2 * k - 1) as f64 * PI / (2.0 * nf)).sin())
        .sum();
    Ok(BoundValue {
        n: SettingCount::Finite(n),
        value: (edge + 2.0 * sum) / nf,
    })
}

/// `f(n)` for finite `n`, `2/π` for the continuum.
pub fn bound(n: SettingCount) -> Result<f64> {
    match n {
        SettingCount::Finite(n) => f_n(n).map(|b| b.value),
        SettingCount::Infinite => Ok(c_plane()),
    }
}

/// Equatorial measurement phases `θ_i = iπ/n`.
pub fn setting_angles(n: u32) -> Vec<f64> {
    (0..n).map(|i| i as f64 * PI / n as f64).collect()
}

/// `max_α λ_max((1/n) Σ α_i σ_{θ_i})` by enumerating every sign pattern.
pub fn f_n_bruteforce(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            range: "n ≥ 1",
        });
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::ResourceLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let sigmas: Vec<Matrix2> = setting_angles(n).into_iter().map(pauli_theta).collect();
    let scale = 1.0 / n as f64;
    // α and −α give the same λ_max, so α_0 = +1 is fixed
    let patterns = 1u64 << (n - 1);
    let best = (0..patterns)
        .into_par_iter()
        .map(|mask| {
            let mut s = sigmas[0];
            for (i, sigma) in sigmas.iter().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    s = s - *sigma;
                } else {
                    s += *sigma;
                }
            }
            eig_max_hermitian2(&s.scale(scale)).expect("sum of Pauli operators is Hermitian")
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// One member of an LHS ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhsMember {
    pub weight: f64,
    pub state: BlochVector,
    /// Alice's report when Bob announces the σ_z setting.
    pub z_report: Outcome,
}

/// A finite weighted ensemble of pure Bob states with Alice's response rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsEnsemble {
    members: Vec<LhsMember>,
}

/// What an LHS model predicts for the steering inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhsEvaluation {
    pub n: SettingCount,
    /// `⟨A_i σ_{θ_i}⟩` per setting; empty for the continuum.
    pub per_setting: Vec<f64>,
    /// Setting-averaged equatorial correlation.
    pub correlation: f64,
    /// σ_z-setting statistics the model produces.
    pub z_statistics: PhotodetectionOutcome,
    /// `bound(n) · [℘₊√(1−z₊²) + ℘₋√(1−z₋²)]` for those statistics.
    pub rhs: f64,
}

impl LhsEvaluation {
    /// `rhs − correlation`; zero for a tight model, never negative.
    pub fn slack(&self) -> f64 {
        self.rhs - self.correlation
    }
}

impl LhsEnsemble {
    pub fn new(members: Vec<LhsMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("LHS ensemble has no members".into()));
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > 1e-12 || members.iter().any(|m| m.weight < 0.0) {
            return Err(Error::Config(format!("LHS weights must be non-negative and sum to 1, got {total}")));
        }
        if let Some(m) = members.iter().find(|m| (m.state.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::Config(format!(
                "LHS states must be pure, found Bloch length {}",
                m.state.norm()
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[LhsMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Alice's report for the equatorial setting `theta` when she sent `state`.
    pub fn equatorial_report(state: &BlochVector, theta: f64) -> Outcome {
        Outcome::from_sign(state.equatorial_component(theta))
    }

    /// Draws a member according to the ensemble weights.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &LhsMember {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for m in &self.members {
            acc += m.weight;
            if u < acc {
                return m;
            }
        }
        self.members.last().expect("non-empty ensemble")
    }

    /// σ_z-setting statistics implied by the `z_report` labels.
    pub fn z_statistics(&self) -> PhotodetectionOutcome {
        let branch = |label: Outcome| {
            let (p, pz) = self
                .members
                .iter()
                .filter(|m| m.z_report == label)
                .fold((0.0, 0.0), |(p, pz), m| (p + m.weight, pz + m.weight * m.state.z));
            (p, (p > 0.0).then(|| pz / p))
        };
        let (p_plus, z_plus) = branch(Outcome::Plus);
        let (p_minus, z_minus) = branch(Outcome::Minus);
        PhotodetectionOutcome {
            p_plus,
            p_minus,
            z_plus,
            z_minus,
        }
    }

    /// Exact expectation of every inequality term under this ensemble.
    pub fn evaluate(&self, n: SettingCount) -> Result<LhsEvaluation> {
        let z_statistics = self.z_statistics();
        let rhs = bound(n)? * z_statistics.nonlinear_factor();
        let (per_setting, correlation) = match n {
            SettingCount::Finite(count) => {
                let per: Vec<f64> = setting_angles(count)
                    .into_iter()
                    .map(|theta| {
                        self.members
                            .iter()
                            .map(|m| {
                                let a = Self::equatorial_report(&m.state, theta).as_f64();
                                m.weight * a * m.state.equatorial_component(theta)
                            })
                            .sum()
                    })
                    .collect();
                let mean = per.iter().sum::<f64>() / count as f64;
                (per, mean)
            }
            // (1/π)∫|cos(θ−φ)|dθ over a half-turn is 2/π for every azimuth φ
            SettingCount::Infinite => {
                let c = self
                    .members
                    .iter()
                    .map(|m| m.weight * m.state.equatorial_radius())
                    .sum::<f64>()
                    * c_plane();
                (Vec::new(), c)
            }
        };
        Ok(LhsEvaluation {
            n,
            per_setting,
            correlation,
            z_statistics,
            rhs,
        })
    }
}

/// Azimuth of the first ring state: on a measurement axis for odd `n`, midway between axes for even `n`.
pub fn ring_offset(n: u32) -> f64 {
    if n.is_multiple_of(2) {
        PI / (2.0 * n as f64)
    } else {
        0.0
    }
}

/// `count` evenly spaced pure states on the ring of latitude `z`, starting at `offset`.
fn ring_members(count: usize, z: f64, offset: f64, weight: f64, z_report: Outcome) -> impl Iterator<Item = LhsMember> {
    let step = 2.0 * PI / count as f64;
    (0..count).map(move |k| LhsMember {
        weight: weight / count as f64,
        state: BlochVector::on_ring(z, offset + k as f64 * step),
        z_report,
    })
}

/// `m_states` evenly spaced equatorial states, placed for `n` settings.
pub fn equatorial_ensemble(m_states: usize, n: u32) -> Result<LhsEnsemble> {
    if m_states == 0 {
        return Err(Error::Config("ensemble needs at least one state".into()));
    }
    LhsEnsemble::new(ring_members(m_states, 0.0, ring_offset(n), 1.0, Outcome::Plus).collect())
}

/// Two rings of `2n` states each, at latitudes `z₊`, `z₋` with weights `℘₊`, `℘₋`.
/// Alice answers the σ_z setting with the label of the ring she drew from.
pub fn two_ring_ensemble(n: u32, pd: &PhotodetectionOutcome) -> Result<LhsEnsemble> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            range: "n ≥ 1",
        });
    }
    let per_ring = 2 * n as usize;
    let offset = ring_offset(n);
    let mut members = Vec::with_capacity(2 * per_ring);
    for (label, (p, z)) in [Outcome::Plus, Outcome::Minus].into_iter().zip(pd.branches()) {
        if let (true, Some(z)) = (p > 0.0, z) {
            members.extend(ring_members(per_ring, z, offset, p, label));
        }
    }
    LhsEnsemble::new(members)
}

/// Size of an equatorial ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleSize {
    Finite(usize),
    /// Uniform density over the whole equator.
    Continuous,
}

/// Correlation achieved by an equatorial ring ensemble against `n` settings.
pub fn equatorial_lhs_correlation(size: EnsembleSize, n: SettingCount) -> Result<f64> {
    match (size, n) {
        // uniform ring: average of |cos| is 2/π against any axis
        (EnsembleSize::Continuous, n) => {
            n.validate()?;
            Ok(c_plane())
        }
        (EnsembleSize::Finite(m), SettingCount::Finite(count)) => {
            Ok(equatorial_ensemble(m, count)?.evaluate(n)?.correlation)
        }
        (EnsembleSize::Finite(m), SettingCount::Infinite) => {
            Ok(equatorial_ensemble(m, 1)?.evaluate(n)?.correlation)
        }
    }
}

/// `f(n)·[℘₊√(1−z₊²) + ℘₋√(1−z₋²)]`: the two-ring model's predicted correlation.
pub fn two_ring_lhs_value(n: SettingCount, pd: &PhotodetectionOutcome) -> Result<f64> {
    Ok(bound(n)? * pd.nonlinear_factor())
}

/// Continuous two-ring model, evaluated analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousTwoRing {
    pub statistics: PhotodetectionOutcome,
}

impl ContinuousTwoRing {
    /// Correlation `(2/π)Σ ℘ · radius` against the continuum of settings.
    pub fn correlation(&self) -> f64 {
        c_plane() * self.statistics.nonlinear_factor()
    }
}
