//! Seeded Monte Carlo of the finite-shot steering experiment.
//!
//! Each of the `n` equatorial settings and the σ_z setting (index `n`) draws
//! from its own ChaCha20 stream: seed `cfg.seed`, stream number = setting index.
//! Settings run in parallel; every accumulator is an integer count, so the result
//! does not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound, equatorial_ensemble, setting_angles, two_ring_ensemble, LhsEnsemble, Outcome};
use crate::error::{Error, Result};
use crate::eval::{anti_sign_report, quantum_correlation_split, Verdict};
use crate::linalg::{pauli_theta, BlochVector, Matrix2, QubitOperator};
use crate::measurement::{homodyne_marginal_density, photodetect, photodetection_effects, MixtureWeights, PhotodetectionOutcome};
use crate::params::ExperimentParams;
use crate::state::{apply_alice_loss, make_state, SplitPhotonState};

pub const SCHEMA_VERSION: u32 = 1;

/// Generator behind every simulation stream.
pub const RNG_ALGORITHM: &str = "chacha20";

/// An empirical margin counts as a violation only beyond this many standard errors.
pub const SIGNIFICANCE_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Alice measures her half of the photon and reports honestly.
    HonestQuantum,
    /// Alice sends states from the two-ring ensemble matching the photodetection statistics.
    LhsTwoRing,
    /// Alice sends equatorial states and always reports `+1` for σ_z.
    LhsEquatorial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ExperimentParams,
    pub shots_per_setting: u64,
    pub seed: u64,
    pub strategy: Strategy,
    #[serde(default)]
    pub record_transcript: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<u32> {
        self.params.clone().validated()?;
        if self.shots_per_setting == 0 {
            return Err(Error::Config("shots_per_setting must be at least 1".into()));
        }
        self.params
            .n_settings
            .finite()
            .ok_or_else(|| Error::Config("simulation needs a finite number of settings".into()))
    }
}

/// Sample mean with its standard error; `std_error` is `None` below two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Estimate {
    /// Mean of `count` samples in {−1, +1} whose sum is `sum`.
    fn from_signed_sum(sum: i64, count: u64) -> Self {
        let n = count as f64;
        let mean = sum as f64 / n;
        let std_error = (count >= 2).then(|| ((1.0 - mean * mean).max(0.0) / (n - 1.0)).sqrt());
        Self { value: mean, std_error }
    }

    fn from_fraction(hits: u64, count: u64) -> Self {
        let n = count as f64;
        let p = hits as f64 / n;
        let std_error = (count >= 2).then(|| (p * (1.0 - p) / (n - 1.0)).sqrt());
        Self { value: p, std_error }
    }

    /// `|value − target|` in units of the standard error (∞ when undefined and not equal).
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.value - target).abs();
        match self.std_error {
            _ if diff == 0.0 => 0.0,
            Some(se) if se > 0.0 => diff / se,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingEstimate {
    pub index: u32,
    pub theta: f64,
    /// Estimated `⟨A_θ σ_θ⟩`.
    pub correlation: Estimate,
    /// Exact expectation under the simulated strategy.
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSettingEstimate {
    pub p_plus: Estimate,
    pub p_minus: Estimate,
    pub z_plus: Option<Estimate>,
    pub z_minus: Option<Estimate>,
    pub analytic: PhotodetectionOutcome,
}

/// Inequality assembled from the estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub margin: Estimate,
    pub verdict: Verdict,
    pub significance_sigmas: f64,
    pub analytic_lhs: f64,
    pub analytic_rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobAxis {
    Equatorial,
    Z,
}

/// One shot: which setting, what Alice announced, what Bob measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub setting: u32,
    pub alice_report: i8,
    pub bob_axis: BobAxis,
    /// LO phase θ for equatorial settings; 0 for σ_z.
    pub bob_theta: f64,
    pub bob_outcome: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub schema_version: u32,
    pub rng: String,
    pub config: SimConfig,
    pub settings: Vec<SettingEstimate>,
    pub z_setting: ZSettingEstimate,
    pub report: EmpiricalReport,
    /// Some standard error is undefined (too few shots in a setting or branch).
    pub error_bars_degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<ShotRecord>>,
}

/// Draws Alice's homodyne outcome and Bob's conditioned state at a fixed LO phase.
///
/// The outcome density is `w0·G(r) + w1·r²G(r)`: the vacuum part is a standard
/// normal, the one-photon part a Maxwell-distributed magnitude (norm of three
/// standard normals) with a uniformly random sign.
#[derive(Debug, Clone)]
pub struct HomodyneSampler {
    weights: MixtureWeights,
    theta: f64,
    // Bob operators multiplying 1, r, r² in Tr_A[F^θ(r) W] / G(r)
    constant: Matrix2,
    linear: Matrix2,
    quadratic: Matrix2,
}

impl HomodyneSampler {
    pub fn new(state: &SplitPhotonState, theta: f64) -> Result<Self> {
        if !state.loss_applied() {
            return Err(Error::State("homodyne sampling expects the lossy state"));
        }
        Ok(Self {
            weights: homodyne_marginal_density(state),
            theta,
            constant: state.matrix.contract_alice(&Matrix2::projector(0)),
            linear: state.matrix.contract_alice(&pauli_theta(theta)),
            quadratic: state.matrix.contract_alice(&Matrix2::projector(1)),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sample_r<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.weights.w0 {
            rng.sample(StandardNormal)
        } else {
            let (a, b, c): (f64, f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
            let magnitude = (a * a + b * b + c * c).sqrt();
            if rng.random::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        }
    }

    /// Bob's state given outcome `r`, normalized.
    pub fn bob_state(&self, r: f64) -> QubitOperator {
        let rho = self.constant + self.linear.scale(r) + self.quadratic.scale(r * r);
        let t = rho.trace().re;
        rho.scale(1.0 / t)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, QubitOperator) {
        let r = self.sample_r(rng);
        (r, self.bob_state(r))
    }
}

/// `(r, ρ_B^θ(r))` for one homodyne shot on the lossy state.
pub fn sample_homodyne_outcome<R: Rng + ?Sized>(
    state: &SplitPhotonState,
    theta: f64,
    rng: &mut R,
) -> Result<(f64, QubitOperator)> {
    Ok(HomodyneSampler::new(state, theta)?.sample(rng))
}

/// `+1` with probability `(1 + Tr[ρ O])/2` for a ±1-valued observable `O`.
pub fn sample_bob_outcome<R: Rng + ?Sized>(bob_state: &QubitOperator, axis: &Matrix2, rng: &mut R) -> Outcome {
    sample_from_expectation(bob_state.expectation(axis), rng)
}

fn sample_from_expectation<R: Rng + ?Sized>(expectation: f64, rng: &mut R) -> Outcome {
    if rng.random::<f64>() < 0.5 * (1.0 + expectation) {
        Outcome::Plus
    } else {
        Outcome::Minus
    }
}

/// What Alice has available to generate her reports.
enum Source {
    Quantum {
        lossy: Box<SplitPhotonState>,
        /// Bob's normalized states after a click / no click, with their probabilities.
        click: Option<(f64, BlochVector)>,
        no_click: Option<BlochVector>,
    },
    Lhs(LhsEnsemble),
}

#[derive(Default)]
struct EquatorialTally {
    product_sum: i64,
}

#[derive(Default)]
struct ZTally {
    plus: u64,
    plus_sum: i64,
    minus: u64,
    minus_sum: i64,
}

enum Tally {
    Equatorial(EquatorialTally),
    Z(ZTally),
}

fn stream_rng(seed: u64, stream: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn run_setting(
    source: &Source,
    cfg: &SimConfig,
    n: u32,
    index: u32,
    transcript: Option<&mut Vec<ShotRecord>>,
) -> Result<Tally> {
    let mut rng = stream_rng(cfg.seed, index);
    let mut transcript = transcript;
    let mut record = |setting, alice: Outcome, axis, theta, bob: Outcome| {
        if let Some(t) = transcript.as_deref_mut() {
            t.push(ShotRecord {
                setting,
                alice_report: alice.value(),
                bob_axis: axis,
                bob_theta: theta,
                bob_outcome: bob.value(),
            });
        }
    };

    if index < n {
        let theta = setting_angles(n)[index as usize];
        let sigma = pauli_theta(theta);
        let mut tally = EquatorialTally::default();
        match source {
            Source::Quantum { lossy, .. } => {
                let sampler = HomodyneSampler::new(lossy, theta)?;
                for _ in 0..cfg.shots_per_setting {
                    let (r, bob) = sampler.sample(&mut rng);
                    let a = anti_sign_report(r);
                    let b = sample_bob_outcome(&bob, &sigma, &mut rng);
                    tally.product_sum += (a.value() * b.value()) as i64;
                    record(index, a, BobAxis::Equatorial, theta, b);
                }
            }
            Source::Lhs(ensemble) => {
                for _ in 0..cfg.shots_per_setting {
                    let member = ensemble.sample(&mut rng);
                    let a = LhsEnsemble::equatorial_report(&member.state, theta);
                    let b = sample_from_expectation(member.state.equatorial_component(theta), &mut rng);
                    tally.product_sum += (a.value() * b.value()) as i64;
                    record(index, a, BobAxis::Equatorial, theta, b);
                }
            }
        }
        Ok(Tally::Equatorial(tally))
    } else {
        let mut tally = ZTally::default();
        for _ in 0..cfg.shots_per_setting {
            let (a, bob_z) = match source {
                Source::Quantum { click, no_click, .. } => {
                    let clicked = match click {
                        Some((p, _)) => rng.random::<f64>() < *p,
                        None => false,
                    };
                    match (clicked, click, no_click) {
                        (true, Some((_, v)), _) => (Outcome::Plus, v.z),
                        (_, _, Some(v)) => (Outcome::Minus, v.z),
                        // no-click branch has zero probability
                        (_, Some((_, v)), None) => (Outcome::Plus, v.z),
                        (_, None, None) => unreachable!("photodetection has at least one branch"),
                    }
                }
                Source::Lhs(ensemble) => {
                    let member = ensemble.sample(&mut rng);
                    (member.z_report, member.state.z)
                }
            };
            let b = sample_from_expectation(bob_z, &mut rng);
            match a {
                Outcome::Plus => {
                    tally.plus += 1;
                    tally.plus_sum += b.value() as i64;
                }
                Outcome::Minus => {
                    tally.minus += 1;
                    tally.minus_sum += b.value() as i64;
                }
            }
            record(index, a, BobAxis::Z, 0.0, b);
        }
        Ok(Tally::Z(tally))
    }
}

fn build_source(cfg: &SimConfig, n: u32) -> Result<(Source, Vec<f64>, PhotodetectionOutcome)> {
    let p = &cfg.params;
    match cfg.strategy {
        Strategy::HonestQuantum => {
            let clean = make_state(p.eta, p.chi)?;
            let lossy = apply_alice_loss(&clean, p.eta_h)?;
            let pd = photodetect(&clean, p.eta_p)?;
            let (f_click, f_none) = photodetection_effects(p.eta_p);
            let conditioned = |f: &Matrix2, prob: f64| -> Result<Option<BlochVector>> {
                if prob > 0.0 {
                    Ok(Some(clean.matrix.apply_effect_a(f)?.bloch_vector()))
                } else {
                    Ok(None)
                }
            };
            let click = conditioned(&f_click, pd.p_plus)?.map(|v| (pd.p_plus, v));
            let no_click = conditioned(&f_none, pd.p_minus)?;
            let analytic = quantum_correlation_split(p.eta, p.chi, p.eta_h)?;
            Ok((
                Source::Quantum {
                    lossy: Box::new(lossy),
                    click,
                    no_click,
                },
                vec![analytic; n as usize],
                pd,
            ))
        }
        Strategy::LhsTwoRing => {
            let pd = photodetect(&make_state(p.eta, p.chi)?, p.eta_p)?;
            let ensemble = two_ring_ensemble(n, &pd)?;
            let eval = ensemble.evaluate(p.n_settings)?;
            Ok((Source::Lhs(ensemble), eval.per_setting, eval.z_statistics))
        }
        Strategy::LhsEquatorial => {
            let ensemble = equatorial_ensemble(2 * n as usize, n)?;
            let eval = ensemble.evaluate(p.n_settings)?;
            Ok((Source::Lhs(ensemble), eval.per_setting, eval.z_statistics))
        }
    }
}

/// Runs the configured experiment with settings processed in parallel.
pub fn run_experiment(cfg: &SimConfig) -> Result<SimResult> {
    run(cfg, true)
}

/// Same as [`run_experiment`] on the calling thread only.
pub fn run_experiment_serial(cfg: &SimConfig) -> Result<SimResult> {
    run(cfg, false)
}

fn run(cfg: &SimConfig, parallel: bool) -> Result<SimResult> {
    let n = cfg.validate()?;
    let (source, analytic_settings, analytic_z) = build_source(cfg, n)?;

    let task = |index: u32| -> Result<(Tally, Option<Vec<ShotRecord>>)> {
        let mut transcript = cfg
            .record_transcript
            .then(|| Vec::with_capacity(cfg.shots_per_setting as usize));
        let tally = run_setting(&source, cfg, n, index, transcript.as_mut())?;
        Ok((tally, transcript))
    };
    let outputs: Vec<(Tally, Option<Vec<ShotRecord>>)> = if parallel {
        (0..=n).into_par_iter().map(task).collect::<Result<_>>()?
    } else {
        (0..=n).map(task).collect::<Result<_>>()?
    };

    let angles = setting_angles(n);
    let mut settings = Vec::with_capacity(n as usize);
    let mut z_tally = None;
    let mut transcript: Option<Vec<ShotRecord>> = cfg.record_transcript.then(Vec::new);
    for (index, (tally, shots)) in outputs.into_iter().enumerate() {
        if let (Some(all), Some(shots)) = (transcript.as_mut(), shots) {
            all.extend(shots);
        }
        match tally {
            Tally::Equatorial(t) => settings.push(SettingEstimate {
                index: index as u32,
                theta: angles[index],
                correlation: Estimate::from_signed_sum(t.product_sum, cfg.shots_per_setting),
                analytic: analytic_settings[index],
            }),
            Tally::Z(t) => z_tally = Some(t),
        }
    }
    let z = z_tally.expect("σ_z setting is always simulated");
    let branch = |count: u64, sum: i64| (count > 0).then(|| Estimate::from_signed_sum(sum, count));
    let z_setting = ZSettingEstimate {
        p_plus: Estimate::from_fraction(z.plus, cfg.shots_per_setting),
        p_minus: Estimate::from_fraction(z.minus, cfg.shots_per_setting),
        z_plus: branch(z.plus, z.plus_sum),
        z_minus: branch(z.minus, z.minus_sum),
        analytic: analytic_z,
    };

    let f = bound(cfg.params.n_settings)?;
    let lhs = combine_lhs(&settings);
    let rhs = combine_rhs(f, &z_setting, &z, cfg.shots_per_setting);
    let margin = Estimate {
        value: lhs.value - rhs.value,
        std_error: match (lhs.std_error, rhs.std_error) {
            (Some(a), Some(b)) => Some(a.hypot(b)),
            _ => None,
        },
    };
    let significant = matches!(margin.std_error, Some(se) if margin.value > SIGNIFICANCE_SIGMAS * se);
    let verdict = if significant && !cfg.params.is_unentangled_split() {
        Verdict::Violated
    } else {
        Verdict::NotViolated
    };
    let analytic_lhs = analytic_settings.iter().sum::<f64>() / n as f64;
    let error_bars_degenerate = settings.iter().any(|s| s.correlation.std_error.is_none())
        || [Some(z_setting.p_plus), z_setting.z_plus, z_setting.z_minus]
            .iter()
            .flatten()
            .any(|e| e.std_error.is_none());

    Ok(SimResult {
        schema_version: SCHEMA_VERSION,
        rng: RNG_ALGORITHM.to_string(),
        config: cfg.clone(),
        settings,
        report: EmpiricalReport {
            lhs,
            rhs,
            margin,
            verdict,
            significance_sigmas: SIGNIFICANCE_SIGMAS,
            analytic_lhs,
            analytic_rhs: f * analytic_z.nonlinear_factor(),
        },
        z_setting,
        error_bars_degenerate,
        transcript,
    })
}

fn combine_lhs(settings: &[SettingEstimate]) -> Estimate {
    let n = settings.len() as f64;
    let value = settings.iter().map(|s| s.correlation.value).sum::<f64>() / n;
    let var: Option<f64> = settings
        .iter()
        .map(|s| s.correlation.std_error.map(|e| e * e))
        .sum();
    Estimate {
        value,
        std_error: var.map(|v| v.sqrt() / n),
    }
}

/// `f(n) Σ_b p̂_b √(1 − ẑ_b²)` with a delta-method error: the `p̂` term from the
/// multinomial split and, per branch, `p_b² ẑ_b² / (N_b − 1)` from `ẑ_b`.
fn combine_rhs(f: f64, z: &ZSettingEstimate, tally: &ZTally, shots: u64) -> Estimate {
    let root = |e: &Option<Estimate>| e.map(|e| (1.0 - e.value * e.value).max(0.0).sqrt()).unwrap_or(0.0);
    let (g_plus, g_minus) = (root(&z.z_plus), root(&z.z_minus));
    let value = f * (z.p_plus.value * g_plus + z.p_minus.value * g_minus);

    let mut var = match z.p_plus.std_error {
        Some(se) => (g_plus - g_minus).powi(2) * se * se,
        None => return Estimate { value, std_error: None },
    };
    for (p, est, count) in [
        (z.p_plus.value, z.z_plus, tally.plus),
        (z.p_minus.value, z.z_minus, tally.minus),
    ] {
        if let Some(e) = est {
            if count < 2 {
                return Estimate { value, std_error: None };
            }
            var += p * p * e.value * e.value / (count - 1) as f64;
        }
    }
    let _ = shots;
    Estimate {
        value,
        std_error: Some(f * var.sqrt()),
    }
}
