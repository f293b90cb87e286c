//! Seeded synthetic scenarios with one scripted regime onset.
//!
//! Observations are a latent fractional SDE path, reverting to the level of
//! the current regime, plus Gaussian emission noise whose variance depends on
//! the regime. Each rostered detector turns the observations into a posterior
//! stream scored against the true onset.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detectors::{ewma_detector, fsde_euler, slds_forward, DetectorError, EwmaParams, FsdeParams, SldsParams};
use crate::hed::{HedError, ProbabilityStream};
use crate::rng::{derive_seed, seeded_rng};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Hed(#[from] HedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Slds,
    Ewma,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 2] = [DetectorKind::Slds, DetectorKind::Ewma];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Slds => "slds",
            DetectorKind::Ewma => "ewma",
        }
    }
}

fn default_roster() -> Vec<DetectorKind> {
    DetectorKind::ALL.to_vec()
}
fn default_latent_diffusion() -> f64 {
    0.3
}
fn default_reversion_rate() -> f64 {
    1.0
}
fn default_stay_probability() -> f64 {
    0.99
}
fn default_ewma_half_life() -> f64 {
    EwmaParams::default().half_life_steps
}
fn default_ewma_logistic_scale() -> f64 {
    EwmaParams::default().logistic_scale
}

/// Flat scenario description; every field maps to one JSON key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub horizon: usize,
    pub onset: usize,
    pub nominal_mean: f64,
    pub nominal_variance: f64,
    pub anomalous_mean: f64,
    pub anomalous_variance: f64,
    pub hurst: f64,
    pub seed: u64,
    #[serde(default = "default_roster")]
    pub detectors: Vec<DetectorKind>,
    #[serde(default = "default_latent_diffusion")]
    pub latent_diffusion: f64,
    #[serde(default = "default_reversion_rate")]
    pub reversion_rate: f64,
    #[serde(default = "default_stay_probability")]
    pub stay_probability: f64,
    #[serde(default = "default_ewma_half_life")]
    pub ewma_half_life: f64,
    #[serde(default = "default_ewma_logistic_scale")]
    pub ewma_logistic_scale: f64,
}

impl ScenarioSpec {
    /// T = 200, onset 50, means 0 vs 3, unit variances, H = 0.7.
    pub fn canonical(seed: u64) -> Self {
        Self {
            horizon: 200,
            onset: 50,
            nominal_mean: 0.0,
            nominal_variance: 1.0,
            anomalous_mean: 3.0,
            anomalous_variance: 1.0,
            hurst: 0.7,
            seed,
            detectors: default_roster(),
            latent_diffusion: default_latent_diffusion(),
            reversion_rate: default_reversion_rate(),
            stay_probability: default_stay_probability(),
            ewma_half_life: default_ewma_half_life(),
            ewma_logistic_scale: default_ewma_logistic_scale(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::InvalidSpec(msg));
        if !(self.onset > 0 && self.onset < self.horizon) {
            return bad(format!(
                "onset must satisfy 0 < onset < horizon, got onset {} and horizon {}",
                self.onset, self.horizon
            ));
        }
        for (name, v) in [
            ("nominal_variance", self.nominal_variance),
            ("anomalous_variance", self.anomalous_variance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.nominal_mean.is_finite() && self.anomalous_mean.is_finite()) {
            return bad("emission means must be finite".into());
        }
        if !(self.stay_probability > 0.0 && self.stay_probability < 1.0) {
            return bad(format!("stay_probability {} is not in (0, 1)", self.stay_probability));
        }
        if self.detectors.is_empty() {
            return bad("detector roster is empty".into());
        }
        Ok(())
    }

    fn fsde_params(&self) -> FsdeParams {
        FsdeParams {
            reversion_rate: self.reversion_rate,
            levels: vec![self.nominal_mean, self.anomalous_mean],
            diffusion: self.latent_diffusion,
            hurst: self.hurst,
            init_mean: self.nominal_mean,
            init_var: self.latent_diffusion * self.latent_diffusion,
        }
    }

    /// Approximate stationary variance of the latent path around its level
    /// (exact for white driving noise).
    fn latent_variance(&self) -> f64 {
        let a = self.reversion_rate;
        let s2 = self.latent_diffusion * self.latent_diffusion;
        if a > 0.0 && a < 2.0 {
            s2 / (a * (2.0 - a))
        } else {
            s2
        }
    }

    /// Filter parameters matched to the generating process.
    pub fn slds_params(&self) -> SldsParams {
        let latent = self.latent_variance();
        SldsParams::two_regime(
            self.stay_probability,
            [self.nominal_mean, self.anomalous_mean],
            [self.nominal_variance + latent, self.anomalous_variance + latent],
        )
    }

    pub fn ewma_params(&self) -> EwmaParams {
        EwmaParams {
            half_life_steps: self.ewma_half_life,
            logistic_scale: self.ewma_logistic_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    /// Observations `y_0..=y_T`.
    pub observations: Vec<f64>,
    pub latent: Vec<f64>,
    /// True regime at each step (0 nominal, 1 anomalous).
    pub labels: Vec<usize>,
    pub truth_onset: usize,
    pub streams: Vec<(DetectorKind, ProbabilityStream)>,
}

impl Scenario {
    pub fn stream(&self, kind: DetectorKind) -> Option<&ProbabilityStream> {
        self.streams.iter().find(|(k, _)| *k == kind).map(|(_, s)| s)
    }
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
    spec.validate()?;
    let labels: Vec<usize> = (0..=spec.horizon).map(|t| usize::from(t >= spec.onset)).collect();
    // step t -> t+1 reverts toward the level of the regime at t+1
    let regime_path = &labels[1..];
    let latent = fsde_euler(&spec.fsde_params(), regime_path, derive_seed(spec.seed, 0))?;

    let mut rng = seeded_rng(derive_seed(spec.seed, 1));
    let observations: Vec<f64> = latent
        .iter()
        .zip(&labels)
        .map(|(&z, &r)| {
            let var = if r == 0 {
                spec.nominal_variance
            } else {
                spec.anomalous_variance
            };
            z + var.sqrt() * rng.sample::<f64, _>(StandardNormal)
        })
        .collect();

    let mut streams = Vec::with_capacity(spec.detectors.len());
    for &kind in &spec.detectors {
        if streams.iter().any(|(k, _)| *k == kind) {
            continue;
        }
        let stream = match kind {
            DetectorKind::Slds => slds_forward(&observations, &spec.slds_params())?.stream(1, spec.onset)?,
            DetectorKind::Ewma => {
                ProbabilityStream::new(ewma_detector(&observations, &spec.ewma_params())?, spec.onset)?
            }
        };
        streams.push((kind, stream));
    }

    Ok(Scenario {
        spec: spec.clone(),
        observations,
        latent,
        labels,
        truth_onset: spec.onset,
        streams,
    })
}

/// First step at or after the onset where the stream reaches `theta`.
pub fn first_crossing(stream: &ProbabilityStream, theta: f64) -> Option<usize> {
    stream
        .post_onset()
        .iter()
        .position(|&p| p >= theta)
        .map(|k| stream.t_start() + k)
}
