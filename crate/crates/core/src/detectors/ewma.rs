//! A deliberately sluggish baseline detector: an exponentially weighted
//! moving average of the observations, centred on their grand mean and
//! squashed through a logistic.

use serde::{Deserialize, Serialize};

use super::DetectorError;
use crate::numeric::{compensated_sum, logistic};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EwmaParams {
    /// Steps after which an observation's weight has halved.
    pub half_life_steps: f64,
    pub logistic_scale: f64,
}

impl Default for EwmaParams {
    fn default() -> Self {
        Self {
            half_life_steps: 8.0,
            logistic_scale: 0.3,
        }
    }
}

/// `P_t = logistic((ewma_t - mean(y)) / scale)`.
pub fn ewma_detector(observations: &[f64], params: &EwmaParams) -> Result<Vec<f64>, DetectorError> {
    if !(params.half_life_steps.is_finite() && params.half_life_steps > 0.0) {
        return Err(DetectorError::InvalidParams(format!(
            "half-life {} must be positive",
            params.half_life_steps
        )));
    }
    if !(params.logistic_scale.is_finite() && params.logistic_scale > 0.0) {
        return Err(DetectorError::InvalidParams(format!(
            "logistic scale {} must be positive",
            params.logistic_scale
        )));
    }
    let Some(&first) = observations.first() else {
        return Ok(Vec::new());
    };
    if let Some(t) = observations.iter().position(|y| !y.is_finite()) {
        return Err(DetectorError::InvalidParams(format!(
            "observation at t = {t} is not finite"
        )));
    }
    let alpha = -(-std::f64::consts::LN_2 / params.half_life_steps).exp_m1();
    // anchored at the first observation so that a constant series centres exactly
    let grand_mean = first + compensated_sum(observations.iter().map(|y| y - first)) / observations.len() as f64;
    let mut level = first;
    Ok(observations
        .iter()
        .map(|&y| {
            level += alpha * (y - level);
            logistic((level - grand_mean) / params.logistic_scale)
        })
        .collect())
}
