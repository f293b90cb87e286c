//! Forward filter over discrete regimes with scalar Gaussian emissions.
//!
//! Each step predicts occupancy through the transition matrix, multiplies by
//! the emission likelihood of the observation and renormalizes. Weights are
//! handled in log space and shifted by their maximum before exponentiation.
//! The initial occupancy acts as the prior of the first observation.

use serde::{Deserialize, Serialize};

use super::DetectorError;
use crate::hed::ProbabilityStream;
use crate::numeric::compensated_sum;

const ROW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SldsParams {
    /// Row-stochastic `K x K` transition matrix, `transition[i][j] = P(j | i)`.
    pub transition: Vec<Vec<f64>>,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub initial: Vec<f64>,
}

impl SldsParams {
    pub fn num_regimes(&self) -> usize {
        self.means.len()
    }

    pub fn validate(&self) -> Result<(), DetectorError> {
        let k = self.means.len();
        let bad = |msg: String| Err(DetectorError::InvalidParams(msg));
        if k == 0 {
            return bad("at least one regime is required".into());
        }
        if self.variances.len() != k || self.initial.len() != k || self.transition.len() != k {
            return bad(format!("all parameter blocks must describe {k} regimes"));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return bad("emission means must be finite".into());
        }
        if let Some(v) = self.variances.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return bad(format!("emission variance {v} must be positive"));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != k || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return bad(format!("transition row {i} is not a probability vector of length {k}"));
            }
            if (compensated_sum(row.iter().copied()) - 1.0).abs() > ROW_TOLERANCE {
                return bad(format!("transition row {i} does not sum to 1"));
            }
        }
        if self.initial.iter().any(|p| !(0.0..=1.0).contains(p))
            || (compensated_sum(self.initial.iter().copied()) - 1.0).abs() > ROW_TOLERANCE
        {
            return bad("initial occupancy is not on the simplex".into());
        }
        Ok(())
    }

    /// Two symmetric regimes that stay put with probability `stay`, started
    /// from the stationary occupancy `[1/2, 1/2]`.
    pub fn two_regime(stay: f64, means: [f64; 2], variances: [f64; 2]) -> Self {
        Self {
            transition: vec![vec![stay, 1.0 - stay], vec![1.0 - stay, stay]],
            means: means.to_vec(),
            variances: variances.to_vec(),
            initial: vec![0.5, 0.5],
        }
    }
}

/// Filtered occupancy `rows[t][k] = P(regime k | y_0..=y_t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimePosteriors {
    rows: Vec<Vec<f64>>,
}

impl RegimePosteriors {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn regime(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|row| row[k]).collect()
    }

    /// Posterior of regime `k` as a scored stream with onset `t_start`.
    pub fn stream(&self, k: usize, t_start: usize) -> Result<ProbabilityStream, DetectorError> {
        Ok(ProbabilityStream::new(self.regime(k), t_start)?)
    }
}

fn log_normal_pdf(y: f64, mean: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (y - mean).powi(2) / var)
}

pub fn slds_forward(observations: &[f64], params: &SldsParams) -> Result<RegimePosteriors, DetectorError> {
    params.validate()?;
    if observations.is_empty() {
        return Err(DetectorError::InvalidParams("observation sequence is empty".into()));
    }
    if let Some(t) = observations.iter().position(|y| !y.is_finite()) {
        return Err(DetectorError::InvalidParams(format!(
            "observation at t = {t} is not finite"
        )));
    }
    let k = params.num_regimes();
    let mut rows = Vec::with_capacity(observations.len());
    let mut prior = params.initial.clone();
    let mut log_w = vec![0.0; k];
    for (t, &y) in observations.iter().enumerate() {
        if t > 0 {
            let prev: &Vec<f64> = rows.last().unwrap();
            prior = (0..k)
                .map(|j| compensated_sum((0..k).map(|i| prev[i] * params.transition[i][j])))
                .collect();
        }
        for j in 0..k {
            log_w[j] = prior[j].ln() + log_normal_pdf(y, params.means[j], params.variances[j]);
        }
        let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(DetectorError::ZeroLikelihood { t });
        }
        let w: Vec<f64> = log_w.iter().map(|lw| (lw - peak).exp()).collect();
        let total = compensated_sum(w.iter().copied());
        rows.push(w.iter().map(|x| x / total).collect());
    }
    Ok(RegimePosteriors { rows })
}
