//! Latent fractional SDE with regime-dependent mean reversion, integrated by
//! an Euler scheme on a unit grid:
//!
//! `Z_{t+1} = Z_t + a (m_{r(t)} - Z_t) + sigma_z xi_t`, with `xi` fractional
//! Gaussian noise and `Z_0 ~ N(mu_0, Sigma_0)`.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::fbm::{fbm_sample, FbmSpec};
use super::DetectorError;
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsdeParams {
    /// Mean-reversion rate `a >= 0`.
    pub reversion_rate: f64,
    /// Reversion level per regime.
    pub levels: Vec<f64>,
    /// Diffusion `sigma_z >= 0`; zero gives noise-free dynamics.
    pub diffusion: f64,
    pub hurst: f64,
    pub init_mean: f64,
    pub init_var: f64,
}

impl FsdeParams {
    pub fn validate(&self) -> Result<(), DetectorError> {
        let bad = |msg: String| Err(DetectorError::InvalidParams(msg));
        if !(self.reversion_rate.is_finite() && self.reversion_rate >= 0.0) {
            return bad(format!("reversion rate {} must be nonnegative", self.reversion_rate));
        }
        if !(self.diffusion.is_finite() && self.diffusion >= 0.0) {
            return bad(format!("diffusion {} must be nonnegative", self.diffusion));
        }
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return bad(format!("Hurst exponent {} is not in (0, 1)", self.hurst));
        }
        if !(self.init_var.is_finite() && self.init_var >= 0.0) {
            return bad(format!("initial variance {} must be nonnegative", self.init_var));
        }
        if self.levels.is_empty() || self.levels.iter().any(|m| !m.is_finite()) {
            return bad("regime levels must be non-empty and finite".into());
        }
        Ok(())
    }
}

/// Latent path `Z_0..=Z_N` for a regime path of length `N`.
pub fn fsde_euler(params: &FsdeParams, regime_path: &[usize], seed: u64) -> Result<Vec<f64>, DetectorError> {
    params.validate()?;
    if let Some(&r) = regime_path.iter().find(|&&r| r >= params.levels.len()) {
        return Err(DetectorError::InvalidParams(format!(
            "regime {r} has no level ({} levels given)",
            params.levels.len()
        )));
    }
    let mut rng = seeded_rng(seed);
    let z0: f64 = rng.sample(StandardNormal);
    let noise_seed = rng.next_u64();

    let noise = if regime_path.is_empty() || params.diffusion == 0.0 {
        vec![0.0; regime_path.len()]
    } else {
        fbm_sample(&FbmSpec {
            hurst: params.hurst,
            len: regime_path.len(),
            scale: 1.0,
            seed: noise_seed,
        })?
    };

    let mut path = Vec::with_capacity(regime_path.len() + 1);
    let mut z = params.init_mean + params.init_var.sqrt() * z0;
    path.push(z);
    for (&regime, xi) in regime_path.iter().zip(noise) {
        z += params.reversion_rate * (params.levels[regime] - z) + params.diffusion * xi;
        path.push(z);
    }
    Ok(path)
}
