//! Fractional Gaussian noise (increments of fractional Brownian motion).
//!
//! Autocovariance at lag `k` is
//! `(sigma^2 / 2) (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
//! Samples come from a circulant embedding of that Toeplitz covariance
//! (Davies-Harte). If the embedding has materially negative eigenvalues we
//! fall back to a Cholesky factor of the exact covariance.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::DetectorError;
use crate::rng::seeded_rng;

/// Relative size below which negative circulant eigenvalues count as rounding.
const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FbmSpec {
    pub hurst: f64,
    pub len: usize,
    pub scale: f64,
    pub seed: u64,
}

impl FbmSpec {
    pub fn validate(&self) -> Result<(), DetectorError> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(DetectorError::InvalidParams(format!(
                "Hurst exponent {} is not in (0, 1)",
                self.hurst
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(DetectorError::InvalidParams(format!(
                "scale {} must be positive",
                self.scale
            )));
        }
        if self.len == 0 {
            return Err(DetectorError::InvalidParams("length must be positive".into()));
        }
        Ok(())
    }
}

pub fn fgn_autocovariance(hurst: f64, scale: f64, lag: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    let below = if lag == 0 { 1.0 } else { (k - 1.0).powf(two_h) };
    0.5 * scale * scale * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + below)
}

pub fn fbm_sample(spec: &FbmSpec) -> Result<Vec<f64>, DetectorError> {
    spec.validate()?;
    match circulant_embedding(spec) {
        Some(sample) => Ok(sample),
        None => fbm_sample_cholesky(spec),
    }
}

fn circulant_embedding(spec: &FbmSpec) -> Option<Vec<f64>> {
    let m = spec.len.next_power_of_two();
    let size = 2 * m;
    let mut row: Vec<Complex<f64>> = (0..size)
        .map(|j| {
            let lag = if j <= m { j } else { size - j };
            Complex::new(fgn_autocovariance(spec.hurst, spec.scale, lag), 0.0)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(size);
    fft.process(&mut row);

    let largest = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    if row.iter().any(|c| c.re < -EIGEN_TOLERANCE * largest) {
        return None;
    }

    let mut rng = seeded_rng(spec.seed);
    let mut w: Vec<Complex<f64>> = row
        .iter()
        .map(|eig| {
            let amp = (eig.re.max(0.0) / size as f64).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex::new(amp * re, amp * im)
        })
        .collect();
    fft.process(&mut w);
    Some(w[..spec.len].iter().map(|c| c.re).collect())
}

/// Exact sampler through the Cholesky factor of the `len x len` covariance.
/// Cubic in `len`; meant for short sequences and as the embedding fallback.
pub fn fbm_sample_cholesky(spec: &FbmSpec) -> Result<Vec<f64>, DetectorError> {
    spec.validate()?;
    let n = spec.len;
    let gamma: Vec<f64> = (0..n).map(|k| fgn_autocovariance(spec.hurst, spec.scale, k)).collect();
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov.cholesky().ok_or(DetectorError::EmbeddingFailure)?;
    let mut rng = seeded_rng(spec.seed);
    let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok((chol.l() * z).iter().copied().collect())
}
