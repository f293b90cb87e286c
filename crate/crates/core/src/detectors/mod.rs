//! Reference producers of posterior streams.

mod ewma;
mod fbm;
mod fsde;
mod slds;

use thiserror::Error;

use crate::hed::{compute_baseline, HedError, ProbabilityStream};

pub use ewma::{ewma_detector, EwmaParams};
pub use fbm::{fbm_sample, fbm_sample_cholesky, fgn_autocovariance, FbmSpec};
pub use fsde::{fsde_euler, FsdeParams};
pub use slds::{slds_forward, RegimePosteriors, SldsParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectorError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("fractional Gaussian noise could not be generated by circulant embedding or Cholesky factorization")]
    EmbeddingFailure,
    #[error("all regime likelihoods vanish at t = {t}")]
    ZeroLikelihood { t: usize },
    #[error("delay {delta} exceeds the post-onset window of {window} steps")]
    DelayExceedsWindow { delta: usize, window: usize },
    #[error(transparent)]
    Hed(#[from] HedError),
}

/// Shifts the post-onset profile `delta` steps later.
///
/// The first `delta` post-onset steps are filled with the baseline; the tail
/// that falls past `T` is dropped. The pre-onset segment is untouched.
pub fn delay_stream(stream: &ProbabilityStream, delta: usize) -> Result<ProbabilityStream, DetectorError> {
    let window = stream.window_len();
    if delta > window {
        return Err(DetectorError::DelayExceedsWindow { delta, window });
    }
    let baseline = compute_baseline(stream);
    let post = stream.post_onset();
    let mut probs = Vec::with_capacity(stream.probs().len());
    probs.extend_from_slice(stream.pre_onset());
    probs.extend(std::iter::repeat_n(baseline, delta));
    probs.extend_from_slice(&post[..post.len() - delta]);
    Ok(stream.with_probs(probs)?)
}
