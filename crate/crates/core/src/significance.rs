//! Paired moving-block bootstrap for the difference of two detectors' scores.
//!
//! Only the post-onset segment `[t_start, T]` is resampled. The pre-onset
//! window, and therefore the baseline, stays fixed. Both detectors get the
//! same block starts in a given iteration so that their alignment with the
//! underlying scenario is preserved.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::hed::{hed_score, DecayParams, HedError, ProbabilityStream};
use crate::rng::{derive_seed, seeded_rng};

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BootstrapError {
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error("block length {block_len} exceeds the post-onset segment length {segment_len}")]
    BlockTooLong { block_len: usize, segment_len: usize },
    #[error("streams do not share a window: (t_start {a_start}, T {a_horizon}) vs (t_start {b_start}, T {b_horizon})")]
    MismatchedWindows {
        a_start: usize,
        a_horizon: usize,
        b_start: usize,
        b_horizon: usize,
    },
    #[error(transparent)]
    Hed(#[from] HedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockLen {
    /// `floor(T^(1/3))`, capped at the post-onset segment length.
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapConfig {
    pub num_resamples: usize,
    pub block_len: BlockLen,
    pub seed: u64,
    pub confidence_level: f64,
}

impl BootstrapConfig {
    /// 2000 resamples, automatic block length, 95% interval.
    pub fn new(seed: u64) -> Self {
        Self {
            num_resamples: DEFAULT_RESAMPLES,
            block_len: BlockLen::Auto,
            seed,
            confidence_level: DEFAULT_CONFIDENCE,
        }
    }

    pub fn validate(&self, horizon: usize) -> Result<(), BootstrapError> {
        if self.num_resamples == 0 {
            return Err(BootstrapError::InvalidConfig(
                "number of resamples must be at least 1".into(),
            ));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(BootstrapError::InvalidConfig(format!(
                "confidence level {} is not in (0, 1)",
                self.confidence_level
            )));
        }
        if let BlockLen::Fixed(b) = self.block_len {
            if b == 0 || b > horizon + 1 {
                return Err(BootstrapError::InvalidConfig(format!(
                    "block length {b} is not in [1, T + 1 = {}]",
                    horizon + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub observed_diff: f64,
    pub resampled_diffs: Vec<f64>,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub block_len: usize,
    pub seed: u64,
    pub confidence_level: f64,
}

/// `max(1, floor(T^(1/3)))`, computed exactly on integers.
pub fn default_block_len(horizon: usize) -> usize {
    let mut b = (horizon as f64).cbrt() as usize;
    while (b + 1).pow(3) <= horizon {
        b += 1;
    }
    while b > 0 && b.pow(3) > horizon {
        b -= 1;
    }
    b.max(1)
}

/// Start offsets of `ceil(len / b)` blocks drawn uniformly from the
/// `len - b + 1` overlapping blocks of a length-`len` segment.
pub fn draw_block_starts<R: Rng + ?Sized>(len: usize, block_len: usize, rng: &mut R) -> Vec<usize> {
    let n_blocks = len.div_ceil(block_len);
    let span = len - block_len + 1;
    (0..n_blocks).map(|_| rng.random_range(0..span)).collect()
}

fn apply_blocks(stream: &ProbabilityStream, block_len: usize, starts: &[usize]) -> Result<ProbabilityStream, HedError> {
    let post = stream.post_onset();
    let mut probs = Vec::with_capacity(stream.probs().len());
    probs.extend_from_slice(stream.pre_onset());
    probs.extend(
        starts
            .iter()
            .flat_map(|&s| post[s..s + block_len].iter().copied())
            .take(post.len()),
    );
    stream.with_probs(probs)
}

fn check_block_len(stream: &ProbabilityStream, block_len: usize) -> Result<(), BootstrapError> {
    let segment_len = stream.post_onset().len();
    if block_len == 0 {
        return Err(BootstrapError::InvalidConfig("block length must be at least 1".into()));
    }
    if block_len > segment_len {
        return Err(BootstrapError::BlockTooLong { block_len, segment_len });
    }
    Ok(())
}

/// One moving-block resample of the post-onset segment.
pub fn block_resample(
    stream: &ProbabilityStream,
    block_len: usize,
    seed: u64,
) -> Result<ProbabilityStream, BootstrapError> {
    check_block_len(stream, block_len)?;
    let mut rng = seeded_rng(seed);
    let starts = draw_block_starts(stream.post_onset().len(), block_len, &mut rng);
    Ok(apply_blocks(stream, block_len, &starts)?)
}

/// Compares `score(a) - score(b)` against its paired block-bootstrap
/// distribution. The p-value is the fraction of resampled differences at or
/// above the observed one.
pub fn bootstrap_compare(
    stream_a: &ProbabilityStream,
    stream_b: &ProbabilityStream,
    decay: &DecayParams,
    cfg: &BootstrapConfig,
) -> Result<BootstrapResult, BootstrapError> {
    if stream_a.t_start() != stream_b.t_start() || stream_a.horizon() != stream_b.horizon() {
        return Err(BootstrapError::MismatchedWindows {
            a_start: stream_a.t_start(),
            a_horizon: stream_a.horizon(),
            b_start: stream_b.t_start(),
            b_horizon: stream_b.horizon(),
        });
    }
    cfg.validate(stream_a.horizon())?;
    let segment_len = stream_a.post_onset().len();
    let block_len = match cfg.block_len {
        BlockLen::Auto => default_block_len(stream_a.horizon()).min(segment_len),
        BlockLen::Fixed(b) => b,
    };
    check_block_len(stream_a, block_len)?;

    let observed_diff = hed_score(stream_a, decay).score - hed_score(stream_b, decay).score;
    let resampled_diffs = (0..cfg.num_resamples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(cfg.seed, i));
            let starts = draw_block_starts(segment_len, block_len, &mut rng);
            let a = apply_blocks(stream_a, block_len, &starts)?;
            let b = apply_blocks(stream_b, block_len, &starts)?;
            Ok(hed_score(&a, decay).score - hed_score(&b, decay).score)
        })
        .collect::<Result<Vec<f64>, HedError>>()?;

    let exceed = resampled_diffs.iter().filter(|&&d| d >= observed_diff).count();
    let p_value = exceed as f64 / cfg.num_resamples as f64;

    let mut sorted = resampled_diffs.clone();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.confidence_level) / 2.0;
    Ok(BootstrapResult {
        observed_diff,
        p_value,
        ci_low: quantile_sorted(&sorted, tail),
        ci_high: quantile_sorted(&sorted, 1.0 - tail),
        resampled_diffs,
        block_len,
        seed: cfg.seed,
        confidence_level: cfg.confidence_level,
    })
}

/// Linear-interpolation quantile of an ascending, non-empty slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
