//! The HED score and everything computed directly from it.
//!
//! A [`ProbabilityStream`] holds posteriors `P_0..=P_T` on a unit-step grid
//! with a known onset `t_start`. The pre-onset mean is the baseline; the
//! score is the sum of clamped post-onset lifts, discounted by
//! `exp(-lambda (t - t_start))` and divided by `T - t_start`.
//!
//! The discrete estimator sums `T - t_start + 1` terms over a normalizer of
//! `T - t_start`. That off-by-one is kept as printed, so the discrete score is
//! bounded by the discrete bound ([`BoundMode::Discrete`]) while the
//! piecewise-constant integral ([`hed_exact_piecewise`]) is the one bounded by
//! the continuous closed form.

use serde::Serialize;
use thiserror::Error;

use crate::numeric::{compensated_sum, logistic, CompensatedSum};

/// Tolerance for a regime posterior row to count as a simplex point.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Softplus switches to its asymptotes when `|beta * x|` exceeds this.
const SOFTPLUS_CUTOFF: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HedError {
    #[error("stream is empty")]
    EmptyStream,
    #[error("probability range invariant violated: P[{index}] = {value} is not in [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("pre-onset window is empty (t_start = 0); the baseline is undefined")]
    EmptyPreOnsetWindow,
    #[error("degenerate window: t_start = {t_start} equals horizon T = {horizon}; the normalizer T - t_start is zero")]
    DegenerateWindow { t_start: usize, horizon: usize },
    #[error("onset t_start = {t_start} lies beyond horizon T = {horizon}")]
    OnsetBeyondHorizon { t_start: usize, horizon: usize },
    #[error("decay constant must be a finite positive number, got {0}")]
    NonPositiveDecay(f64),
    #[error("response budget must be a finite positive number, got {0}")]
    NonPositiveBudget(f64),
    #[error("softplus sharpness beta must be a finite positive number, got {0}")]
    NonPositiveBeta(f64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("transition log contains no transitions")]
    NoTransitions,
    #[error("transition window too short: onset {onset}, window end {end}")]
    WindowTooShort { onset: usize, end: usize },
    #[error("invalid transition log: {0}")]
    InvalidLog(String),
}

/// Posterior stream `P_0..=P_T` with a known onset index.
///
/// Construction enforces `P_t ∈ [0, 1]` and `0 < t_start < T`, so every
/// scoring routine downstream has a non-empty baseline window and a positive
/// normalizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityStream {
    probs: Vec<f64>,
    t_start: usize,
}

impl ProbabilityStream {
    pub fn new(probs: Vec<f64>, t_start: usize) -> Result<Self, HedError> {
        if probs.is_empty() {
            return Err(HedError::EmptyStream);
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(HedError::ProbabilityOutOfRange { index, value });
        }
        let horizon = probs.len() - 1;
        if t_start == 0 {
            return Err(HedError::EmptyPreOnsetWindow);
        }
        if t_start == horizon {
            return Err(HedError::DegenerateWindow { t_start, horizon });
        }
        if t_start > horizon {
            return Err(HedError::OnsetBeyondHorizon { t_start, horizon });
        }
        Ok(Self { probs, t_start })
    }

    /// Same onset, new values.
    pub fn with_probs(&self, probs: Vec<f64>) -> Result<Self, HedError> {
        Self::new(probs, self.t_start)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn t_start(&self) -> usize {
        self.t_start
    }

    /// Last index `T`.
    pub fn horizon(&self) -> usize {
        self.probs.len() - 1
    }

    /// `T - t_start`, the score normalizer.
    pub fn window_len(&self) -> usize {
        self.horizon() - self.t_start
    }

    /// `P_0..P_{t_start - 1}`.
    pub fn pre_onset(&self) -> &[f64] {
        &self.probs[..self.t_start]
    }

    /// `P_{t_start}..=P_T`.
    pub fn post_onset(&self) -> &[f64] {
        &self.probs[self.t_start..]
    }
}

/// Per-step exponential decay rate `lambda_H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayParams {
    lambda_h: f64,
}

impl DecayParams {
    pub fn new(lambda_h: f64) -> Result<Self, HedError> {
        if lambda_h.is_finite() && lambda_h > 0.0 {
            Ok(Self { lambda_h })
        } else {
            Err(HedError::NonPositiveDecay(lambda_h))
        }
    }

    /// Calibrates the decay so that the information half-life equals the
    /// operator's response budget: `lambda = ln 2 / delta_t_min`.
    pub fn from_budget(delta_t_min: f64) -> Result<Self, HedError> {
        if !(delta_t_min.is_finite() && delta_t_min > 0.0) {
            return Err(HedError::NonPositiveBudget(delta_t_min));
        }
        Self::new(std::f64::consts::LN_2 / delta_t_min)
    }

    pub fn lambda_h(&self) -> f64 {
        self.lambda_h
    }

    /// Information half-life `ln 2 / lambda`, in steps.
    pub fn half_life(&self) -> f64 {
        std::f64::consts::LN_2 / self.lambda_h
    }

    /// Discount applied `steps` after onset.
    #[inline]
    pub fn discount(&self, steps: usize) -> f64 {
        (-self.lambda_h * steps as f64).exp()
    }
}

/// A HED score together with the terms it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedResult {
    pub score: f64,
    pub baseline: f64,
    /// `max(0, P_t - baseline)` for `t = t_start..=T`.
    pub lifts: Vec<f64>,
    /// `exp(-lambda (t - t_start))` for the same indices.
    pub discounts: Vec<f64>,
    pub normalizer: f64,
}

/// Mean of the pre-onset posteriors.
pub fn compute_baseline(stream: &ProbabilityStream) -> f64 {
    let pre = stream.pre_onset();
    compensated_sum(pre.iter().copied()) / pre.len() as f64
}

pub fn hed_score(stream: &ProbabilityStream, decay: &DecayParams) -> HedResult {
    let baseline = compute_baseline(stream);
    let lifts: Vec<f64> = stream.post_onset().iter().map(|&p| (p - baseline).max(0.0)).collect();
    let discounts: Vec<f64> = (0..lifts.len()).map(|k| decay.discount(k)).collect();
    let normalizer = stream.window_len() as f64;
    let total = compensated_sum(lifts.iter().zip(&discounts).map(|(l, d)| l * d));
    HedResult {
        score: total / normalizer,
        baseline,
        lifts,
        discounts,
        normalizer,
    }
}

/// Exact integral of the score functional for the step-function interpolant
/// of the stream (`P` held constant on `[t, t + 1)`).
pub fn hed_exact_piecewise(stream: &ProbabilityStream, decay: &DecayParams) -> f64 {
    let baseline = compute_baseline(stream);
    let lambda = decay.lambda_h();
    // integral of exp(-lambda s) over one unit cell, relative to its left edge
    let cell = -(-lambda).exp_m1() / lambda;
    let post = stream.post_onset();
    let total = compensated_sum(
        post[..post.len() - 1]
            .iter()
            .enumerate()
            .map(|(k, &p)| (p - baseline).max(0.0) * decay.discount(k)),
    );
    total * cell / stream.window_len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// Closed-form bound of the continuous functional.
    Continuous,
    /// Score of a perfect step detector under the discrete estimator.
    Discrete,
}

/// The bounds are the scores of a stream whose every post-onset lift equals the
/// headroom `1 - baseline`, evaluated term by term through the same kernels as
/// the scores, so the perfect step meets them exactly rather than to rounding.
/// Mathematically they are `(1 - b) sum_{k=0}^{N} e^{-lambda k} / N` and
/// `(1 - b)(1 - e^{-lambda N}) / (lambda N)`.
pub fn hed_upper_bound(stream: &ProbabilityStream, decay: &DecayParams, mode: BoundMode) -> f64 {
    let headroom = 1.0 - compute_baseline(stream);
    let window = stream.window_len();
    match mode {
        BoundMode::Continuous => {
            let lambda = decay.lambda_h();
            let cell = -(-lambda).exp_m1() / lambda;
            compensated_sum((0..window).map(|k| headroom * decay.discount(k))) * cell / window as f64
        }
        BoundMode::Discrete => compensated_sum((0..=window).map(|k| headroom * decay.discount(k))) / window as f64,
    }
}

/// Contribution of each sub-interval of `[t_start, T]` to the score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub boundaries: Vec<usize>,
    pub contributions: Vec<f64>,
}

impl PhaseReport {
    pub fn total(&self) -> f64 {
        compensated_sum(self.contributions.iter().copied())
    }
}

/// Splits the score over `t_start = b_0 < b_1 < ... < b_K = T`.
///
/// Phase `k` covers `[b_k, b_{k+1})`; the last phase also includes `T`. All
/// phases share the global baseline and normalizer.
pub fn hed_phase_decomposition(
    stream: &ProbabilityStream,
    decay: &DecayParams,
    boundaries: &[usize],
) -> Result<PhaseReport, HedError> {
    validate_partition(stream, boundaries)?;
    let full = hed_score(stream, decay);
    let t_start = stream.t_start();
    let phases = boundaries.len() - 1;
    let contributions = boundaries
        .windows(2)
        .enumerate()
        .map(|(k, edge)| {
            let lo = edge[0] - t_start;
            let hi = if k + 1 == phases {
                edge[1] - t_start + 1
            } else {
                edge[1] - t_start
            };
            compensated_sum((lo..hi).map(|i| full.lifts[i] * full.discounts[i])) / full.normalizer
        })
        .collect();
    Ok(PhaseReport {
        boundaries: boundaries.to_vec(),
        contributions,
    })
}

/// `phases` near-equal phases covering `[t_start, T]`.
pub fn even_partition(stream: &ProbabilityStream, phases: usize) -> Result<Vec<usize>, HedError> {
    let window = stream.window_len();
    if phases == 0 || phases > window {
        return Err(HedError::InvalidPartition(format!(
            "cannot split a window of {window} steps into {phases} phases"
        )));
    }
    Ok((0..=phases).map(|k| stream.t_start() + k * window / phases).collect())
}

fn validate_partition(stream: &ProbabilityStream, boundaries: &[usize]) -> Result<(), HedError> {
    if boundaries.len() < 2 {
        return Err(HedError::InvalidPartition("need at least two boundaries".into()));
    }
    if boundaries[0] != stream.t_start() {
        return Err(HedError::InvalidPartition(format!(
            "first boundary {} must equal t_start {}",
            boundaries[0],
            stream.t_start()
        )));
    }
    if *boundaries.last().unwrap() != stream.horizon() {
        return Err(HedError::InvalidPartition(format!(
            "last boundary {} must equal T {}",
            boundaries.last().unwrap(),
            stream.horizon()
        )));
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HedError::InvalidPartition(
            "boundaries must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<(), HedError> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(HedError::NonPositiveBeta(beta))
    }
}

/// `(1/beta) ln(1 + exp(beta x))`, switching to `x` and `exp(beta x)/beta`
/// past `|beta x| = 30`.
pub fn softplus(x: f64, beta: f64) -> f64 {
    let z = beta * x;
    if z > SOFTPLUS_CUTOFF {
        x
    } else if z < -SOFTPLUS_CUTOFF {
        z.exp() / beta
    } else {
        z.exp().ln_1p() / beta
    }
}

/// Score with the clamp replaced by a softplus of sharpness `beta`.
pub fn hed_smooth(stream: &ProbabilityStream, decay: &DecayParams, beta: f64) -> Result<f64, HedError> {
    check_beta(beta)?;
    let baseline = compute_baseline(stream);
    let total = compensated_sum(
        stream
            .post_onset()
            .iter()
            .enumerate()
            .map(|(k, &p)| softplus(p - baseline, beta) * decay.discount(k)),
    );
    Ok(total / stream.window_len() as f64)
}

/// Gradient of [`hed_smooth`] with respect to every `P_t`.
///
/// Post-onset entries get the logistic weight of their own lift; pre-onset
/// entries only act through the baseline and all share the same value.
pub fn hed_smooth_grad(stream: &ProbabilityStream, decay: &DecayParams, beta: f64) -> Result<Vec<f64>, HedError> {
    check_beta(beta)?;
    let baseline = compute_baseline(stream);
    let normalizer = stream.window_len() as f64;
    let post: Vec<f64> = stream
        .post_onset()
        .iter()
        .enumerate()
        .map(|(k, &p)| logistic(beta * (p - baseline)) * decay.discount(k) / normalizer)
        .collect();
    let pre = -compensated_sum(post.iter().copied()) / stream.t_start() as f64;
    let mut grad = vec![pre; stream.t_start()];
    grad.extend(post);
    Ok(grad)
}

/// One logged `from -> to` regime switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub onset: usize,
}

/// Posterior streams for `K` regimes plus the transitions between them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeTransitionLog {
    num_regimes: usize,
    transitions: Vec<Transition>,
    posteriors: Vec<Vec<f64>>,
}

impl RegimeTransitionLog {
    /// `posteriors[k][t]` is the posterior of regime `k` at step `t`.
    /// Transitions must be listed in strictly increasing onset order.
    pub fn new(num_regimes: usize, transitions: Vec<Transition>, posteriors: Vec<Vec<f64>>) -> Result<Self, HedError> {
        if num_regimes < 2 {
            return Err(HedError::InvalidLog(format!(
                "need at least 2 regimes, got {num_regimes}"
            )));
        }
        if posteriors.len() != num_regimes {
            return Err(HedError::InvalidLog(format!(
                "expected {num_regimes} posterior streams, got {}",
                posteriors.len()
            )));
        }
        let len = posteriors[0].len();
        if len == 0 || posteriors.iter().any(|s| s.len() != len) {
            return Err(HedError::InvalidLog(
                "posterior streams must be non-empty and equally long".into(),
            ));
        }
        for t in 0..len {
            let mut row = CompensatedSum::new();
            for (k, stream) in posteriors.iter().enumerate() {
                let p = stream[t];
                if !(0.0..=1.0).contains(&p) {
                    return Err(HedError::InvalidLog(format!("regime {k} posterior at t = {t} is {p}")));
                }
                row.add(p);
            }
            if (row.value() - 1.0).abs() > SIMPLEX_TOLERANCE {
                return Err(HedError::InvalidLog(format!(
                    "regime posteriors at t = {t} sum to {}, not 1",
                    row.value()
                )));
            }
        }
        for tr in &transitions {
            if tr.from >= num_regimes || tr.to >= num_regimes {
                return Err(HedError::InvalidLog(format!(
                    "transition {} -> {} references a regime outside [0, {num_regimes})",
                    tr.from, tr.to
                )));
            }
            if tr.from == tr.to {
                return Err(HedError::InvalidLog(format!("self-transition {0} -> {0}", tr.from)));
            }
            if tr.onset >= len {
                return Err(HedError::InvalidLog(format!(
                    "onset {} beyond horizon {}",
                    tr.onset,
                    len - 1
                )));
            }
        }
        if transitions.windows(2).any(|w| w[0].onset >= w[1].onset) {
            return Err(HedError::InvalidLog(
                "transition onsets must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            num_regimes,
            transitions,
            posteriors,
        })
    }

    pub fn num_regimes(&self) -> usize {
        self.num_regimes
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn posterior(&self, regime: usize) -> &[f64] {
        &self.posteriors[regime]
    }

    pub fn horizon(&self) -> usize {
        self.posteriors[0].len() - 1
    }

    /// The stream scored for transition `index`: the target regime's
    /// posterior up to the step before the next onset.
    pub fn transition_stream(&self, index: usize) -> Result<ProbabilityStream, HedError> {
        let tr = self.transitions[index];
        let end = self
            .transitions
            .get(index + 1)
            .map_or(self.horizon(), |next| next.onset - 1);
        if tr.onset == 0 || end <= tr.onset {
            return Err(HedError::WindowTooShort { onset: tr.onset, end });
        }
        ProbabilityStream::new(self.posteriors[tr.to][..=end].to_vec(), tr.onset)
    }
}

/// `K x K` matrix of mean per-transition scores; `None` where no transition
/// of that kind was observed (always on the diagonal).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HedMatrix {
    pub num_regimes: usize,
    entries: Vec<Option<f64>>,
    counts: Vec<usize>,
}

impl HedMatrix {
    pub fn get(&self, from: usize, to: usize) -> Option<f64> {
        self.entries[from * self.num_regimes + to]
    }

    /// Number of logged transitions averaged into entry `(from, to)`.
    pub fn count(&self, from: usize, to: usize) -> usize {
        self.counts[from * self.num_regimes + to]
    }
}

pub fn hed_matrix(log: &RegimeTransitionLog, decay: &DecayParams) -> Result<HedMatrix, HedError> {
    if log.transitions.is_empty() {
        return Err(HedError::NoTransitions);
    }
    let k = log.num_regimes;
    let mut sums = vec![CompensatedSum::new(); k * k];
    let mut counts = vec![0usize; k * k];
    for (index, tr) in log.transitions.iter().enumerate() {
        let stream = log.transition_stream(index)?;
        let cell = tr.from * k + tr.to;
        sums[cell].add(hed_score(&stream, decay).score);
        counts[cell] += 1;
    }
    let entries = sums
        .iter()
        .zip(&counts)
        .map(|(s, &n)| (n > 0).then(|| s.value() / n as f64))
        .collect();
    Ok(HedMatrix {
        num_regimes: k,
        entries,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn step_stream() -> ProbabilityStream {
        let probs = (0..=10).map(|t| if t >= 5 { 1.0 } else { 0.0 }).collect();
        ProbabilityStream::new(probs, 5).unwrap()
    }

    fn random_stream(rng: &mut impl Rng, len: usize, t_start: usize) -> ProbabilityStream {
        ProbabilityStream::new((0..len).map(|_| rng.random::<f64>()).collect(), t_start).unwrap()
    }

    #[test]
    fn stream_rejects_out_of_range_probabilities() {
        let err = ProbabilityStream::new(vec![0.0, 1.2, 0.5], 1).unwrap_err();
        assert_eq!(err, HedError::ProbabilityOutOfRange { index: 1, value: 1.2 });
        assert!(matches!(
            ProbabilityStream::new(vec![0.0, f64::NAN, 0.5], 1),
            Err(HedError::ProbabilityOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn stream_rejects_degenerate_windows() {
        assert_eq!(
            ProbabilityStream::new(vec![0.1; 4], 0),
            Err(HedError::EmptyPreOnsetWindow)
        );
        assert_eq!(
            ProbabilityStream::new(vec![0.1; 4], 3),
            Err(HedError::DegenerateWindow { t_start: 3, horizon: 3 })
        );
        assert_eq!(
            ProbabilityStream::new(vec![0.1; 4], 7),
            Err(HedError::OnsetBeyondHorizon { t_start: 7, horizon: 3 })
        );
        assert_eq!(ProbabilityStream::new(vec![], 1), Err(HedError::EmptyStream));
    }

    #[test]
    fn baseline_is_pre_onset_mean() {
        let s = ProbabilityStream::new(vec![0.1, 0.2, 0.3, 0.9, 0.9], 3).unwrap();
        assert!((compute_baseline(&s) - 0.2).abs() < 1e-15);
        let zeros = ProbabilityStream::new(vec![0.0, 0.0, 0.0, 0.7, 0.2], 3).unwrap();
        assert_eq!(compute_baseline(&zeros), 0.0);
    }

    #[test]
    fn decay_params_reject_non_positive() {
        assert_eq!(DecayParams::new(0.0), Err(HedError::NonPositiveDecay(0.0)));
        assert_eq!(DecayParams::new(-0.1), Err(HedError::NonPositiveDecay(-0.1)));
        assert!(DecayParams::new(f64::INFINITY).is_err());
        assert_eq!(DecayParams::from_budget(0.0), Err(HedError::NonPositiveBudget(0.0)));
        assert!(DecayParams::from_budget(-3.0).is_err());
    }

    #[test]
    fn half_life_matches_calibration_table() {
        let hl = |l: f64| DecayParams::new(l).unwrap().half_life();
        assert_eq!(format!("{:.2}", hl(0.14)), "4.95");
        assert_eq!(format!("{:.2}", hl(0.01)), "69.31");
        assert_eq!(hl(std::f64::consts::LN_2), 1.0);
    }

    #[test]
    fn budget_inverts_half_life() {
        let l = |b: f64| DecayParams::from_budget(b).unwrap().lambda_h();
        assert_eq!(format!("{:.2}", l(4.95)), "0.14");
        assert_eq!(format!("{:.2}", l(13.86)), "0.05");
        assert_eq!(l(1.0), std::f64::consts::LN_2);
        for i in 0..=60 {
            let x = 10f64.powf(-3.0 + i as f64 * 0.1);
            let back = DecayParams::from_budget(x).unwrap().half_life();
            assert!((back - x).abs() <= 1e-12 * x.max(1.0), "{x} -> {back}");
        }
    }

    #[test]
    fn perfect_step_score_is_geometric_sum() {
        let decay = DecayParams::new(0.5).unwrap();
        let r = hed_score(&step_stream(), &decay);
        let expected = 0.2 * (1.0 - (-3.0f64).exp()) / (1.0 - (-0.5f64).exp());
        assert!((r.score - expected).abs() < 1e-15);
        // printed approximation 0.482994 is off in the sixth decimal
        assert!((r.score - 0.482994).abs() < 5e-6);
        assert_eq!(r.baseline, 0.0);
        assert_eq!(r.discounts[0], 1.0);
        assert_eq!(r.lifts.len(), 6);
        assert_eq!(r.normalizer, 5.0);
    }

    #[test]
    fn constant_stream_scores_exactly_zero() {
        let decay = DecayParams::new(0.14).unwrap();
        for &c in &[0.0, 0.3, 0.5, 1.0] {
            let s = ProbabilityStream::new(vec![c; 30], 10).unwrap();
            assert_eq!(hed_score(&s, &decay).score, 0.0);
            assert_eq!(hed_exact_piecewise(&s, &decay), 0.0);
        }
    }

    #[test]
    fn falling_stream_scores_zero_not_negative() {
        let s = ProbabilityStream::new(vec![0.9, 0.9, 0.9, 0.1, 0.0, 0.2], 3).unwrap();
        let r = hed_score(&s, &DecayParams::new(0.3).unwrap());
        assert_eq!(r.score, 0.0);
        assert!(r.lifts.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn audit_trail_reassembles_score() {
        let mut rng = crate::rng::seeded_rng(1);
        let decay = DecayParams::new(0.2).unwrap();
        let s = random_stream(&mut rng, 80, 30);
        let r = hed_score(&s, &decay);
        let re: f64 = r.lifts.iter().zip(&r.discounts).map(|(l, d)| l * d).sum::<f64>() / r.normalizer;
        assert!((re - r.score).abs() < 1e-12);
        assert!(r.lifts.iter().all(|&l| l >= 0.0));
        assert!(r.discounts.iter().all(|&d| d > 0.0 && d <= 1.0));
    }

    #[test]
    fn piecewise_exact_on_perfect_step() {
        let decay = DecayParams::new(0.5).unwrap();
        let v = hed_exact_piecewise(&step_stream(), &decay);
        let expected = 0.2 * (1.0 - (-2.5f64).exp()) / 0.5;
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.367166).abs() < 1e-6);
    }

    #[test]
    fn bounds_on_perfect_step() {
        let decay = DecayParams::new(0.5).unwrap();
        let s = step_stream();
        let cont = hed_upper_bound(&s, &decay, BoundMode::Continuous);
        let disc = hed_upper_bound(&s, &decay, BoundMode::Discrete);
        assert!((cont - 0.367166).abs() < 1e-6);
        assert!((disc - 0.482994).abs() < 5e-6);
        // attained exactly, not to rounding
        assert_eq!(disc, hed_score(&s, &decay).score);
        assert_eq!(cont, hed_exact_piecewise(&s, &decay));
        // closed forms
        assert!((cont - -(-2.5f64).exp_m1() / 2.5).abs() < 1e-15);
        let geometric = (1.0 - (-3.0f64).exp()) / (1.0 - (-0.5f64).exp()) / 5.0;
        assert!((disc - geometric).abs() < 1e-15);
        for (lambda, n) in [(1e-4, 7usize), (0.14, 150), (3.0, 40), (0.01, 1000)] {
            let d = DecayParams::new(lambda).unwrap();
            let s = ProbabilityStream::new((0..=n + 3).map(|t| if t >= 3 { 1.0 } else { 0.0 }).collect(), 3).unwrap();
            let closed = -(-lambda * n as f64).exp_m1() / (lambda * n as f64);
            let got = hed_upper_bound(&s, &d, BoundMode::Continuous);
            assert!((got - closed).abs() <= 1e-14 * closed, "{lambda} {n}");
        }
        // the printed off-by-one makes the discrete score exceed the continuous bound
        assert!(hed_score(&s, &decay).score > cont);
    }

    #[test]
    fn bounds_hold_mode_matched() {
        let mut rng = crate::rng::seeded_rng(2);
        for _ in 0..200 {
            let len = rng.random_range(3..120);
            let t_start = rng.random_range(1..len - 1);
            let s = random_stream(&mut rng, len, t_start);
            let decay = DecayParams::new(rng.random_range(0.001..2.0)).unwrap();
            let score = hed_score(&s, &decay).score;
            assert!(score >= 0.0);
            assert!(score <= hed_upper_bound(&s, &decay, BoundMode::Discrete));
            let exact = hed_exact_piecewise(&s, &decay);
            assert!(exact >= 0.0);
            assert!(exact <= hed_upper_bound(&s, &decay, BoundMode::Continuous));
        }
    }

    #[test]
    fn trivial_partition_is_whole_score() {
        let decay = DecayParams::new(0.5).unwrap();
        let s = step_stream();
        let r = hed_phase_decomposition(&s, &decay, &[5, 10]).unwrap();
        assert_eq!(r.contributions.len(), 1);
        assert!((r.contributions[0] - hed_score(&s, &decay).score).abs() < 1e-15);
    }

    #[test]
    fn early_phase_outweighs_late_phase_for_step() {
        for &l in &[0.01, 0.14, 0.5, 3.0] {
            let decay = DecayParams::new(l).unwrap();
            // 12 post-onset terms, 6 per phase (the last phase also holds T)
            let s = ProbabilityStream::new((0..=21).map(|t| if t >= 10 { 1.0 } else { 0.0 }).collect(), 10).unwrap();
            let r = hed_phase_decomposition(&s, &decay, &[10, 16, 21]).unwrap();
            assert!(r.contributions[0] > r.contributions[1], "lambda {l}");
        }
    }

    #[test]
    fn partition_validation() {
        let decay = DecayParams::new(0.5).unwrap();
        let s = step_stream();
        for bad in [&[5usize][..], &[4, 10], &[5, 9], &[5, 7, 7, 10], &[5, 8, 6, 10]] {
            assert!(matches!(
                hed_phase_decomposition(&s, &decay, bad),
                Err(HedError::InvalidPartition(_))
            ));
        }
        assert_eq!(even_partition(&s, 2).unwrap(), vec![5, 7, 10]);
        assert!(even_partition(&s, 6).is_err());
        assert!(even_partition(&s, 0).is_err());
    }

    #[test]
    fn softplus_branches_agree_at_cutoff() {
        for &beta in &[0.5, 1.0, 7.0, 1e4] {
            for &side in &[-1.0, 1.0] {
                let x_edge = side * SOFTPLUS_CUTOFF / beta;
                let inside = (beta * x_edge).exp().ln_1p() / beta;
                let outside = softplus(x_edge * (1.0 + 1e-15), beta);
                assert!(
                    (inside - outside).abs() <= 1e-13 * inside.abs().max(1e-300),
                    "{beta} {side}"
                );
            }
        }
        assert!(softplus(1.0, 1e6).is_finite());
        assert!(softplus(-1.0, 1e6) >= 0.0);
    }

    #[test]
    fn smooth_score_limits() {
        let decay = DecayParams::new(0.5).unwrap();
        let s = step_stream();
        let sharp = hed_smooth(&s, &decay, 1e4).unwrap();
        assert!((sharp - hed_score(&s, &decay).score).abs() < 1e-3);

        let c = ProbabilityStream::new(vec![0.4; 11], 5).unwrap();
        let beta = 3.0;
        let expected = std::f64::consts::LN_2 / beta * (0..=5).map(|k| decay.discount(k)).sum::<f64>() / 5.0;
        assert!((hed_smooth(&c, &decay, beta).unwrap() - expected).abs() < 1e-14);

        assert_eq!(hed_smooth(&s, &decay, 0.0), Err(HedError::NonPositiveBeta(0.0)));
        assert!(hed_smooth_grad(&s, &decay, -1.0).is_err());
    }

    #[test]
    fn smooth_gradient_structure() {
        let mut rng = crate::rng::seeded_rng(3);
        let decay = DecayParams::new(0.3).unwrap();
        let s = random_stream(&mut rng, 40, 12);
        let g = hed_smooth_grad(&s, &decay, 5.0).unwrap();
        assert_eq!(g.len(), 40);
        assert!(g[..12].iter().all(|&x| x == g[0] && x < 0.0));

        let mut probs = s.probs().to_vec();
        probs[12..].iter_mut().for_each(|p| *p = 0.8);
        let flat = s.with_probs(probs).unwrap();
        let g = hed_smooth_grad(&flat, &decay, 5.0).unwrap();
        assert!(g[12..].iter().all(|&x| x > 0.0));
        assert!(g[12..].windows(2).all(|w| w[1] <= w[0]));
    }

    fn two_regime_log(p1: Vec<f64>, transitions: Vec<Transition>) -> RegimeTransitionLog {
        let p0 = p1.iter().map(|p| 1.0 - p).collect();
        RegimeTransitionLog::new(2, transitions, vec![p0, p1]).unwrap()
    }

    #[test]
    fn matrix_reduces_to_scalar_score() {
        let decay = DecayParams::new(0.14).unwrap();
        let mut rng = crate::rng::seeded_rng(4);
        let s = random_stream(&mut rng, 60, 20);
        let log = two_regime_log(
            s.probs().to_vec(),
            vec![Transition {
                from: 0,
                to: 1,
                onset: 20,
            }],
        );
        let m = hed_matrix(&log, &decay).unwrap();
        assert_eq!(m.get(0, 1), Some(hed_score(&s, &decay).score));
        assert_eq!(m.get(1, 0), None);
        assert_eq!(m.get(0, 0), None);
        assert_eq!(m.get(1, 1), None);
        assert_eq!(m.count(0, 1), 1);
    }

    #[test]
    fn matrix_of_constant_posteriors_is_zero() {
        let decay = DecayParams::new(0.14).unwrap();
        let log = two_regime_log(
            vec![0.3; 50],
            vec![
                Transition {
                    from: 0,
                    to: 1,
                    onset: 10,
                },
                Transition {
                    from: 1,
                    to: 0,
                    onset: 30,
                },
            ],
        );
        let m = hed_matrix(&log, &decay).unwrap();
        assert_eq!(m.get(0, 1), Some(0.0));
        assert_eq!(m.get(1, 0), Some(0.0));
    }

    #[test]
    fn matrix_errors() {
        let decay = DecayParams::new(0.14).unwrap();
        let empty = two_regime_log(vec![0.3; 10], vec![]);
        assert_eq!(hed_matrix(&empty, &decay), Err(HedError::NoTransitions));
        let at_zero = two_regime_log(
            vec![0.3; 10],
            vec![Transition {
                from: 0,
                to: 1,
                onset: 0,
            }],
        );
        assert_eq!(
            hed_matrix(&at_zero, &decay),
            Err(HedError::WindowTooShort { onset: 0, end: 9 })
        );
        let adjacent = two_regime_log(
            vec![0.3; 10],
            vec![
                Transition {
                    from: 0,
                    to: 1,
                    onset: 3,
                },
                Transition {
                    from: 1,
                    to: 0,
                    onset: 4,
                },
            ],
        );
        assert_eq!(
            hed_matrix(&adjacent, &decay),
            Err(HedError::WindowTooShort { onset: 3, end: 3 })
        );
    }

    #[test]
    fn log_validation() {
        let ok = vec![vec![0.5; 5], vec![0.5; 5]];
        assert!(RegimeTransitionLog::new(1, vec![], vec![vec![1.0; 5]]).is_err());
        assert!(RegimeTransitionLog::new(2, vec![], vec![vec![0.5; 5], vec![0.6; 5]]).is_err());
        assert!(RegimeTransitionLog::new(2, vec![], vec![vec![0.5; 5], vec![0.5; 4]]).is_err());
        assert!(RegimeTransitionLog::new(
            2,
            vec![Transition {
                from: 0,
                to: 2,
                onset: 1
            }],
            ok.clone()
        )
        .is_err());
        assert!(RegimeTransitionLog::new(
            2,
            vec![Transition {
                from: 1,
                to: 1,
                onset: 1
            }],
            ok.clone()
        )
        .is_err());
        assert!(RegimeTransitionLog::new(
            2,
            vec![Transition {
                from: 0,
                to: 1,
                onset: 5
            }],
            ok.clone()
        )
        .is_err());
        assert!(RegimeTransitionLog::new(
            2,
            vec![
                Transition {
                    from: 0,
                    to: 1,
                    onset: 3
                },
                Transition {
                    from: 1,
                    to: 0,
                    onset: 2
                }
            ],
            ok
        )
        .is_err());
    }
    #[test]
    fn clamped_shift_can_raise_the_score_when_the_baseline_saturates() {
        // the clamp lowers the shifted baseline below base + c while the
        // post-onset value still has headroom, so the lift grows
        let d = DecayParams::new(0.5).unwrap();
        let s = ProbabilityStream::new(vec![0.2, 0.9, 0.7, 0.5], 2).unwrap();
        let c = 0.3;
        let shifted = s
            .with_probs(s.probs().iter().map(|p| (p + c).min(1.0)).collect())
            .unwrap();
        assert!(hed_score(&shifted, &d).score > hed_score(&s, &d).score);

        // saturation confined to the post-onset segment never helps
        let s = ProbabilityStream::new(vec![0.2, 0.4, 0.9, 0.5], 2).unwrap();
        let shifted = s
            .with_probs(s.probs().iter().map(|p| (p + c).min(1.0)).collect())
            .unwrap();
        assert!(hed_score(&shifted, &d).score < hed_score(&s, &d).score);
    }
}
