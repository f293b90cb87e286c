//! FAR-HED frontiers.
//!
//! For a threshold `theta` a detector is reduced to the alarm stream
//! `B_t = 1[P_t >= theta]`. The frontier point is the pre-onset false-alarm
//! rate of that alarm stream together with its HED score (baseline recomputed
//! on the alarm stream). Two curves are compared on the union of their FAR
//! values with right-continuous step interpolation.

use serde::Serialize;
use thiserror::Error;

use crate::hed::{hed_score, DecayParams, HedError, ProbabilityStream};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontierError {
    #[error("threshold {0} is not in [0, 1]")]
    ThresholdOutOfRange(f64),
    #[error("frontier curve has no points")]
    EmptyCurve,
    #[error("invalid frontier curve: {0}")]
    InvalidCurve(String),
    #[error(transparent)]
    Hed(#[from] HedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub threshold: f64,
    pub far: f64,
    pub hed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierCurve {
    pub label: String,
    points: Vec<FrontierPoint>,
}

impl FrontierCurve {
    /// Points must have strictly increasing thresholds and nonincreasing FAR.
    pub fn new(label: impl Into<String>, points: Vec<FrontierPoint>) -> Result<Self, FrontierError> {
        if points.is_empty() {
            return Err(FrontierError::EmptyCurve);
        }
        if points.windows(2).any(|w| w[0].threshold >= w[1].threshold) {
            return Err(FrontierError::InvalidCurve(
                "thresholds must be strictly increasing".into(),
            ));
        }
        if points.windows(2).any(|w| w[1].far > w[0].far) {
            return Err(FrontierError::InvalidCurve(
                "FAR must be nonincreasing in the threshold".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }

    pub fn points(&self) -> &[FrontierPoint] {
        &self.points
    }

    /// `(far, hed)` knots sorted by FAR; ties keep the largest HED.
    fn knots(&self) -> Vec<(f64, f64)> {
        let mut knots: Vec<(f64, f64)> = Vec::with_capacity(self.points.len());
        for p in self.points.iter().rev() {
            match knots.last_mut() {
                Some(last) if last.0 == p.far => last.1 = last.1.max(p.hed),
                _ => knots.push((p.far, p.hed)),
            }
        }
        knots
    }
}

/// Right-continuous step interpolation; flat extension left of the first knot.
fn step_value(knots: &[(f64, f64)], u: f64) -> f64 {
    let idx = knots.partition_point(|&(far, _)| far <= u);
    knots[idx.saturating_sub(1)].1
}

#[derive(Debug, Clone)]
pub enum Thresholds {
    /// Unique stream values together with 0 and 1.
    Auto,
    Explicit(Vec<f64>),
}

impl Thresholds {
    fn resolve(&self, stream: &ProbabilityStream) -> Result<Vec<f64>, FrontierError> {
        let mut thetas = match self {
            Thresholds::Auto => {
                let mut v = stream.probs().to_vec();
                v.extend([0.0, 1.0]);
                v
            }
            Thresholds::Explicit(v) => {
                if let Some(&bad) = v.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(FrontierError::ThresholdOutOfRange(bad));
                }
                v.clone()
            }
        };
        thetas.sort_by(f64::total_cmp);
        thetas.dedup();
        if thetas.is_empty() {
            return Err(FrontierError::EmptyCurve);
        }
        Ok(thetas)
    }
}

/// Fraction of pre-onset steps with `P_t >= theta`.
pub fn far(stream: &ProbabilityStream, theta: f64) -> f64 {
    let pre = stream.pre_onset();
    pre.iter().filter(|&&p| p >= theta).count() as f64 / pre.len() as f64
}

pub fn binarize(stream: &ProbabilityStream, theta: f64) -> Result<ProbabilityStream, HedError> {
    stream.with_probs(
        stream
            .probs()
            .iter()
            .map(|&p| if p >= theta { 1.0 } else { 0.0 })
            .collect(),
    )
}

pub fn frontier_curve(
    stream: &ProbabilityStream,
    decay: &DecayParams,
    thresholds: &Thresholds,
    label: impl Into<String>,
) -> Result<FrontierCurve, FrontierError> {
    let points = thresholds
        .resolve(stream)?
        .into_iter()
        .map(|theta| {
            Ok(FrontierPoint {
                threshold: theta,
                far: far(stream, theta),
                hed: hed_score(&binarize(stream, theta)?, decay).score,
            })
        })
        .collect::<Result<Vec<_>, FrontierError>>()?;
    FrontierCurve::new(label, points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    ADominates,
    BDominates,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbcResult {
    /// Signed area between the curves over FAR in `[0, 1]`; positive favours A.
    pub abc: f64,
    /// Shared FAR abscissa, ascending, always containing 0 and 1.
    pub grid: Vec<f64>,
    pub dominated: Dominance,
}

struct SharedGrid {
    grid: Vec<f64>,
    hed_a: Vec<f64>,
    hed_b: Vec<f64>,
}

fn shared_grid(a: &FrontierCurve, b: &FrontierCurve) -> SharedGrid {
    let (ka, kb) = (a.knots(), b.knots());
    let mut grid: Vec<f64> = ka.iter().chain(&kb).map(|k| k.0).chain([0.0, 1.0]).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let hed_a = grid.iter().map(|&u| step_value(&ka, u)).collect();
    let hed_b = grid.iter().map(|&u| step_value(&kb, u)).collect();
    SharedGrid { grid, hed_a, hed_b }
}

fn dominance(g: &SharedGrid) -> Dominance {
    let pairs = || g.hed_a.iter().zip(&g.hed_b);
    if pairs().all(|(a, b)| a >= b) && pairs().any(|(a, b)| a > b) {
        Dominance::ADominates
    } else if pairs().all(|(a, b)| b >= a) && pairs().any(|(a, b)| b > a) {
        Dominance::BDominates
    } else {
        Dominance::Neither
    }
}

pub fn abc(curve_a: &FrontierCurve, curve_b: &FrontierCurve) -> Result<AbcResult, FrontierError> {
    if curve_a.points.is_empty() || curve_b.points.is_empty() {
        return Err(FrontierError::EmptyCurve);
    }
    let g = shared_grid(curve_a, curve_b);
    let diff: Vec<f64> = g.hed_a.iter().zip(&g.hed_b).map(|(a, b)| a - b).collect();
    let area = compensated_sum(
        g.grid
            .windows(2)
            .zip(diff.windows(2))
            .map(|(u, d)| (u[1] - u[0]) * (d[0] + d[1]) / 2.0),
    );
    Ok(AbcResult {
        abc: area,
        dominated: dominance(&g),
        grid: g.grid,
    })
}

/// A's curve is at or above B's on the whole shared grid, strictly somewhere.
pub fn pareto_dominates(curve_a: &FrontierCurve, curve_b: &FrontierCurve) -> Result<bool, FrontierError> {
    if curve_a.points.is_empty() || curve_b.points.is_empty() {
        return Err(FrontierError::EmptyCurve);
    }
    Ok(dominance(&shared_grid(curve_a, curve_b)) == Dominance::ADominates)
}
