//! Early-detection scoring for regime-switching posterior streams.
//!
//! The crate is organised around one scalar: the exponentially discounted,
//! baseline-corrected lift of a detector's posterior after a known onset
//! (the HED score). Around it sit
//!
//! - [`hed`]: the score itself, its exact piecewise-constant integral,
//!   calibration of the decay constant, bounds, phase decomposition, a
//!   differentiable softplus surrogate and the multi-regime matrix;
//! - [`significance`]: paired moving-block bootstrap comparison of two detectors;
//! - [`frontier`]: threshold-parameterised FAR-HED curves, area between
//!   curves and Pareto dominance;
//! - [`detectors`]: fractional Gaussian noise, an Euler-integrated fractional
//!   SDE, a switching forward filter and an EWMA baseline;
//! - [`synth`]: seeded synthetic scenarios with a scripted onset.

#![forbid(unsafe_code)]

pub mod detectors;
pub mod frontier;
pub mod hed;
mod numeric;
pub mod rng;
pub mod significance;
pub mod synth;

pub use frontier::{
    abc, far, frontier_curve, pareto_dominates, AbcResult, Dominance, FrontierCurve, FrontierPoint, Thresholds,
};
pub use hed::{
    compute_baseline, hed_exact_piecewise, hed_matrix, hed_phase_decomposition, hed_score, hed_smooth, hed_smooth_grad,
    hed_upper_bound, BoundMode, DecayParams, HedError, HedMatrix, HedResult, PhaseReport, ProbabilityStream,
    RegimeTransitionLog, Transition,
};
pub use significance::{
    block_resample, bootstrap_compare, default_block_len, BlockLen, BootstrapConfig, BootstrapError, BootstrapResult,
};
