//! Monte-Carlo and simulation oracles for the resampler, the noise generator,
//! the reference detectors and the scenario generator.

use hed_core::detectors::{fbm_sample, fgn_autocovariance, FbmSpec};
use hed_core::hed::BoundMode;
use hed_core::rng::derive_seed;
use hed_core::synth::{first_crossing, generate_scenario, DetectorKind, ScenarioSpec};
use hed_core::{
    block_resample, bootstrap_compare, hed_score, hed_upper_bound, BlockLen, BootstrapConfig, DecayParams,
    ProbabilityStream,
};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn block_starts_cover_positions_at_the_expected_rate() {
    // post-onset values tag their source position
    let seg: usize = 20;
    let block = 4;
    let mut probs = vec![0.0; 5];
    probs.extend((0..seg).map(|j| (j + 1) as f64 / 64.0));
    let s = ProbabilityStream::new(probs, 5).unwrap();
    let starts = seg - block + 1;
    let blocks = seg.div_ceil(block);

    let reps = 10_000;
    let mut counts = vec![Vec::new(); seg];
    for i in 0..reps {
        let r = block_resample(&s, block, derive_seed(77, i as u64)).unwrap();
        let mut c = vec![0.0; seg];
        for &p in r.post_onset() {
            c[(p * 64.0) as usize - 1] += 1.0;
        }
        for j in 0..seg {
            counts[j].push(c[j]);
        }
    }
    for (j, cj) in counts.iter().enumerate() {
        let cover = (0..starts).filter(|&st| st <= j && j < st + block).count();
        let expected = blocks as f64 * cover as f64 / starts as f64;
        let (mean, se) = mean_and_se(cj);
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "position {j}: {mean} vs {expected} (se {se})"
        );
    }
}

/// Lag-k autocovariance from independent paths; the spread across paths
/// gives a standard error that respects the within-path dependence.
fn autocovariance_check(hurst: f64, lags: &[usize], seed: u64) {
    let paths = 100;
    let len = 1000;
    let per_path: Vec<Vec<f64>> = (0..paths)
        .map(|i| {
            let spec = FbmSpec {
                hurst,
                len,
                scale: 1.0,
                seed: derive_seed(seed, i),
            };
            fbm_sample(&spec).unwrap()
        })
        .collect();
    for &k in lags {
        let estimates: Vec<f64> = per_path
            .iter()
            .map(|x| x.iter().zip(&x[k..]).map(|(a, b)| a * b).sum::<f64>() / (len - k) as f64)
            .collect();
        let (mean, se) = mean_and_se(&estimates);
        let truth = fgn_autocovariance(hurst, 1.0, k);
        assert!(
            (mean - truth).abs() <= 3.0 * se,
            "H {hurst} lag {k}: {mean} vs {truth} (se {se})"
        );
    }
}

#[test]
fn white_noise_at_half() {
    autocovariance_check(0.5, &[1], 1);
    assert_eq!(fgn_autocovariance(0.5, 1.0, 1), 0.0);
}

#[test]
fn lag_one_at_point_seven() {
    assert!((fgn_autocovariance(0.7, 1.0, 1) - 0.31951).abs() < 1e-5);
    autocovariance_check(0.7, &[1], 2);
}

#[test]
fn first_five_lags_at_point_nine() {
    autocovariance_check(0.9, &[0, 1, 2, 3, 4, 5], 3);
}

#[test]
fn slds_locks_on_quickly_when_means_are_far_apart() {
    for seed in 0..20 {
        let mut spec = ScenarioSpec::canonical(seed);
        spec.anomalous_mean = 7.0;
        spec.detectors = vec![DetectorKind::Slds];
        let sc = generate_scenario(&spec).unwrap();
        let s = sc.stream(DetectorKind::Slds).unwrap();
        let hit = first_crossing(s, 0.99).expect("crosses");
        assert!(hit <= spec.onset + 3, "seed {seed}: {hit}");
    }
}

#[test]
fn ewma_crosses_later_than_slds() {
    for seed in 0..20 {
        let sc = generate_scenario(&ScenarioSpec::canonical(seed)).unwrap();
        let slds = first_crossing(sc.stream(DetectorKind::Slds).unwrap(), 0.9).expect("slds crosses");
        // never crossing counts as later
        let ewma = first_crossing(sc.stream(DetectorKind::Ewma).unwrap(), 0.9).unwrap_or(usize::MAX);
        assert!(slds < ewma, "seed {seed}");
    }
}

#[test]
fn noise_free_scenario_gives_a_near_perfect_step() {
    let mut spec = ScenarioSpec::canonical(5);
    spec.nominal_variance = 1e-6;
    spec.anomalous_variance = 1e-6;
    spec.latent_diffusion = 0.0;
    let sc = generate_scenario(&spec).unwrap();
    let s = sc.stream(DetectorKind::Slds).unwrap();
    assert!(s.pre_onset().iter().all(|&p| p < 1e-12));
    assert!(s.post_onset().iter().all(|&p| p > 1.0 - 1e-12));
    let step = ProbabilityStream::new((0..=200).map(|t| if t >= 50 { 1.0 } else { 0.0 }).collect(), 50).unwrap();
    let d = DecayParams::new(0.14).unwrap();
    assert!((hed_score(s, &d).score - hed_score(&step, &d).score).abs() < 1e-10);
}

fn no_signal_spec(seed: u64) -> ScenarioSpec {
    let mut spec = ScenarioSpec::canonical(seed);
    spec.anomalous_mean = spec.nominal_mean;
    spec.anomalous_variance = spec.nominal_variance;
    spec
}

#[test]
fn no_signal_slds_scores_nothing() {
    let d = DecayParams::new(0.14).unwrap();
    for seed in 0..10 {
        let sc = generate_scenario(&no_signal_spec(seed)).unwrap();
        let s = sc.stream(DetectorKind::Slds).unwrap();
        assert!(hed_score(s, &d).score < 0.05 * hed_upper_bound(s, &d, BoundMode::Discrete));
    }
}

#[test]
#[ignore = "a centred EWMA has a noise floor above 5% of the bound; kept to document the gap"]
fn no_signal_ewma_scores_nothing() {
    let d = DecayParams::new(0.14).unwrap();
    for seed in 0..10 {
        let sc = generate_scenario(&no_signal_spec(seed)).unwrap();
        let s = sc.stream(DetectorKind::Ewma).unwrap();
        let ratio = hed_score(s, &d).score / hed_upper_bound(s, &d, BoundMode::Discrete);
        assert!(ratio < 0.05, "seed {seed}: {ratio}");
    }
}

#[test]
fn canonical_scenario_is_significant() {
    let sc = generate_scenario(&ScenarioSpec::canonical(0)).unwrap();
    let (a, b) = (
        sc.stream(DetectorKind::Slds).unwrap(),
        sc.stream(DetectorKind::Ewma).unwrap(),
    );
    let d = DecayParams::new(0.14).unwrap();
    let mut cfg = BootstrapConfig::new(0);
    cfg.block_len = BlockLen::Fixed(5);
    let r = bootstrap_compare(a, b, &d, &cfg).unwrap();
    assert!(r.observed_diff > 0.0);
    assert!(r.p_value < 0.01, "p = {}", r.p_value);
}
