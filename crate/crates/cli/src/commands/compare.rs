use hed_core::{bootstrap_compare, hed_score, BlockLen, BootstrapConfig, DecayParams, ProbabilityStream};
use serde_json::{json, Value};

use super::add_stream;
use crate::cli::CompareArgs;
use crate::error::CliError;
use crate::report::{InputsDigest, RunReport};
use crate::stream_io::read_stream;

pub fn compare_results(
    a: &ProbabilityStream,
    b: &ProbabilityStream,
    decay: &DecayParams,
    cfg: &BootstrapConfig,
) -> Result<Value, CliError> {
    let r = bootstrap_compare(a, b, decay, cfg)?;
    Ok(json!({
        "score_a": hed_score(a, decay).score,
        "score_b": hed_score(b, decay).score,
        "observed_diff": r.observed_diff,
        "p_value": r.p_value,
        "ci_low": r.ci_low,
        "ci_high": r.ci_high,
        "confidence_level": r.confidence_level,
        "block_len": r.block_len,
        "num_resamples": r.resampled_diffs.len(),
    }))
}

pub fn run(args: &CompareArgs) -> Result<RunReport, CliError> {
    let decay = args.decay.resolve()?;
    let a = read_stream(&args.stream_a)?;
    let b = read_stream(&args.stream_b)?;
    let cfg = BootstrapConfig {
        num_resamples: args.resamples,
        block_len: args.block.map_or(BlockLen::Auto, BlockLen::Fixed),
        seed: args.seed,
        confidence_level: args.confidence,
    };
    let results = compare_results(&a.stream, &b.stream, &decay, &cfg)?;
    let mut digest = InputsDigest::new();
    add_stream(&mut digest, &args.stream_a, &a);
    add_stream(&mut digest, &args.stream_b, &b);
    let parameters = json!({
        "label_a": a.meta.label,
        "label_b": b.meta.label,
        "lambda": decay.lambda_h(),
        "resamples": args.resamples,
        "block": args.block,
        "confidence": args.confidence,
    });
    Ok(RunReport::new(
        "compare",
        digest.finish(),
        parameters,
        results,
        Some(args.seed),
    ))
}
