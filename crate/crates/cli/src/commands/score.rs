use std::fs;

use hed_core::hed::{even_partition, BoundMode};
use hed_core::{
    hed_exact_piecewise, hed_phase_decomposition, hed_score, hed_smooth, hed_upper_bound, DecayParams,
    ProbabilityStream,
};
use serde_json::{json, Value};

use super::add_stream;
use crate::cli::ScoreArgs;
use crate::error::CliError;
use crate::report::{InputsDigest, RunReport};
use crate::stream_io::{format_real, meta_json, read_stream, sidecar_path, StreamMeta};

pub fn score_results(
    stream: &ProbabilityStream,
    decay: &DecayParams,
    phases: Option<usize>,
    beta: Option<f64>,
) -> Result<Value, CliError> {
    let r = hed_score(stream, decay);
    let phases = match phases {
        Some(k) => {
            let boundaries = even_partition(stream, k)?;
            let report = hed_phase_decomposition(stream, decay, &boundaries)?;
            json!({ "boundaries": report.boundaries, "contributions": report.contributions, "total": report.total() })
        }
        None => Value::Null,
    };
    let smooth = match beta {
        Some(b) => json!({ "beta": b, "score": hed_smooth(stream, decay, b)? }),
        None => Value::Null,
    };
    Ok(json!({
        "score": r.score,
        "exact_piecewise": hed_exact_piecewise(stream, decay),
        "baseline": r.baseline,
        "normalizer": r.normalizer,
        "lambda": decay.lambda_h(),
        "half_life": decay.half_life(),
        "bounds": {
            "discrete": hed_upper_bound(stream, decay, BoundMode::Discrete),
            "continuous": hed_upper_bound(stream, decay, BoundMode::Continuous),
        },
        "phases": phases,
        "smooth": smooth,
    }))
}

fn lifts_csv(stream: &ProbabilityStream, decay: &DecayParams) -> String {
    let r = hed_score(stream, decay);
    let mut out = String::from("t,p,lift,discount,weighted\n");
    for (k, (lift, disc)) in r.lifts.iter().zip(&r.discounts).enumerate() {
        let t = stream.t_start() + k;
        out.push_str(&format!(
            "{t},{},{},{},{}\n",
            format_real(stream.probs()[t]),
            format_real(*lift),
            format_real(*disc),
            format_real(lift * disc)
        ));
    }
    out
}

pub fn run(args: &ScoreArgs) -> Result<RunReport, CliError> {
    let decay = args.decay.resolve()?;
    let loaded = read_stream(&args.stream)?;
    let results = score_results(&loaded.stream, &decay, args.phases, args.smooth)?;

    if let Some(path) = &args.out_csv {
        fs::write(path, lifts_csv(&loaded.stream, &decay)).map_err(|e| CliError::write(path, e))?;
        let meta = StreamMeta {
            lambda: Some(decay.lambda_h()),
            ..loaded.meta.clone()
        };
        let meta_path = sidecar_path(path);
        fs::write(&meta_path, meta_json(&meta)).map_err(|e| CliError::write(&meta_path, e))?;
    }

    let mut digest = InputsDigest::new();
    add_stream(&mut digest, &args.stream, &loaded);
    let parameters = json!({
        "label": loaded.meta.label,
        "t_start": loaded.stream.t_start(),
        "horizon": loaded.stream.horizon(),
        "lambda": args.decay.lambda,
        "budget": args.decay.budget,
        "phases": args.phases,
        "smooth_beta": args.smooth,
    });
    Ok(RunReport::new("score", digest.finish(), parameters, results, None))
}
