use std::fs;

use hed_core::{abc, frontier_curve, DecayParams, FrontierCurve, ProbabilityStream, Thresholds};
use serde_json::{json, Value};

use super::add_stream;
use crate::cli::FrontierArgs;
use crate::error::CliError;
use crate::report::{InputsDigest, RunReport};
use crate::stream_io::{format_real, read_stream};
use crate::svg::frontier_svg;

pub fn parse_thresholds(raw: Option<&str>) -> Result<Thresholds, CliError> {
    let Some(raw) = raw else {
        return Ok(Thresholds::Auto);
    };
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("threshold `{s}` is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Thresholds::Explicit)
}

pub fn curves_csv(curves: &[&FrontierCurve]) -> String {
    let mut out = String::from("curve,theta,far,hed\n");
    for c in curves {
        for p in c.points() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c.label,
                format_real(p.threshold),
                format_real(p.far),
                format_real(p.hed)
            ));
        }
    }
    out
}

pub fn build_curves(
    streams: &[(&ProbabilityStream, &str)],
    decay: &DecayParams,
    thresholds: &Thresholds,
) -> Result<Vec<FrontierCurve>, CliError> {
    streams
        .iter()
        .map(|(s, label)| frontier_curve(s, decay, thresholds, *label).map_err(CliError::from))
        .collect()
}

pub fn frontier_results(curves: &[FrontierCurve]) -> Result<Value, CliError> {
    let mut results = json!({
        "curves": curves.iter().map(|c| json!({ "label": c.label, "points": c.points() })).collect::<Vec<_>>(),
    });
    if let [a, b] = curves {
        let r = abc(a, b)?;
        results["abc"] = json!(r.abc);
        results["dominance"] = json!(r.dominated);
        results["grid_len"] = json!(r.grid.len());
    }
    Ok(results)
}

pub fn run(args: &FrontierArgs) -> Result<RunReport, CliError> {
    let decay = args.decay.resolve()?;
    let thresholds = parse_thresholds(args.thresholds.as_deref())?;
    let mut loaded = vec![(args.stream_a.clone(), read_stream(&args.stream_a)?)];
    if let Some(path) = &args.stream_b {
        loaded.push((path.clone(), read_stream(path)?));
    }
    if let [(_, a), (_, b)] = loaded.as_slice() {
        if (a.stream.t_start(), a.stream.horizon()) != (b.stream.t_start(), b.stream.horizon()) {
            return Err(CliError::Invariant(format!(
                "shared window invariant violated: (t_start {}, T {}) vs (t_start {}, T {})",
                a.stream.t_start(),
                a.stream.horizon(),
                b.stream.t_start(),
                b.stream.horizon()
            )));
        }
    }
    let streams: Vec<(&ProbabilityStream, &str)> =
        loaded.iter().map(|(_, l)| (&l.stream, l.meta.label.as_str())).collect();
    let curves = build_curves(&streams, &decay, &thresholds)?;
    let refs: Vec<&FrontierCurve> = curves.iter().collect();

    if let Some(path) = &args.out_csv {
        fs::write(path, curves_csv(&refs)).map_err(|e| CliError::write(path, e))?;
    }
    if let Some(path) = &args.out_svg {
        fs::write(path, frontier_svg(&refs)).map_err(|e| CliError::write(path, e))?;
    }

    let mut digest = InputsDigest::new();
    for (path, l) in &loaded {
        add_stream(&mut digest, path, l);
    }
    let parameters = json!({
        "lambda": decay.lambda_h(),
        "thresholds": match &thresholds {
            Thresholds::Auto => json!("auto"),
            Thresholds::Explicit(v) => json!(v),
        },
    });
    Ok(RunReport::new(
        "frontier",
        digest.finish(),
        parameters,
        frontier_results(&curves)?,
        None,
    ))
}
