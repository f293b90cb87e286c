use std::fs;

use hed_core::synth::{generate_scenario, Scenario, ScenarioSpec};
use serde_json::json;

use crate::cli::SimulateArgs;
use crate::error::CliError;
use crate::report::{sha256_hex, InputsDigest, RunReport};
use crate::stream_io::{encode_csv, format_real, meta_json, StreamMeta};

pub fn parse_config(bytes: &[u8], origin: &str) -> Result<ScenarioSpec, CliError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let spec: ScenarioSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Usage(format!("{origin}: field `{path}`: {}", e.into_inner()))
    })?;
    spec.validate()?;
    Ok(spec)
}

fn pretty(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s.into_bytes()
}

/// Every file a scenario run writes, in a fixed order.
pub fn scenario_artifacts(scenario: &Scenario) -> Vec<(String, Vec<u8>)> {
    let spec = &scenario.spec;
    let mut files = vec![
        ("scenario.json".to_owned(), pretty(&json!(spec))),
        (
            "truth.json".to_owned(),
            pretty(&json!({
                "onset": scenario.truth_onset,
                "horizon": spec.horizon,
                "seed": spec.seed,
                "detectors": scenario.streams.iter().map(|(k, _)| k.name()).collect::<Vec<_>>(),
            })),
        ),
    ];
    let mut obs = String::from("t,y,latent,regime\n");
    for (t, ((y, z), r)) in scenario
        .observations
        .iter()
        .zip(&scenario.latent)
        .zip(&scenario.labels)
        .enumerate()
    {
        obs.push_str(&format!("{t},{},{},{r}\n", format_real(*y), format_real(*z)));
    }
    files.push(("observations.csv".to_owned(), obs.into_bytes()));
    for (kind, stream) in &scenario.streams {
        let meta = StreamMeta {
            t_start: stream.t_start(),
            label: kind.name().to_owned(),
            lambda: None,
        };
        files.push((format!("{}.csv", kind.name()), encode_csv(stream.probs())));
        files.push((format!("{}.meta.json", kind.name()), meta_json(&meta)));
    }
    files
}

pub fn run(args: &SimulateArgs) -> Result<RunReport, CliError> {
    let bytes = fs::read(&args.config).map_err(|e| CliError::read(&args.config, e))?;
    let spec = parse_config(&bytes, &args.config.display().to_string())?;
    let scenario = generate_scenario(&spec)?;
    let files = scenario_artifacts(&scenario);

    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::write(&args.out_dir, e))?;
    for (name, content) in &files {
        let path = args.out_dir.join(name);
        fs::write(&path, content).map_err(|e| CliError::write(&path, e))?;
    }

    let mut digest = InputsDigest::new();
    digest.add("config", &bytes);
    let results = json!({
        "truth_onset": scenario.truth_onset,
        "artifacts": files
            .iter()
            .map(|(name, content)| json!({ "name": name, "sha256": sha256_hex(content), "bytes": content.len() }))
            .collect::<Vec<_>>(),
    });
    let parameters = json!(spec);
    Ok(RunReport::new(
        "simulate",
        digest.finish(),
        parameters,
        results,
        Some(spec.seed),
    ))
}
