//! Stream files: a `t,p` CSV plus a `<name>.meta.json` sidecar.
//!
//! Probabilities are written with 17 significant digits so that reading a
//! file back reproduces every `f64` bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use hed_core::ProbabilityStream;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamMeta {
    pub t_start: usize,
    pub label: String,
    /// Decay constant the stream was scored with, when it was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// A stream read from disk, with the raw bytes kept for digesting.
#[derive(Debug, Clone)]
pub struct LoadedStream {
    pub stream: ProbabilityStream,
    pub meta: StreamMeta,
    pub csv_bytes: Vec<u8>,
    pub meta_bytes: Vec<u8>,
}

/// `runs/a.csv` -> `runs/a.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn encode_csv(probs: &[f64]) -> Vec<u8> {
    let mut out = String::with_capacity(probs.len() * 28 + 4);
    out.push_str("t,p\n");
    for (t, &p) in probs.iter().enumerate() {
        out.push_str(&format!("{t},{}\n", format_real(p)));
    }
    out.into_bytes()
}

/// Parses the `t,p` body. Shape and number syntax problems are usage errors;
/// a broken step sequence is an invariant violation.
pub fn decode_csv(bytes: &[u8], origin: &str) -> Result<Vec<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?
        .clone();
    if header.len() != 2 || &header[0] != "t" || &header[1] != "p" {
        return Err(CliError::Usage(format!(
            "{origin}: expected header `t,p`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut probs = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        let line = row + 2;
        if record.len() != 2 {
            return Err(CliError::Usage(format!(
                "{origin}, line {line}: expected 2 fields, found {}",
                record.len()
            )));
        }
        let t: usize = record[0].parse().map_err(|_| {
            CliError::Usage(format!(
                "{origin}, line {line}: step `{}` is not an integer",
                &record[0]
            ))
        })?;
        let p: f64 = record[1].parse().map_err(|_| {
            CliError::Usage(format!(
                "{origin}, line {line}: probability `{}` is not a number",
                &record[1]
            ))
        })?;
        if t != row {
            return Err(CliError::Invariant(format!(
                "step sequence invariant violated at {origin}, line {line}: t = {t}, expected {row}"
            )));
        }
        probs.push(p);
    }
    Ok(probs)
}

pub fn parse_meta(bytes: &[u8], origin: &str) -> Result<StreamMeta, CliError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Usage(format!("{origin}: field `{path}`: {}", e.into_inner()))
    })
}

pub fn read_stream(csv_path: &Path) -> Result<LoadedStream, CliError> {
    let csv_bytes = fs::read(csv_path).map_err(|e| CliError::read(csv_path, e))?;
    let meta_path = sidecar_path(csv_path);
    let meta_bytes = fs::read(&meta_path).map_err(|e| CliError::read(&meta_path, e))?;
    let meta = parse_meta(&meta_bytes, &meta_path.display().to_string())?;
    let probs = decode_csv(&csv_bytes, &csv_path.display().to_string())?;
    let stream = ProbabilityStream::new(probs, meta.t_start)?;
    Ok(LoadedStream {
        stream,
        meta,
        csv_bytes,
        meta_bytes,
    })
}

pub fn write_stream(csv_path: &Path, stream: &ProbabilityStream, meta: &StreamMeta) -> Result<(), CliError> {
    if meta.t_start != stream.t_start() {
        return Err(CliError::Invariant(format!(
            "sidecar t_start {} disagrees with the stream onset {}",
            meta.t_start,
            stream.t_start()
        )));
    }
    fs::write(csv_path, encode_csv(stream.probs())).map_err(|e| CliError::write(csv_path, e))?;
    let meta_path = sidecar_path(csv_path);
    fs::write(&meta_path, meta_json(meta)).map_err(|e| CliError::write(&meta_path, e))
}

pub fn meta_json(meta: &StreamMeta) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(meta).expect("metadata serializes");
    s.push('\n');
    s.into_bytes()
}
