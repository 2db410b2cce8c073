//! Config-file runner writing CSV tables and a manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{StudyConfig, StudySpec};
use super::report::{hash_hex, run_ratio_study, RatioStudyReport};
use crate::error::Result;

pub const SEED_ENV: &str = "SEMIRV_SEED";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub parallel: bool,
    /// Takes precedence over `SEMIRV_SEED` and config seeds.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyRecord {
    pub name: String,
    pub csv: Option<String>,
    pub seed: u64,
    pub predictor_tag: Option<String>,
    pub trend: Option<String>,
    pub passed: bool,
    pub failures: Vec<String>,
    pub duration_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_path: String,
    pub config_sha256: String,
    pub base_seed: u64,
    pub seed_source: String,
    pub timestamp_unix: u64,
    pub studies: Vec<StudyRecord>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// 0 when every assertion holds, 1 on assertion or study failure, 2 on schema or I/O errors.
    pub exit_code: i32,
    pub messages: Vec<String>,
    pub manifest: Option<Manifest>,
    pub reports: Vec<(String, RatioStudyReport)>,
}

impl RunOutcome {
    fn usage(messages: Vec<String>) -> Self {
        RunOutcome {
            exit_code: 2,
            messages,
            manifest: None,
            reports: Vec::new(),
        }
    }
}

fn resolve_seed(
    config: &StudyConfig,
    options: &RunOptions,
) -> std::result::Result<(u64, String), String> {
    if let Some(s) = options.seed {
        return Ok((s, "command line".into()));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|s| (s, SEED_ENV.to_string()))
            .map_err(|e| format!("{SEED_ENV}={v:?} is not an unsigned integer: {e}")),
        Err(_) => Ok((config.seed, "config".into())),
    }
}

fn run_study(
    spec: &StudySpec,
    seed: u64,
    out_dir: &Path,
) -> (StudyRecord, Option<RatioStudyReport>) {
    let start = Instant::now();
    let result = run_ratio_study(
        &spec.oracle,
        &spec.predictor,
        &spec.inputs,
        &spec.x_grid.points(),
        spec.x_offset,
        seed,
    )
    .and_then(|report| {
        let file = format!("{}.csv", spec.name);
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        fs::write(out_dir.join(&file), buf)?;
        Ok((report, file))
    });
    let mut record = StudyRecord {
        name: spec.name.clone(),
        csv: None,
        seed,
        predictor_tag: None,
        trend: None,
        passed: false,
        failures: Vec::new(),
        duration_ms: 0,
    };
    let report = match result {
        Ok((report, file)) => {
            record.failures = spec
                .assertions
                .iter()
                .filter_map(|a| a.check(&report))
                .collect();
            record.passed = record.failures.is_empty();
            record.csv = Some(file);
            record.predictor_tag = Some(report.predictor_tag.clone());
            record.trend = Some(report.trend.name().to_string());
            Some(report)
        }
        Err(e) => {
            record.failures.push(format!("study error: {e}"));
            None
        }
    };
    record.duration_ms = start.elapsed().as_millis();
    (record, report)
}

/// Runs every study of a config file in order.
pub fn run_config_file(path: &Path, options: &RunOptions) -> RunOutcome {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return RunOutcome::usage(vec![format!("{}: {e}", path.display())]),
    };
    let text = match String::from_utf8(bytes.clone()) {
        Ok(t) => t,
        Err(e) => return RunOutcome::usage(vec![format!("{}: {e}", path.display())]),
    };
    let config = match StudyConfig::from_json_str(&text) {
        Ok(c) => c,
        Err(e) => return RunOutcome::usage(vec![format!("{}: {e}", path.display())]),
    };
    let (base_seed, seed_source) = match resolve_seed(&config, options) {
        Ok(s) => s,
        Err(m) => return RunOutcome::usage(vec![m]),
    };
    if let Err(e) = fs::create_dir_all(&options.out_dir) {
        return RunOutcome::usage(vec![format!("{}: {e}", options.out_dir.display())]);
    }
    let overridden = seed_source != "config";
    let seeds: Vec<u64> = config
        .studies
        .iter()
        .enumerate()
        .map(|(i, s)| match s.seed {
            Some(own) if !overridden => own,
            _ => base_seed.wrapping_add(i as u64),
        })
        .collect();
    let run = |(spec, &seed): (&StudySpec, &u64)| run_study(spec, seed, &options.out_dir);
    let results: Vec<(StudyRecord, Option<RatioStudyReport>)> = if options.parallel {
        config
            .studies
            .par_iter()
            .zip(seeds.par_iter())
            .map(run)
            .collect()
    } else {
        config.studies.iter().zip(seeds.iter()).map(run).collect()
    };
    let mut messages = Vec::new();
    let mut reports = Vec::new();
    let mut records = Vec::new();
    for (record, report) in results {
        if record.passed {
            messages.push(format!("PASS {}", record.name));
        } else {
            messages.push(format!(
                "FAIL {}: {}",
                record.name,
                record.failures.join("; ")
            ));
        }
        if let Some(r) = report {
            reports.push((record.name.clone(), r));
        }
        records.push(record);
    }
    let exit_code = if records.iter().all(|r| r.passed) {
        0
    } else {
        1
    };
    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_path: path.display().to_string(),
        config_sha256: hash_hex(&bytes),
        base_seed,
        seed_source,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        studies: records,
    };
    let written: Result<()> = serde_json::to_vec_pretty(&manifest)
        .map_err(Into::into)
        .and_then(|m| fs::write(options.out_dir.join("manifest.json"), m).map_err(Into::into));
    if let Err(e) = written {
        messages.push(format!("manifest: {e}"));
        return RunOutcome {
            exit_code: 2,
            messages,
            manifest: Some(manifest),
            reports,
        };
    }
    RunOutcome {
        exit_code,
        messages,
        manifest: Some(manifest),
        reports,
    }
}
