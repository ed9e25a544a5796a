//! Scenario execution, output writing and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{Format, ScenarioConfig};
use crate::error::CliError;
use crate::experiments::{self, Outcome};
use crate::table::{Cell, Table};

pub const MANIFEST: &str = "manifest.json";
pub const OUTPUT_DIR_ENV: &str = "BRAINSTORM_OUTPUT_DIR";

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    /// Recorded in the manifest; every experiment is deterministic.
    pub seed: Option<u64>,
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentStatus {
    pub name: String,
    /// `ok`, `violations` or the error code.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Scalar results; non-finite values are written as strings.
    pub summary: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: serde_json::Value,
    pub library_version: String,
    pub cli_version: String,
    pub seed: Option<u64>,
    pub strict: bool,
    pub duration_seconds: f64,
    pub experiments: Vec<ExperimentStatus>,
    pub outputs: Vec<String>,
    pub violations: Vec<String>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Option<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST)).ok()?;
        serde_json::from_str(&text).ok()
    }
}

/// Output directory: command line, then environment, then scenario file.
pub fn output_dir(cfg: &ScenarioConfig, opts: &RunOptions) -> PathBuf {
    opts.output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output.directory.clone())
}

fn fmt_value(v: f64) -> String {
    // shortest representation that parses back to `v`
    format!("{v}")
}

fn execute(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let kind = cfg.experiment_kind()?;
    let Some(sweep) = &cfg.sweep else {
        return experiments::run(kind, cfg, &cfg.model);
    };
    let mut merged = Outcome::default();
    for v in sweep.values()? {
        let p = sweep.apply(&cfg.model, v)?;
        let label = format!("{}={}", sweep.parameter, fmt_value(v));
        let out = experiments::run(kind, cfg, &p).map_err(|e| match e {
            CliError::InvalidParams(m) => CliError::InvalidParams(format!("{label}: {m}")),
            CliError::Solver(m) => CliError::Solver(format!("{label}: {m}")),
            other => other,
        })?;
        for t in out.tables {
            let t = t.with_leading(&sweep.parameter, v);
            match merged.tables.iter_mut().find(|m| m.name == t.name) {
                Some(m) => m.append(t),
                None => merged.tables.push(t),
            }
        }
        for (k, s) in out.summary {
            merged.summary.insert(format!("{label}/{k}"), s);
        }
        merged.violations.extend(out.violations.into_iter().map(|m| format!("{label}: {m}")));
    }
    Ok(merged)
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    // drop files listed by an earlier run so the directory matches the new manifest
    if let Some(old) = RunManifest::read(dir) {
        for f in old.outputs {
            let path = dir.join(&f);
            if Path::new(&f).file_name().map(|n| n == f.as_str()).unwrap_or(false) && path.is_file() {
                fs::remove_file(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            }
        }
    }
    Ok(())
}

fn write_table(dir: &Path, t: &Table, format: Format) -> Result<String, CliError> {
    let file = format!("{}.{}", t.name, format.extension());
    let path = dir.join(&file);
    let f = fs::File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    t.write(format, std::io::BufWriter::new(f)).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    Ok(file)
}

fn write_manifest(dir: &Path, m: &RunManifest) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(m).map_err(|e| CliError::Output(e.to_string()))?;
    fs::write(dir.join(MANIFEST), text + "\n").map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))
}

/// Validate, solve and write outputs. Validation failures write nothing;
/// once the output directory exists a manifest is always written.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let format = opts.format.unwrap_or(cfg.output.format);
    let dir = output_dir(cfg, opts);
    let mut echo = cfg.clone();
    echo.output.directory = dir.clone();
    echo.output.format = format;
    let mut manifest = RunManifest {
        config: serde_json::to_value(&echo).map_err(|e| CliError::InvalidConfig(e.to_string()))?,
        library_version: brainstorm::VERSION.to_string(),
        cli_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: opts.seed,
        strict: opts.strict,
        duration_seconds: 0.0,
        experiments: Vec::new(),
        outputs: Vec::new(),
        violations: Vec::new(),
    };
    prepare_dir(&dir)?;

    let result = execute(cfg);
    let mut status = ExperimentStatus {
        name: cfg.experiment.clone(),
        status: "ok".into(),
        error: None,
        summary: BTreeMap::new(),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            status.status = e.code().into();
            status.error = Some(e.to_string());
            manifest.experiments.push(status);
            manifest.duration_seconds = start.elapsed().as_secs_f64();
            write_manifest(&dir, &manifest)?;
            return Err(e);
        }
    };
    status.summary = outcome
        .summary
        .into_iter()
        .map(|(k, v)| (k, serde_json::to_value(Cell::Float(v)).expect("cell serializes")))
        .collect();
    manifest.violations = outcome.violations;
    if !manifest.violations.is_empty() {
        status.status = "violations".into();
    }
    manifest.experiments.push(status);

    let abort = opts.strict && !manifest.violations.is_empty();
    if !abort {
        for t in &outcome.tables {
            manifest.outputs.push(write_table(&dir, t, format)?);
        }
    }
    manifest.duration_seconds = start.elapsed().as_secs_f64();
    write_manifest(&dir, &manifest)?;
    if abort {
        return Err(CliError::Invariant(manifest.violations.len()));
    }
    Ok(manifest)
}
