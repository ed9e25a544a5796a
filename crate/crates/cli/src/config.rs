//! Scenario files: a TOML document naming one experiment and its inputs.

use std::path::{Path, PathBuf};

use brainstorm::{ModelParams, RateDistribution, Spacing, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::experiments::Experiment;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: ModelParams,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general_rates: Option<GeneralRates>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract: Option<ContractConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub belief: Option<BeliefConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

/// Tolerances used when checking solver output. The solvers themselves run
/// to machine precision.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_root_tol")]
    pub root_tol: f64,
    #[serde(default = "default_integral_tol")]
    pub integral_tol: f64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_root_tol() -> f64 {
    1e-10
}
fn default_integral_tol() -> f64 {
    1e-10
}
fn default_tail_tol() -> f64 {
    1e-11
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { root_tol: default_root_tol(), integral_tol: default_integral_tol(), tail_tol: default_tail_tol() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_directory() -> PathBuf {
    PathBuf::from("output")
}
fn default_format() -> Format {
    Format::Csv
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), format: default_format() }
    }
}

/// Repeat the experiment for each value of one model parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<SweepRange>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

pub const SWEEP_PARAMETERS: [&str; 6] = ["r", "nu0", "delta0", "lambda_e", "lambda_h", "c"];

impl SweepConfig {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, &self.range) {
            (Some(v), None) if !v.is_empty() => Ok(v.clone()),
            (None, Some(r)) if r.points >= 2 && r.to > r.from => Ok((0..r.points)
                .map(|i| if i + 1 == r.points { r.to } else { r.from + (r.to - r.from) * i as f64 / (r.points - 1) as f64 })
                .collect()),
            (None, Some(_)) => Err(CliError::InvalidConfig("sweep range needs from < to and at least 2 points".into())),
            _ => Err(CliError::InvalidConfig("sweep needs exactly one of a nonempty `values` list or `range`".into())),
        }
    }

    /// Copy of `p` with the swept parameter set to `v`.
    pub fn apply(&self, p: &ModelParams, v: f64) -> Result<ModelParams, CliError> {
        let mut a = [p.r(), p.nu0(), p.delta0(), p.lambda_e(), p.lambda_h(), p.c()];
        let i = SWEEP_PARAMETERS
            .iter()
            .position(|n| *n == self.parameter)
            .ok_or_else(|| CliError::InvalidConfig(format!("cannot sweep `{}`", self.parameter)))?;
        a[i] = v;
        ModelParams::new(a[0], a[1], a[2], a[3], a[4], a[5])
            .map_err(|e| CliError::InvalidParams(format!("{}={v}: {e}", self.parameter)))
    }
}

/// Arrival-rate distributions for the easy and hard states, as
/// `[rate, mass]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralRates {
    pub easy: RateDistribution,
    pub hard: RateDistribution,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub gamma: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub n_values: Vec<u32>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub count: usize,
}

/// Options for the belief-path experiment. With `first_effort` set, the grid
/// is read as efforts on a second approach instead of calendar time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefConfig {
    #[serde(default = "default_arms")]
    pub arms: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_effort: Option<f64>,
}

fn default_arms() -> usize {
    3
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::InvalidConfig(e.to_string()))
    }

    pub fn experiment_kind(&self) -> Result<Experiment, CliError> {
        self.experiment.parse()
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        let g = self.grid;
        TimeGrid::build(g.t_min, g.t_max, g.points, g.spacing).map_err(|e| CliError::InvalidConfig(format!("grid: {e}")))
    }

    /// Checks that do not require running a solver.
    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.experiment_kind()?;
        if self.name.trim().is_empty() {
            return Err(CliError::InvalidConfig("scenario name is empty".into()));
        }
        self.time_grid()?;
        let s = self.solver;
        if [s.root_tol, s.integral_tol, s.tail_tol].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CliError::InvalidConfig("solver tolerances must be positive".into()));
        }
        if let Some(sw) = &self.sweep {
            for v in sw.values()? {
                sw.apply(&self.model, v)?;
            }
        }
        for block in kind.required_blocks() {
            let present = match *block {
                "contract" => self.contract.is_some(),
                "convergence" => self.convergence.is_some(),
                _ => true,
            };
            if !present {
                return Err(CliError::InvalidConfig(format!("experiment `{}` needs a [{block}] block", self.experiment)));
            }
        }
        if let Some(c) = &self.convergence {
            if c.n_values.is_empty() || c.n_values.contains(&0) {
                return Err(CliError::InvalidConfig("convergence n_values must be nonempty and positive".into()));
            }
        }
        if let Some(t) = self.thresholds {
            if t.count == 0 {
                return Err(CliError::InvalidConfig("threshold count must be positive".into()));
            }
        }
        if let Some(b) = self.belief {
            if b.arms == 0 {
                return Err(CliError::InvalidConfig("belief arms must be positive".into()));
            }
            if let Some(k) = b.first_effort {
                if !(k.is_finite() && k >= 0.0) {
                    return Err(CliError::InvalidConfig("first_effort must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }
}
