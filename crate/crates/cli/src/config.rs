//! JSON scenario configuration. Every object rejects unknown keys.

use std::path::Path;

use pairdyn::lindblad::DissipatorMatrix;
use pairdyn::micro::GravitationalSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_LINEAR_POINTS: usize = 200;
pub const DEFAULT_LOG_POINTS_PER_DECADE: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Isolated,
    MicroRandom,
    MicroGravitational,
    Lindblad,
    LindbladTdep,
    Compare,
    ThresholdScan,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Isolated => "isolated",
            Self::MicroRandom => "micro_random",
            Self::MicroGravitational => "micro_gravitational",
            Self::Lindblad => "lindblad",
            Self::LindbladTdep => "lindblad_tdep",
            Self::Compare => "compare",
            Self::ThresholdScan => "threshold_scan",
        }
    }
}

/// Top-level document as written on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: ScenarioKind,
    physics: Value,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    grid: Option<GridSpec>,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Defaults to 0 for linear grids; required and positive for log grids.
    #[serde(default)]
    pub t_min: Option<f64>,
    pub t_max: f64,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File stem for everything the run writes.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub svg: bool,
    #[serde(default)]
    pub log_log: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolatedParams {
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicroRandomParams {
    pub omega: f64,
    pub n_env: u32,
    /// Multiplies every environment coupling.
    #[serde(default = "one")]
    pub coupling_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingKind {
    #[default]
    Uniform,
    RandomSimplex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravitationalParams {
    pub gravity: GravitationalSpec,
    #[serde(default)]
    pub weighting: WeightingKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exponential,
    Stepped,
    ClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exponential => "exponential",
            Self::Stepped => "stepped",
            Self::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladParams {
    pub omega: f64,
    pub lambda: f64,
    /// Per-site dissipator shapes, multiplied by λ. Default: K_x = K_y = 1.
    #[serde(default)]
    pub dissipator_a: Option<DissipatorMatrix>,
    #[serde(default)]
    pub dissipator_b: Option<DissipatorMatrix>,
    #[serde(default)]
    pub local_fields: Option<[f64; 2]>,
    #[serde(default)]
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladTdepParams {
    pub omega: f64,
    pub lambda_tilde: f64,
    #[serde(default = "stepped")]
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareParams {
    pub omega: f64,
    pub n_env: u32,
    #[serde(default = "one")]
    pub coupling_scale: f64,
    /// Overrides the λ = σ calibration.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Overrides the λ̃ = σ²/2 calibration.
    #[serde(default)]
    pub lambda_tilde: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdParams {
    pub omega: f64,
    /// Bracket in units of |ω|.
    #[serde(default = "default_ratio_range")]
    pub ratio_range: (f64, f64),
    /// Bisection resolution in units of |ω|.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Physics {
    Isolated(IsolatedParams),
    MicroRandom(MicroRandomParams),
    MicroGravitational(GravitationalParams),
    Lindblad(LindbladParams),
    LindbladTdep(LindbladTdepParams),
    Compare(CompareParams),
    ThresholdScan(ThresholdParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// λ/|ω| for a `lindblad` base scenario.
    LambdaRatio,
    /// Number of environment particles for a `micro_gravitational` base.
    GravitationalN,
    /// Coupling multiplier for a `micro_random` or `compare` base.
    CouplingScale,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::LambdaRatio => "lambda_ratio",
            Self::GravitationalN => "gravitational_n",
            Self::CouplingScale => "coupling_scale",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

/// Validated configuration plus the hash of its source bytes.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub physics: Physics,
    pub seed: u64,
    pub grid: Option<GridSpec>,
    pub output: OutputSpec,
    pub tolerance: f64,
    pub sweep: Option<SweepSpec>,
    pub config_hash: String,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn stepped() -> Method {
    Method::Stepped
}

fn default_ratio_range() -> (f64, f64) {
    (0.5, 1.5)
}

fn default_resolution() -> f64 {
    1e-3
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn physics_as<T: for<'de> Deserialize<'de>>(kind: ScenarioKind, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| usage(format!("physics for scenario {}: {e}", kind.name())))
}

fn finite_nonzero(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x != 0.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} must be finite and nonzero, got {x}")))
    }
}

fn finite_nonnegative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} must be finite and nonnegative, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        Self::from_bytes(&bytes, overrides)
    }

    pub fn from_bytes(bytes: &[u8], overrides: Overrides) -> Result<Self> {
        let raw: RawConfig = serde_json::from_slice(bytes).map_err(|e| usage(format!("config: {e}")))?;
        let kind = raw.scenario;
        let physics = match kind {
            ScenarioKind::Isolated => Physics::Isolated(physics_as(kind, raw.physics)?),
            ScenarioKind::MicroRandom => Physics::MicroRandom(physics_as(kind, raw.physics)?),
            ScenarioKind::MicroGravitational => Physics::MicroGravitational(physics_as(kind, raw.physics)?),
            ScenarioKind::Lindblad => Physics::Lindblad(physics_as(kind, raw.physics)?),
            ScenarioKind::LindbladTdep => Physics::LindbladTdep(physics_as(kind, raw.physics)?),
            ScenarioKind::Compare => Physics::Compare(physics_as(kind, raw.physics)?),
            ScenarioKind::ThresholdScan => Physics::ThresholdScan(physics_as(kind, raw.physics)?),
        };
        let config = Self {
            scenario: kind,
            physics,
            seed: overrides.seed.or(raw.seed).unwrap_or(DEFAULT_SEED),
            grid: raw.grid,
            output: raw.output,
            tolerance: overrides.tolerance.or(raw.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            sweep: raw.sweep,
            config_hash: hex::encode(Sha256::digest(bytes)),
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(usage(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if let Some(name) = &self.output.name {
            let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
            if !ok || name.starts_with('.') {
                return Err(usage(format!("output name {name:?} must be a plain file stem")));
            }
        }
        if let Some(grid) = &self.grid {
            grid.check()?;
        }
        match &self.physics {
            Physics::Isolated(p) => finite_nonzero("omega", p.omega)?,
            Physics::MicroRandom(p) => {
                finite_nonzero("omega", p.omega)?;
                if p.n_env == 0 {
                    return Err(usage("n_env must be at least 1"));
                }
                finite_nonnegative("coupling_scale", p.coupling_scale)?;
            }
            Physics::MicroGravitational(p) => {
                if !(p.gravity.g.is_finite() && p.gravity.g > 0.0) {
                    return Err(usage("gravity.g must be positive"));
                }
            }
            Physics::Lindblad(p) => {
                finite_nonzero("omega", p.omega)?;
                finite_nonnegative("lambda", p.lambda)?;
                if p.method == Method::ClosedForm && (p.dissipator_a.is_some() || p.dissipator_b.is_some()) {
                    return Err(usage("closed_form method only covers the default dephasing dissipator"));
                }
                if p.method == Method::ClosedForm && p.local_fields.is_some() {
                    return Err(usage("closed_form method does not include local fields"));
                }
            }
            Physics::LindbladTdep(p) => {
                finite_nonzero("omega", p.omega)?;
                finite_nonnegative("lambda_tilde", p.lambda_tilde)?;
                if p.method == Method::Exponential {
                    return Err(usage("lindblad_tdep needs method stepped or closed_form"));
                }
            }
            Physics::Compare(p) => {
                finite_nonzero("omega", p.omega)?;
                if p.n_env == 0 {
                    return Err(usage("n_env must be at least 1"));
                }
                finite_nonnegative("coupling_scale", p.coupling_scale)?;
                if let Some(l) = p.lambda {
                    finite_nonnegative("lambda", l)?;
                }
                if let Some(l) = p.lambda_tilde {
                    finite_nonnegative("lambda_tilde", l)?;
                }
            }
            Physics::ThresholdScan(p) => {
                finite_nonzero("omega", p.omega)?;
                let (lo, hi) = p.ratio_range;
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                    return Err(usage(format!("ratio_range ({lo}, {hi}) must satisfy 0 ≤ lo < hi")));
                }
                if !(p.resolution.is_finite() && p.resolution > 0.0) {
                    return Err(usage("resolution must be positive"));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(usage("sweep values must be finite"));
            }
            let ok = matches!(
                (sweep.kind, self.scenario),
                (SweepKind::LambdaRatio, ScenarioKind::Lindblad)
                    | (SweepKind::GravitationalN, ScenarioKind::MicroGravitational)
                    | (SweepKind::CouplingScale, ScenarioKind::MicroRandom | ScenarioKind::Compare)
            );
            if !ok {
                return Err(usage(format!(
                    "sweep kind {} cannot be applied to scenario {}",
                    sweep.kind.name(),
                    self.scenario.name()
                )));
            }
        }
        Ok(())
    }

    /// Output file stem; the scenario name unless configured.
    pub fn stem(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.scenario.name().to_string())
    }

    /// (name, value) pairs of every physics parameter, sorted by name.
    pub fn parameters(&self) -> Vec<(String, String)> {
        let value = match &self.physics {
            Physics::Isolated(p) => serde_json::to_value(p),
            Physics::MicroRandom(p) => serde_json::to_value(p),
            Physics::MicroGravitational(p) => serde_json::to_value(p),
            Physics::Lindblad(p) => serde_json::to_value(p),
            Physics::LindbladTdep(p) => serde_json::to_value(p),
            Physics::Compare(p) => serde_json::to_value(p),
            Physics::ThresholdScan(p) => serde_json::to_value(p),
        }
        .expect("parameter structs serialize");
        let mut out = Vec::new();
        flatten("", &value, &mut out);
        out
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

impl GridSpec {
    fn check(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(usage(format!("grid.t_max must be positive, got {}", self.t_max)));
        }
        if let Some(points) = self.points {
            if points < 2 {
                return Err(usage("grid.points must be at least 2"));
            }
        }
        match (self.spacing, self.t_min) {
            (Spacing::Log, None) => Err(usage("log grids need grid.t_min")),
            (Spacing::Log, Some(t)) if !(t > 0.0 && t < self.t_max) => {
                Err(usage("log grids need 0 < t_min < t_max"))
            }
            (Spacing::Linear, Some(t)) if !(t >= 0.0 && t < self.t_max) => {
                Err(usage("linear grids need 0 ≤ t_min < t_max"))
            }
            _ => Ok(()),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Linear => {
                let n = self.points.unwrap_or(DEFAULT_LINEAR_POINTS);
                linear_grid(self.t_min.unwrap_or(0.0), self.t_max, n)
            }
            Spacing::Log => {
                let lo = self.t_min.expect("checked");
                let decades = (self.t_max / lo).log10();
                let n = self.points.unwrap_or(((decades * DEFAULT_LOG_POINTS_PER_DECADE as f64).round() as usize + 1).max(2));
                log_grid(lo, self.t_max, n)
            }
        }
    }

    pub fn describe(&self) -> String {
        let t = self.times();
        let spacing = match self.spacing {
            Spacing::Linear => "linear",
            Spacing::Log => "log",
        };
        format!("{spacing} {} points on [{}, {}]", t.len(), t[0], t[t.len() - 1])
    }
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = hi / lo;
    (0..n).map(|i| if i + 1 == n { hi } else { lo * ratio.powf(i as f64 / (n - 1) as f64) }).collect()
}

/// Default trajectory grid: 200 linear points on [0, 3/scale].
pub fn default_trajectory_grid(scale: f64) -> GridSpec {
    GridSpec { t_min: None, t_max: 3.0 / scale, points: None, spacing: Spacing::Linear }
}

/// Default fit grid: 25 log points per decade on [1e-4, 1e-2]/scale.
pub fn default_fit_grid(scale: f64) -> GridSpec {
    GridSpec { t_min: Some(1e-4 / scale), t_max: 1e-2 / scale, points: None, spacing: Spacing::Log }
}
