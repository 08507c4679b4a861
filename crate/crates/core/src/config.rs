//! Run configuration: a versioned TOML document naming a scenario, a prior,
//! a bound and the sweep to evaluate.
//!
//! ```toml
//! schema_version = 1
//! scenario = "langevin"
//!
//! [langevin]
//! diffusion = 1.0
//!
//! [prior]
//! kind = "uniform"
//! min = 0.5
//! max = 1.5
//!
//! [bound]
//! kind = "theorem1"
//!
//! [sweep]
//! x = { min = -4.0, max = 4.0, n = 50 }
//! theta = { n = 50 }
//! tolerance = 1e-6
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundKind, DEFAULT_TOLERANCE};
use crate::grid::{ParameterGrid, DEFAULT_GRID_POINTS};
use crate::model::{ConditionalModel, Outcome, SoftmaxModel};
use crate::prior::Prior;
use crate::quantum::{HermitianMatrix, Povm, QuantumConditionalModel, QubitPhaseFamily, C64};
use crate::scenarios::{LangevinModel, QubitPhaseScenario, GAUSSIAN_STIFFNESS_FLOOR};
use crate::weight::WeightFunction;

pub const SCHEMA_VERSION: u32 = 1;

/// Upper limit on grid sizes accepted from configuration files.
pub const MAX_GRID_POINTS: usize = 200_001;

/// Upper limit on sweep sample counts per axis.
pub const MAX_SWEEP_SAMPLES: usize = 100_000;

/// A configuration problem, located by a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Langevin,
    QubitPhase,
    CustomDiscrete,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Langevin => "langevin",
            ScenarioKind::QubitPhase => "qubit_phase",
            ScenarioKind::CustomDiscrete => "custom_discrete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub langevin: Option<LangevinSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit_phase: Option<QubitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_discrete: Option<CustomDiscreteSection>,
    pub prior: PriorSection,
    pub bound: BoundSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangevinSection {
    #[serde(default = "one")]
    pub diffusion: f64,
}

impl Default for LangevinSection {
    fn default() -> Self {
        Self { diffusion: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PovmSpec {
    #[default]
    SigmaX,
    SigmaY,
    SigmaZ,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSection {
    #[serde(default)]
    pub povm: PovmSpec,
    /// Elements for `povm = "custom"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub povm_elements: Vec<PovmElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmElementSpec {
    pub label: String,
    /// Real parts, row-major rows.
    pub re: Vec<Vec<f64>>,
    /// Imaginary parts; zero when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomDiscreteSection {
    pub outcomes: Vec<DiscreteOutcomeSpec>,
}

/// Softmax outcome with polynomial logit `Σ_j logits[j] θ^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteOutcomeSpec {
    pub label: String,
    pub logits: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorSection {
    Uniform {
        min: f64,
        max: f64,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    Gaussian {
        mean: f64,
        sd: f64,
        /// Lower cut; Langevin stiffness priors default to a small positive floor.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lower_limit: Option<f64>,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    Gamma {
        shape: f64,
        scale: f64,
        #[serde(default = "default_grid")]
        grid: usize,
    },
}

impl PriorSection {
    pub fn name(&self) -> &'static str {
        match self {
            PriorSection::Uniform { .. } => "uniform",
            PriorSection::Gaussian { .. } => "gaussian",
            PriorSection::Gamma { .. } => "gamma",
        }
    }

    pub fn grid(&self) -> usize {
        match *self {
            PriorSection::Uniform { grid, .. }
            | PriorSection::Gaussian { grid, .. }
            | PriorSection::Gamma { grid, .. } => grid,
        }
    }

    pub fn set_grid(&mut self, n: usize) {
        match self {
            PriorSection::Uniform { grid, .. }
            | PriorSection::Gaussian { grid, .. }
            | PriorSection::Gamma { grid, .. } => *grid = n,
        }
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(self, PriorSection::Uniform { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundSection {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem3Prior,
    /// Gaussian-bump weight `exp(−(θ − center)² / 2 width²)`.
    General {
        center: f64,
        width: f64,
    },
    /// Ensemble chain only: the pointwise average uses the finite-support
    /// bound when the prior has finite support, the prior-matched one otherwise.
    MiAverage,
}

impl BoundSection {
    pub fn name(&self) -> &'static str {
        match self {
            BoundSection::Theorem1 => "theorem1",
            BoundSection::Theorem2 => "theorem2",
            BoundSection::Theorem3 => "theorem3",
            BoundSection::Theorem3Prior => "theorem3_prior",
            BoundSection::General { .. } => "general",
            BoundSection::MiAverage => "mi_average",
        }
    }

    fn is_quantum(&self) -> bool {
        matches!(self, BoundSection::Theorem3 | BoundSection::Theorem3Prior)
    }

    fn requires_finite_support(&self) -> bool {
        matches!(self, BoundSection::Theorem1 | BoundSection::Theorem3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Outcome samples for continuous scenarios; defaults to `[-4, 4]`, 50 points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<RangeSpec>,
    /// Outcome labels for discrete scenarios; defaults to all outcomes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<String>>,
    /// Parameter samples; the range defaults to the prior's grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<RangeSpec>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            x: None,
            outcomes: None,
            theta: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: OutputFormat,
    /// Report destination; standard output when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_grid() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

const DEFAULT_X_RANGE: (f64, f64) = (-4.0, 4.0);
const DEFAULT_SAMPLES: usize = 50;

impl ScenarioConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::parse(text).map_err(|e| ConfigError::new("", e.to_string().trim_end()))?;
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner().to_string().trim_end())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks cross-field constraints.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!(
                    "unsupported schema version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        let grid = self.prior.grid();
        if !(3..=MAX_GRID_POINTS).contains(&grid) {
            return Err(ConfigError::new(
                "prior.grid",
                format!("grid must have between 3 and {MAX_GRID_POINTS} nodes, got {grid}"),
            ));
        }
        if self.bound.requires_finite_support() && !self.prior.is_finite_support() {
            return Err(ConfigError::new(
                "bound.kind",
                format!(
                    "{} requires a finite-support prior, but prior kind {} has infinite support",
                    self.bound.name(),
                    self.prior.name()
                ),
            ));
        }
        if self.bound.is_quantum() && self.scenario != ScenarioKind::QubitPhase {
            return Err(ConfigError::new(
                "bound.kind",
                format!(
                    "{} requires a quantum scenario (qubit_phase), got {}",
                    self.bound.name(),
                    self.scenario.name()
                ),
            ));
        }
        let t = self.sweep.tolerance;
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError::new(
                "sweep.tolerance",
                format!("tolerance must be positive, got {t}"),
            ));
        }
        let present = [
            ("langevin", self.langevin.is_some(), ScenarioKind::Langevin),
            ("qubit_phase", self.qubit_phase.is_some(), ScenarioKind::QubitPhase),
            (
                "custom_discrete",
                self.custom_discrete.is_some(),
                ScenarioKind::CustomDiscrete,
            ),
        ];
        for (name, is_present, kind) in present {
            if is_present && kind != self.scenario {
                return Err(ConfigError::new(
                    name,
                    format!("section does not apply to scenario {}", self.scenario.name()),
                ));
            }
        }
        match self.scenario {
            ScenarioKind::Langevin => {
                if self.sweep.outcomes.is_some() {
                    return Err(ConfigError::new(
                        "sweep.outcomes",
                        "continuous scenario takes sweep.x, not labels",
                    ));
                }
            }
            ScenarioKind::QubitPhase | ScenarioKind::CustomDiscrete => {
                if self.sweep.x.is_some() {
                    return Err(ConfigError::new(
                        "sweep.x",
                        "discrete scenario takes sweep.outcomes, not a range",
                    ));
                }
            }
        }
        if self.scenario == ScenarioKind::CustomDiscrete && self.custom_discrete.is_none() {
            return Err(ConfigError::new(
                "custom_discrete",
                "missing section for scenario custom_discrete",
            ));
        }
        if self.scenario == ScenarioKind::QubitPhase && !matches!(self.prior, PriorSection::Uniform { .. }) {
            return Err(ConfigError::new(
                "prior.kind",
                "qubit_phase takes a uniform prior on a sub-interval of [0, pi/2]",
            ));
        }
        for (name, spec) in [("sweep.x", self.sweep.x), ("sweep.theta", self.sweep.theta)] {
            if let Some(r) = spec {
                if r.n == 0 || r.n > MAX_SWEEP_SAMPLES {
                    return Err(ConfigError::new(
                        format!("{name}.n"),
                        format!("need 1 to {MAX_SWEEP_SAMPLES} samples, got {}", r.n),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Builds the model, prior, bound and samples the configuration describes.
    pub fn resolve(&self) -> Result<ResolvedRun, ConfigError> {
        self.validate()?;
        let prior = self.build_prior()?;
        let model = self.build_model(&prior)?;
        let quantum = model.as_model().sensitivity_source().is_some();
        let chain_kind = match &self.bound {
            BoundSection::Theorem1 => BoundKind::Theorem1,
            BoundSection::Theorem2 => BoundKind::Theorem2,
            BoundSection::Theorem3 => BoundKind::Theorem3,
            BoundSection::Theorem3Prior => BoundKind::Theorem3Prior,
            BoundSection::General { center, width } => BoundKind::General(
                WeightFunction::gaussian(prior.grid(), *center, *width)
                    .map_err(|e| ConfigError::new("bound", e.to_string()))?,
            ),
            BoundSection::MiAverage => match (prior.is_finite_support(), quantum) {
                (true, false) => BoundKind::Theorem1,
                (true, true) => BoundKind::Theorem3,
                (false, false) => BoundKind::Theorem2,
                (false, true) => BoundKind::Theorem3Prior,
            },
        };
        let sweep_kind = match self.bound {
            BoundSection::MiAverage => None,
            _ => Some(chain_kind.clone()),
        };
        let x_samples = self.x_samples(&model)?;
        let theta_samples = self.theta_samples(&prior)?;
        Ok(ResolvedRun {
            scenario: self.scenario,
            bound_name: self.bound.name(),
            model,
            prior,
            sweep_kind,
            chain_kind,
            x_samples,
            theta_samples,
            tolerance: self.sweep.tolerance,
        })
    }

    fn build_prior(&self) -> Result<Prior, ConfigError> {
        let err = |e: crate::Error| ConfigError::new("prior", e.to_string());
        match self.prior {
            PriorSection::Uniform { min, max, grid } => {
                if self.scenario == ScenarioKind::Langevin && !(min > 0.0) {
                    return Err(ConfigError::new("prior.min", "trap stiffness must be positive"));
                }
                Prior::uniform(min, max, grid).map_err(err)
            }
            PriorSection::Gaussian {
                mean,
                sd,
                lower_limit,
                grid,
            } => {
                let limit = match (self.scenario, lower_limit) {
                    (ScenarioKind::Langevin, None) => Some(GAUSSIAN_STIFFNESS_FLOOR),
                    (ScenarioKind::Langevin, Some(l)) if !(l > 0.0) => {
                        return Err(ConfigError::new("prior.lower_limit", "trap stiffness must be positive"));
                    }
                    (_, l) => l,
                };
                Prior::gaussian(mean, sd, grid, limit).map_err(err)
            }
            PriorSection::Gamma { shape, scale, grid } => Prior::gamma(shape, scale, grid).map_err(err),
        }
    }

    fn build_model(&self, prior: &Prior) -> Result<RunModel, ConfigError> {
        match self.scenario {
            ScenarioKind::Langevin => {
                let section = self.langevin.clone().unwrap_or_default();
                LangevinModel::new(section.diffusion, prior.grid().min())
                    .map(RunModel::Langevin)
                    .map_err(|e| ConfigError::new("langevin.diffusion", e.to_string()))
            }
            ScenarioKind::QubitPhase => {
                let section = self.qubit_phase.clone().unwrap_or_default();
                let povm = build_povm(&section)?;
                let scenario = QubitPhaseScenario {
                    theta_min: prior.grid().min(),
                    theta_max: prior.grid().max(),
                    povm,
                    grid_points: prior.grid().len(),
                };
                scenario
                    .build()
                    .map(|(model, _)| RunModel::Qubit(model))
                    .map_err(|e| ConfigError::new("qubit_phase", e.to_string()))
            }
            ScenarioKind::CustomDiscrete => {
                let section = self.custom_discrete.as_ref().expect("validated");
                SoftmaxModel::new(section.outcomes.iter().map(|o| (o.label.clone(), o.logits.clone())))
                    .map(RunModel::Discrete)
                    .map_err(|e| ConfigError::new("custom_discrete.outcomes", e.to_string()))
            }
        }
    }

    fn x_samples(&self, model: &RunModel) -> Result<Vec<Outcome>, ConfigError> {
        let space = model.as_model().outcome_space();
        if space.is_discrete() {
            return match &self.sweep.outcomes {
                None => Ok(space.outcomes()),
                Some(labels) => labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| {
                        space.index_of(l).ok_or_else(|| {
                            ConfigError::new(format!("sweep.outcomes[{i}]"), format!("unknown outcome {l:?}"))
                        })
                    })
                    .collect(),
            };
        }
        let spec = self.sweep.x.unwrap_or(RangeSpec {
            min: None,
            max: None,
            n: DEFAULT_SAMPLES,
        });
        let min = spec.min.unwrap_or(DEFAULT_X_RANGE.0);
        let max = spec.max.unwrap_or(DEFAULT_X_RANGE.1);
        samples(min, max, spec.n, "sweep.x").map(|v| v.into_iter().map(Outcome::Value).collect())
    }

    fn theta_samples(&self, prior: &Prior) -> Result<Vec<f64>, ConfigError> {
        let spec = self.sweep.theta.unwrap_or(RangeSpec {
            min: None,
            max: None,
            n: DEFAULT_SAMPLES,
        });
        let min = spec.min.unwrap_or(prior.grid().min());
        let max = spec.max.unwrap_or(prior.grid().max());
        samples(min, max, spec.n, "sweep.theta")
    }
}

fn samples(min: f64, max: f64, n: usize, path: &str) -> Result<Vec<f64>, ConfigError> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(ConfigError::new(path, "range bounds must be finite"));
    }
    match n {
        1 => Ok(vec![min]),
        _ => ParameterGrid::new(min, max, n)
            .map(|g| g.nodes().to_vec())
            .map_err(|e| ConfigError::new(path, e.to_string())),
    }
}

fn build_povm(section: &QubitSection) -> Result<Povm, ConfigError> {
    if section.povm != PovmSpec::Custom && !section.povm_elements.is_empty() {
        return Err(ConfigError::new(
            "qubit_phase.povm_elements",
            "elements are only read for povm = \"custom\"",
        ));
    }
    match section.povm {
        PovmSpec::SigmaX => Ok(Povm::sigma_x()),
        PovmSpec::SigmaY => Ok(Povm::sigma_y()),
        PovmSpec::SigmaZ => Ok(Povm::sigma_z()),
        PovmSpec::Custom => {
            if section.povm_elements.is_empty() {
                return Err(ConfigError::new(
                    "qubit_phase.povm_elements",
                    "custom POVM needs elements",
                ));
            }
            let mut elements = Vec::new();
            for (i, spec) in section.povm_elements.iter().enumerate() {
                let path = format!("qubit_phase.povm_elements[{i}]");
                elements.push(element_matrix(spec).map_err(|m| ConfigError::new(&path, m))?);
            }
            let labels = section.povm_elements.iter().map(|e| e.label.clone());
            Povm::new(labels, elements).map_err(|e| ConfigError::new("qubit_phase.povm_elements", e.to_string()))
        }
    }
}

fn element_matrix(spec: &PovmElementSpec) -> Result<HermitianMatrix, String> {
    let dim = spec.re.len();
    let zeros = vec![vec![0.0; dim]; dim];
    let im = spec.im.as_ref().unwrap_or(&zeros);
    if im.len() != dim || spec.re.iter().chain(im).any(|row| row.len() != dim) {
        return Err(format!("re and im must both be {dim}x{dim}"));
    }
    let entries: Vec<C64> = spec
        .re
        .iter()
        .flatten()
        .zip(im.iter().flatten())
        .map(|(&r, &i)| C64::new(r, i))
        .collect();
    HermitianMatrix::from_rows(dim, &entries).map_err(|e| e.to_string())
}

/// A runnable model built from configuration.
pub enum RunModel {
    Langevin(LangevinModel),
    Qubit(QuantumConditionalModel<QubitPhaseFamily>),
    Discrete(SoftmaxModel),
}

impl RunModel {
    pub fn as_model(&self) -> &dyn ConditionalModel {
        match self {
            RunModel::Langevin(m) => m,
            RunModel::Qubit(m) => m,
            RunModel::Discrete(m) => m,
        }
    }
}

/// Everything a `verify` or `mi-chain` run needs.
pub struct ResolvedRun {
    pub scenario: ScenarioKind,
    pub bound_name: &'static str,
    pub model: RunModel,
    pub prior: Prior,
    /// `None` for chain-only bounds.
    pub sweep_kind: Option<BoundKind>,
    pub chain_kind: BoundKind,
    pub x_samples: Vec<Outcome>,
    pub theta_samples: Vec<f64>,
    pub tolerance: f64,
}

/// Built-in scenarios with a one-line description, for `scenario list`.
pub fn builtin_scenarios() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "langevin",
            "overdamped particle in a harmonic trap; theta is the stiffness, x the stationary position",
        ),
        (
            "qubit_phase",
            "phase imprinted on |+> by exp(-i theta sigma_z / 2), theta in [0, pi/2]",
        ),
        ("custom_discrete", "finite outcome model with polynomial softmax logits"),
    ]
}
