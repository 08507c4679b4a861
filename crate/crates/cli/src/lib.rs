//! Runs `verify` and `mi-chain` from a scenario configuration.
//!
//! Exit statuses: 0 when every bound holds, 1 on a violation, 2 when the
//! run cannot be carried out (bad configuration, unreadable input, unwritable
//! output, numerical failure).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use log::info;
use pmibound::bounds::{mi_chain, verify_bound_sweep, MiChain};
use pmibound::config::{ConfigError, OutputFormat, ScenarioConfig};
use pmibound::report::{ChainReport, SweepReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Violation = 1,
    Fatal = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot write report to {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Compute(#[from] pmibound::Error),
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub tolerance: Option<f64>,
    pub grid: Option<usize>,
}

/// Reads a configuration, applies overrides and re-validates.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = ScenarioConfig::from_toml(&text)?;
    if let Some(p) = &overrides.output {
        config.output.path = Some(p.clone());
    }
    if let Some(f) = overrides.format {
        config.output.format = f;
    }
    if let Some(t) = overrides.tolerance {
        config.sweep.tolerance = t;
    }
    if let Some(n) = overrides.grid {
        config.prior.set_grid(n);
    }
    config.validate()?;
    Ok(config)
}

/// Outcome of a run: the status and a one-line summary for the terminal.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: Status,
    pub summary: String,
}

/// Sweeps the configured bound over every `(x, θ)` sample and writes the
/// per-point report.
pub fn run_verify(config: &ScenarioConfig) -> Result<RunResult, CliError> {
    let run = config.resolve()?;
    let kind = run
        .sweep_kind
        .as_ref()
        .ok_or_else(|| ConfigError::new("bound.kind", "mi_average is an ensemble bound; run it with mi-chain"))?;
    let model = run.model.as_model();
    let sweep = verify_bound_sweep(
        model,
        &run.prior,
        kind,
        &run.x_samples,
        &run.theta_samples,
        run.tolerance,
    )?;
    let report = SweepReport::new(run.scenario.name(), run.bound_name, &sweep, model.outcome_space());
    let body = match config.output.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    emit(config.output.path.as_deref(), &body)?;
    let s = &sweep.summary;
    info!("{} evaluations, {} skipped", s.n_evaluations, s.skipped);
    Ok(RunResult {
        status: if s.violations == 0 {
            Status::Ok
        } else {
            Status::Violation
        },
        summary: format!(
            "{} {}: n_points={} skipped={} violations={} min_slack={}",
            run.scenario.name(),
            run.bound_name,
            s.n_points,
            s.skipped,
            s.violations,
            s.min_slack
        ),
    })
}

/// Computes MI, the averaged pointwise bound and the ensemble bound, and
/// checks their order.
pub fn run_mi_chain(config: &ScenarioConfig) -> Result<RunResult, CliError> {
    let run = config.resolve()?;
    let chain = mi_chain(run.model.as_model(), &run.prior, &run.chain_kind, run.tolerance)?;
    report_chain(config, run.scenario.name(), run.chain_kind.name(), &chain)
}

/// Writes a chain report and derives the status from `chain.holds()`.
pub fn report_chain(
    config: &ScenarioConfig,
    scenario: &str,
    bound: &str,
    chain: &MiChain,
) -> Result<RunResult, CliError> {
    let report = ChainReport::new(scenario, bound, chain);
    let body = match config.output.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => report.to_json(),
    };
    emit(config.output.path.as_deref(), &body)?;
    Ok(RunResult {
        status: if report.holds { Status::Ok } else { Status::Violation },
        summary: format!(
            "{scenario} {bound}: mutual_information={} <= averaged_pointwise_bound={} <= mi_bound_average={}: {}",
            chain.mutual_information,
            chain.averaged_pointwise_bound,
            chain.mi_bound_average,
            if report.holds { "holds" } else { "VIOLATED" }
        ),
    })
}

fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// `scenario list` output.
pub fn scenario_list() -> String {
    pmibound::config::builtin_scenarios()
        .iter()
        .map(|(name, description)| format!("{name:<16} {description}\n"))
        .collect()
}
