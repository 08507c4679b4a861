//! Worked systems: an overdamped particle in a harmonic trap of unknown
//! stiffness, phase estimation on a qubit, and a work-extraction checker for
//! a measurement-and-feedback demon.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::bounds::{evaluate_bound, BoundKind};
use crate::error::{Error, Result};
use crate::grid::{ParameterGrid, DEFAULT_GRID_POINTS};
use crate::model::{ConditionalModel, Outcome, OutcomeSpace};
use crate::prior::Prior;
use crate::quantum::{validate_povm, Povm, QuantumConditionalModel, QubitPhaseFamily};

/// Smallest stiffness the default Langevin outcome grid is sized for.
pub const LANGEVIN_THETA_MIN: f64 = 0.5;

/// Outcome-grid nodes for Langevin marginals and Fisher information.
pub const LANGEVIN_X_NODES: usize = 4001;

/// Positivity cut applied to Gaussian stiffness priors.
pub const GAUSSIAN_STIFFNESS_FLOOR: f64 = 1e-3;

/// Stationary position of an overdamped particle in a trap of stiffness `θ`
/// with diffusion `D`: `x ~ N(0, D/θ)`.
#[derive(Debug, Clone)]
pub struct LangevinModel {
    diffusion: f64,
    space: OutcomeSpace,
}

/// Langevin model whose outcome grid covers stiffnesses down to
/// [`LANGEVIN_THETA_MIN`].
pub fn langevin_model(diffusion: f64) -> Result<LangevinModel> {
    LangevinModel::new(diffusion, LANGEVIN_THETA_MIN)
}

impl LangevinModel {
    /// The outcome grid spans `±8 √(D/θ_min)` with [`LANGEVIN_X_NODES`] nodes.
    pub fn new(diffusion: f64, theta_min: f64) -> Result<Self> {
        if !(diffusion > 0.0 && diffusion.is_finite()) {
            return Err(Error::NonPositiveDiffusion(diffusion));
        }
        if !(theta_min > 0.0 && theta_min.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "stiffness must be positive, got {theta_min}"
            )));
        }
        let width = 8.0 * (diffusion / theta_min).sqrt();
        Ok(Self {
            diffusion,
            space: OutcomeSpace::continuous(-width, width, LANGEVIN_X_NODES)?,
        })
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }
}

impl ConditionalModel for LangevinModel {
    fn outcome_space(&self) -> &OutcomeSpace {
        &self.space
    }

    fn log_pdf(&self, x: Outcome, theta: f64) -> f64 {
        let Outcome::Value(x) = x else { return f64::NAN };
        if !(theta > 0.0) {
            return f64::NAN;
        }
        let d = self.diffusion;
        0.5 * (theta / (2.0 * PI * d)).ln() - theta * x * x / (2.0 * d)
    }

    fn score(&self, x: Outcome, theta: f64) -> f64 {
        let Outcome::Value(x) = x else { return f64::NAN };
        1.0 / (2.0 * theta) - x * x / (2.0 * self.diffusion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LangevinPrior {
    Uniform {
        a: f64,
        b: f64,
    },
    /// Cut at [`GAUSSIAN_STIFFNESS_FLOOR`] from below.
    Gaussian {
        mean: f64,
        sd: f64,
    },
    Gamma {
        shape: f64,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LangevinScenario {
    pub diffusion: f64,
    pub prior: LangevinPrior,
    pub grid_points: usize,
}

impl Default for LangevinScenario {
    fn default() -> Self {
        Self {
            diffusion: 1.0,
            prior: LangevinPrior::Uniform { a: 0.5, b: 1.5 },
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl LangevinScenario {
    pub fn gaussian_default() -> Self {
        Self {
            prior: LangevinPrior::Gaussian { mean: 1.0, sd: 0.2 },
            ..Self::default()
        }
    }

    pub fn gamma_default() -> Self {
        Self {
            prior: LangevinPrior::Gamma { shape: 3.0, scale: 0.5 },
            ..Self::default()
        }
    }

    pub fn prior(&self) -> Result<Prior> {
        let n = self.grid_points;
        match self.prior {
            LangevinPrior::Uniform { a, b } => {
                if !(a > 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "stiffness prior must lie in theta > 0, got [{a}, {b}]"
                    )));
                }
                Prior::uniform(a, b, n)
            }
            LangevinPrior::Gaussian { mean, sd } => Prior::gaussian(mean, sd, n, Some(GAUSSIAN_STIFFNESS_FLOOR)),
            LangevinPrior::Gamma { shape, scale } => Prior::gamma(shape, scale, n),
        }
    }

    /// The model (outcome grid sized for the prior's smallest stiffness) and
    /// the prior.
    pub fn build(&self) -> Result<(LangevinModel, Prior)> {
        let prior = self.prior()?;
        let model = LangevinModel::new(self.diffusion, prior.grid().min())?;
        Ok((model, prior))
    }
}

/// State family and validated POVM for qubit phase estimation.
pub fn qubit_phase_scenario(povm: Povm) -> Result<(QubitPhaseFamily, Povm)> {
    validate_povm(&povm).map_err(Error::InvalidPovm)?;
    if povm.dim() != 2 {
        return Err(Error::DimensionMismatch(2, povm.dim()));
    }
    Ok((QubitPhaseFamily, povm))
}

/// Phase `θ` on a sub-interval of `[0, π/2]` with a uniform prior.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPhaseScenario {
    pub theta_min: f64,
    pub theta_max: f64,
    pub povm: Povm,
    pub grid_points: usize,
}

impl Default for QubitPhaseScenario {
    fn default() -> Self {
        Self {
            theta_min: 0.0,
            theta_max: FRAC_PI_2,
            povm: Povm::sigma_x(),
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl QubitPhaseScenario {
    pub fn build(&self) -> Result<(QuantumConditionalModel<QubitPhaseFamily>, Prior)> {
        if !(self.theta_min >= 0.0 && self.theta_max <= FRAC_PI_2 && self.theta_min < self.theta_max) {
            return Err(Error::InvalidScenario(format!(
                "phase range [{}, {}] must lie within [0, pi/2]",
                self.theta_min, self.theta_max
            )));
        }
        let (family, povm) = qubit_phase_scenario(self.povm.clone())?;
        let prior = Prior::uniform(self.theta_min, self.theta_max, self.grid_points)?;
        let model = QuantumConditionalModel::new(family, povm, prior.grid())?;
        Ok((model, prior))
    }
}

/// One run of a feedback demon: measured outcome `x` of a system prepared at
/// `theta`, with the work it extracted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemonRecord {
    pub beta: f64,
    pub work_extracted: f64,
    pub delta_f: f64,
    pub x: Outcome,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemonCheck {
    /// `β (W_ext − ΔF)`.
    pub lhs: f64,
    pub pmi: f64,
    pub bound: f64,
    /// `lhs ≤ pmi + 1e-9`.
    pub sagawa_ueda_ok: bool,
    /// `lhs ≤ bound + 1e-9`.
    pub chained_ok: bool,
}

const DEMON_TOLERANCE: f64 = 1e-9;

/// Checks a supplied record against the trajectory-level second law
/// `β(W − ΔF) ≤ i(x,θ)` and against the finite-support PMI bound (quantum
/// when the model supplies a conditional QFI).
pub fn demon_work_check<M: ConditionalModel + ?Sized>(
    record: &DemonRecord,
    model: &M,
    prior: &Prior,
) -> Result<DemonCheck> {
    if !(record.beta > 0.0 && record.beta.is_finite()) {
        return Err(Error::InvalidRecord(format!(
            "beta must be positive, got {}",
            record.beta
        )));
    }
    if !(record.work_extracted.is_finite() && record.delta_f.is_finite()) {
        return Err(Error::InvalidRecord("work and free energy must be finite".into()));
    }
    let kind = if model.sensitivity_source().is_some() {
        BoundKind::Theorem3
    } else {
        BoundKind::Theorem1
    };
    let report = evaluate_bound(model, prior, &kind, record.x, record.theta)?;
    let lhs = record.beta * (record.work_extracted - record.delta_f);
    Ok(DemonCheck {
        lhs,
        pmi: report.pmi,
        bound: report.bound,
        sagawa_ueda_ok: lhs <= report.pmi + DEMON_TOLERANCE,
        chained_ok: lhs <= report.bound + DEMON_TOLERANCE,
    })
}

/// θ-grid helper: `n` evenly spaced samples on `[min, max]`.
pub fn linspace(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    Ok(ParameterGrid::new(min, max, n)?.nodes().to_vec())
}
