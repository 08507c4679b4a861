use super::family::{check_state, StateFamily};
use super::matrix::trace_product;
use super::povm::{born_probability, validate_povm, Povm};
use super::sld::{cqfi, qfi};
use crate::error::{Error, Result};
use crate::grid::ParameterGrid;
use crate::model::{ConditionalModel, Outcome, OutcomeSpace, SensitivitySource};

const ZERO_PROBABILITY: f64 = 1e-12;

/// Born-rule conditional model `p(x|θ) = Tr(Πx ρθ)` whose sensitivity is the
/// conditional QFI.
pub struct QuantumConditionalModel<F> {
    family: F,
    povm: Povm,
    space: OutcomeSpace,
    zero_probability_nodes: Vec<(usize, f64)>,
}

impl<F: StateFamily> QuantumConditionalModel<F> {
    /// Validates the POVM and the family's states at every grid node, and
    /// records `(outcome, θ)` nodes where an outcome has vanishing probability.
    pub fn new(family: F, povm: Povm, grid: &ParameterGrid) -> Result<Self> {
        validate_povm(&povm).map_err(Error::InvalidPovm)?;
        if family.dim() != povm.dim() {
            return Err(Error::DimensionMismatch(family.dim(), povm.dim()));
        }
        let space = OutcomeSpace::discrete(povm.labels().iter().cloned())?;
        let mut zero_probability_nodes = Vec::new();
        for &t in grid.nodes() {
            let rho = family.rho(t)?;
            check_state(&rho)?;
            for (k, element) in povm.elements().iter().enumerate() {
                if born_probability(&rho, element)? <= ZERO_PROBABILITY {
                    zero_probability_nodes.push((k, t));
                }
            }
        }
        if !zero_probability_nodes.is_empty() {
            log::warn!(
                "{} (outcome, theta) grid node(s) have zero probability and are excluded from bound integrals",
                zero_probability_nodes.len()
            );
        }
        Ok(Self {
            family,
            povm,
            space,
            zero_probability_nodes,
        })
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// `(outcome index, θ)` grid nodes found with zero probability.
    pub fn zero_probability_nodes(&self) -> &[(usize, f64)] {
        &self.zero_probability_nodes
    }

    pub fn cqfi(&self, x_index: usize, theta: f64) -> Result<f64> {
        cqfi(&self.family, &self.povm, x_index, theta)
    }

    pub fn qfi(&self, theta: f64) -> Result<f64> {
        qfi(&self.family, theta)
    }

    fn element_index(&self, x: Outcome) -> Option<usize> {
        match x {
            Outcome::Index(k) if k < self.povm.len() => Some(k),
            _ => None,
        }
    }
}

impl<F: StateFamily> ConditionalModel for QuantumConditionalModel<F> {
    fn outcome_space(&self) -> &OutcomeSpace {
        &self.space
    }

    fn log_pdf(&self, x: Outcome, theta: f64) -> f64 {
        self.pdf(x, theta).ln()
    }

    fn pdf(&self, x: Outcome, theta: f64) -> f64 {
        let Some(k) = self.element_index(x) else {
            return f64::NAN;
        };
        self.family
            .rho(theta)
            .and_then(|rho| born_probability(&rho, &self.povm.elements()[k]))
            .unwrap_or(f64::NAN)
    }

    fn pdf_derivative(&self, x: Outcome, theta: f64) -> f64 {
        let Some(k) = self.element_index(x) else {
            return f64::NAN;
        };
        match self.family.drho(theta) {
            Ok(d) => trace_product(self.povm.elements()[k].matrix(), d.matrix()).re,
            Err(_) => f64::NAN,
        }
    }

    fn score(&self, x: Outcome, theta: f64) -> f64 {
        self.pdf_derivative(x, theta) / self.pdf(x, theta)
    }

    fn sensitivity_source(&self) -> Option<&dyn SensitivitySource> {
        Some(self)
    }
}

impl<F: StateFamily> SensitivitySource for QuantumConditionalModel<F> {
    fn sensitivity(&self, x: Outcome, theta: f64) -> Result<f64> {
        let k = self
            .element_index(x)
            .ok_or_else(|| Error::UnknownOutcome(x.to_string()))?;
        self.cqfi(k, theta)
    }
}
