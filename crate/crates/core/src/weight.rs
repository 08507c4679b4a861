//! Non-negative weight functions `f(θ)` that generate the family of PMI bounds.

use crate::error::{Error, Result};
use crate::grid::ParameterGrid;
use crate::prior::Prior;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `f = 1` on the grid, zero outside; yields the finite-support bound.
    Boxcar,
    /// `f = p`; yields the surprisal-penalized bound.
    PriorMatched,
    Custom,
}

/// A weight `f(θ)` with derivative `ḟ(θ)`, tabulated on a grid and taken to
/// vanish outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    grid: ParameterGrid,
    values: Vec<f64>,
    derivative: Vec<f64>,
    kind: WeightKind,
}

impl WeightFunction {
    pub fn boxcar(grid: &ParameterGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![1.0; grid.len()],
            derivative: vec![0.0; grid.len()],
            kind: WeightKind::Boxcar,
        }
    }

    pub fn prior_matched(prior: &Prior) -> Self {
        Self {
            grid: prior.grid().clone(),
            values: prior.density().to_vec(),
            derivative: prior.derivative().to_vec(),
            kind: WeightKind::PriorMatched,
        }
    }

    pub fn custom(grid: ParameterGrid, values: Vec<f64>, derivative: Vec<f64>) -> Result<Self> {
        for v in [&values, &derivative] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
        }
        if values.iter().chain(&derivative).any(|v| !v.is_finite()) {
            return Err(Error::InvalidWeight("non-finite entries".into()));
        }
        if values.iter().any(|&f| f < 0.0) {
            return Err(Error::InvalidWeight("negative values".into()));
        }
        Ok(Self {
            grid,
            values,
            derivative,
            kind: WeightKind::Custom,
        })
    }

    /// Unnormalized Gaussian bump `exp(-(θ - center)² / 2 width²)`.
    pub fn gaussian(grid: &ParameterGrid, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "need finite center and width > 0, got ({center}, {width})"
            )));
        }
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|t| (-(t - center).powi(2) / (2.0 * width * width)).exp())
            .collect();
        let derivative = grid
            .nodes()
            .iter()
            .zip(&values)
            .map(|(t, f)| -f * (t - center) / (width * width))
            .collect();
        Self::custom(grid.clone(), values, derivative)
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn value_at(&self, theta: f64) -> Option<f64> {
        self.grid.interpolate(&self.values, theta)
    }

    /// Checks that the weight lives on the prior's grid and is positive
    /// wherever the prior density is.
    pub fn check_covers(&self, prior: &Prior) -> Result<()> {
        if self.grid != *prior.grid() {
            return Err(Error::InvalidWeight("weight and prior must share a grid".into()));
        }
        if let Some(i) = prior
            .density()
            .iter()
            .zip(&self.values)
            .position(|(&p, &f)| p > 0.0 && f <= 0.0)
        {
            return Err(Error::InvalidWeight(format!(
                "weight vanishes at theta = {} where the prior does not",
                self.grid.nodes()[i]
            )));
        }
        Ok(())
    }
}
