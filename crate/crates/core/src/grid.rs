//! Uniform grids and composite trapezoidal quadrature.
//!
//! Every integral over the parameter (and over continuous outcomes) is a
//! trapezoid sum on a [`ParameterGrid`]. Off-node values are obtained by
//! linear interpolation, which is the interpolant the trapezoid rule
//! integrates exactly.

use crate::error::{Error, Result};

/// Default number of nodes for parameter grids.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// A uniform grid on `[min, max]` with `n >= 3` nodes, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    min: f64,
    max: f64,
    nodes: Vec<f64>,
}

impl ParameterGrid {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!("bounds must be finite, got [{min}, {max}]")));
        }
        if min >= max {
            return Err(Error::InvalidGrid(format!("need min < max, got [{min}, {max}]")));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 nodes, got {n_points}")));
        }
        let h = (max - min) / (n_points - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_points).map(|i| min + i as f64 * h).collect();
        nodes[n_points - 1] = max;
        Ok(Self { min, max, nodes })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; grids hold at least three nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.len() - 1) as f64
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.min && theta <= self.max
    }

    /// The grid on the same interval with twice the resolution (`2n - 1` nodes,
    /// every original node retained).
    pub fn refined(&self) -> Self {
        Self::new(self.min, self.max, 2 * self.len() - 1).expect("refining a valid grid")
    }

    /// Composite trapezoid estimate of the integral of `values` over the grid.
    pub fn quadrature(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("quadrature integrand"));
        }
        Ok(self.trapezoid(values))
    }

    /// Trapezoid sum without validation; used on integrands built internally.
    pub(crate) fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().sum();
        (interior + 0.5 * (values[0] + values[n - 1])) * self.spacing()
    }

    /// Linear interpolation of node values at `theta`; `None` outside the grid.
    pub fn interpolate(&self, values: &[f64], theta: f64) -> Option<f64> {
        if values.len() != self.len() || !self.contains(theta) {
            return None;
        }
        let pos = (theta - self.min) / self.spacing();
        let lo = (pos.floor() as usize).min(self.len() - 2);
        let t = (pos - lo as f64).clamp(0.0, 1.0);
        if t == 0.0 {
            return Some(values[lo]);
        }
        if t == 1.0 {
            return Some(values[lo + 1]);
        }
        Some(values[lo] + t * (values[lo + 1] - values[lo]))
    }
}

/// Composite trapezoid estimate of `integral values d(theta)` over `grid`.
pub fn quadrature(values: &[f64], grid: &ParameterGrid) -> Result<f64> {
    grid.quadrature(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrates_exactly() {
        let grid = ParameterGrid::new(0.0, 1.0, 101).unwrap();
        assert_eq!(quadrature(&vec![1.0; 101], &grid).unwrap(), 1.0);
    }

    #[test]
    fn linear_integrand_is_exact() {
        let grid = ParameterGrid::new(0.0, 1.0, 101).unwrap();
        let v = grid.nodes().to_vec();
        assert!((quadrature(&v, &grid).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sine_matches_antiderivative() {
        let grid = ParameterGrid::new(0.0, PI, 1001).unwrap();
        let v: Vec<f64> = grid.nodes().iter().map(|t| t.sin()).collect();
        // -cos(pi) + cos(0) = 2
        assert!((quadrature(&v, &grid).unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = ParameterGrid::new(0.0, 1.0, 5).unwrap();
        assert!(matches!(
            quadrature(&[1.0; 4], &grid),
            Err(Error::LengthMismatch { expected: 5, got: 4 })
        ));
        assert_eq!(
            quadrature(&[1.0, f64::NAN, 1.0, 1.0, 1.0], &grid),
            Err(Error::NonFinite("quadrature integrand"))
        );
        assert_eq!(
            quadrature(&[1.0, 1.0, f64::INFINITY, 1.0, 1.0], &grid),
            Err(Error::NonFinite("quadrature integrand"))
        );
        assert!(ParameterGrid::new(1.0, 1.0, 5).is_err());
        assert!(ParameterGrid::new(0.0, 1.0, 2).is_err());
        assert!(ParameterGrid::new(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn spacing_is_uniform() {
        let grid = ParameterGrid::new(-3.7, 12.1, 2001).unwrap();
        let h = grid.spacing();
        for w in grid.nodes().windows(2) {
            assert!(w[1] > w[0]);
            assert!(((w[1] - w[0]) - h).abs() <= 1e-12 * h.max(1.0) * 16.0);
        }
        assert_eq!(*grid.nodes().last().unwrap(), 12.1);
    }

    #[test]
    fn interpolation_is_linear_between_nodes() {
        let grid = ParameterGrid::new(0.0, 2.0, 3).unwrap();
        let v = [0.0, 2.0, 1.0];
        assert_eq!(grid.interpolate(&v, 0.5), Some(1.0));
        assert_eq!(grid.interpolate(&v, 1.5), Some(1.5));
        assert_eq!(grid.interpolate(&v, 2.0), Some(1.0));
        assert_eq!(grid.interpolate(&v, 2.1), None);
    }

    #[test]
    fn refinement_keeps_nodes() {
        let grid = ParameterGrid::new(0.5, 1.5, 11).unwrap();
        let fine = grid.refined();
        assert_eq!(fine.len(), 21);
        for (i, t) in grid.nodes().iter().enumerate() {
            assert!((fine.nodes()[2 * i] - t).abs() < 1e-15);
        }
    }
}
