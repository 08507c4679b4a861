//! Priors over the parameter, tabulated on a [`ParameterGrid`].

use statrs::distribution::{Continuous, ContinuousCDF, Gamma, Normal};

use crate::error::{Error, Result};
use crate::grid::ParameterGrid;

/// Per-side tail mass discarded when an infinite-support prior is truncated.
pub const TAIL_MASS: f64 = 1e-12;

const NORMALIZATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportKind {
    /// `supp p ⊆ [a, b]`, with `a`, `b` the grid endpoints.
    FiniteSupport { a: f64, b: f64 },
    /// An infinite-support density cut to the grid; `tail_mass_bound` is the
    /// largest probability mass discarded on either side.
    TruncatedInfinite { tail_mass_bound: f64 },
}

/// A prior density `p(θ)` and its derivative `ṗ(θ)` at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    grid: ParameterGrid,
    density: Vec<f64>,
    derivative: Vec<f64>,
    support: SupportKind,
}

impl Prior {
    /// Builds a prior from tabulated values. The density must be non-negative
    /// and integrate to one within `1e-6`.
    pub fn from_values(
        grid: ParameterGrid,
        density: Vec<f64>,
        derivative: Vec<f64>,
        support: SupportKind,
    ) -> Result<Self> {
        for (name, v) in [("density", &density), ("derivative", &derivative)] {
            if v.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidPrior(format!("{name} has non-finite entries")));
            }
        }
        if density.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidPrior("density has negative entries".into()));
        }
        if let SupportKind::FiniteSupport { a, b } = support {
            if a != grid.min() || b != grid.max() {
                return Err(Error::InvalidPrior(format!(
                    "finite support [{a}, {b}] must coincide with the grid [{}, {}]",
                    grid.min(),
                    grid.max()
                )));
            }
        }
        let mass = grid.trapezoid(&density);
        if (mass - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidPrior(format!("density integrates to {mass}, not 1")));
        }
        Ok(Self {
            grid,
            density,
            derivative,
            support,
        })
    }

    /// Uniform prior on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n_points: usize) -> Result<Self> {
        let grid = ParameterGrid::new(a, b, n_points)?;
        let n = grid.len();
        Self::from_values(
            grid,
            vec![1.0 / (b - a); n],
            vec![0.0; n],
            SupportKind::FiniteSupport { a, b },
        )
    }

    /// Gaussian prior `N(mean, sd²)` truncated where the tail mass drops below
    /// [`TAIL_MASS`] per side. A `lower_limit` (e.g. a positivity constraint on
    /// the parameter) cuts the range further; the density is renormalized on
    /// the final grid and `tail_mass_bound` records the larger discarded tail.
    pub fn gaussian(mean: f64, sd: f64, n_points: usize, lower_limit: Option<f64>) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidPrior(format!(
                "need finite mean and sd > 0, got N({mean}, {sd}²)"
            )));
        }
        let dist = Normal::new(mean, sd).map_err(|e| Error::InvalidPrior(e.to_string()))?;
        let z = -Normal::standard().inverse_cdf(TAIL_MASS);
        let mut lo = mean - z * sd;
        let hi = mean + z * sd;
        let mut lower_tail = TAIL_MASS;
        if let Some(limit) = lower_limit {
            if limit >= hi {
                return Err(Error::InvalidPrior(format!("lower limit {limit} leaves no support")));
            }
            if limit > lo {
                lo = limit;
                lower_tail = dist.cdf(limit);
            }
        }
        let grid = ParameterGrid::new(lo, hi, n_points)?;
        let density: Vec<f64> = grid.nodes().iter().map(|&t| dist.pdf(t)).collect();
        let derivative: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&density)
            .map(|(&t, &p)| -p * (t - mean) / (sd * sd))
            .collect();
        Self::normalized(grid, density, derivative, lower_tail.max(TAIL_MASS))
    }

    /// Gamma prior with shape `k` and scale `s`, truncated at [`TAIL_MASS`]
    /// quantiles on both sides.
    pub fn gamma(shape: f64, scale: f64, n_points: usize) -> Result<Self> {
        if !(shape >= 1.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            // shape < 1 has an unbounded density at the origin; not differentiable there.
            return Err(Error::InvalidPrior(format!(
                "need shape >= 1 and scale > 0, got Gamma({shape}, {scale})"
            )));
        }
        let dist = Gamma::new(shape, 1.0 / scale).map_err(|e| Error::InvalidPrior(e.to_string()))?;
        let lo = dist.inverse_cdf(TAIL_MASS);
        let hi = upper_quantile(&dist, TAIL_MASS, shape * scale);
        let grid = ParameterGrid::new(lo, hi, n_points)?;
        let density: Vec<f64> = grid.nodes().iter().map(|&t| dist.pdf(t)).collect();
        let derivative: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(&density)
            .map(|(&t, &p)| p * ((shape - 1.0) / t - 1.0 / scale))
            .collect();
        Self::normalized(grid, density, derivative, TAIL_MASS)
    }

    fn normalized(grid: ParameterGrid, mut density: Vec<f64>, mut derivative: Vec<f64>, tail: f64) -> Result<Self> {
        let mass = grid.trapezoid(&density);
        if !(mass > 0.0) {
            return Err(Error::InvalidPrior("density has zero mass on the grid".into()));
        }
        density.iter_mut().for_each(|p| *p /= mass);
        derivative.iter_mut().for_each(|d| *d /= mass);
        Self::from_values(
            grid,
            density,
            derivative,
            SupportKind::TruncatedInfinite { tail_mass_bound: tail },
        )
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    pub fn support(&self) -> SupportKind {
        self.support
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(self.support, SupportKind::FiniteSupport { .. })
    }

    /// Density at an arbitrary `theta`, linearly interpolated between nodes.
    pub fn density_at(&self, theta: f64) -> Option<f64> {
        self.grid.interpolate(&self.density, theta)
    }
}

/// Smallest `t` with survival `sf(t) <= tail`, by bracketing and bisection.
fn upper_quantile<D: ContinuousCDF<f64, f64>>(dist: &D, tail: f64, start: f64) -> f64 {
    let mut lo = start.max(f64::MIN_POSITIVE);
    let mut hi = 2.0 * lo;
    while dist.sf(hi) > tail {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.sf(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}
