use nalgebra::DMatrix;

use super::matrix::{HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Default central-difference step for `∂θρ`.
pub const FD_STEP: f64 = 1e-5;

const STATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeKind {
    Analytic,
    FiniteDifference(f64),
}

/// A differentiable family of density matrices `ρθ`.
pub trait StateFamily: Send + Sync {
    fn dim(&self) -> usize;

    fn rho(&self, theta: f64) -> Result<HermitianMatrix>;

    /// `∂θρθ`; central differences unless overridden.
    fn drho(&self, theta: f64) -> Result<HermitianMatrix> {
        central_difference_drho(self, theta, FD_STEP)
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::FiniteDifference(FD_STEP)
    }
}

/// `(ρ(θ+h) − ρ(θ−h)) / 2h`, re-symmetrized.
pub fn central_difference_drho<F: StateFamily + ?Sized>(family: &F, theta: f64, h: f64) -> Result<HermitianMatrix> {
    let plus = family.rho(theta + h)?.into_inner();
    let minus = family.rho(theta - h)?.into_inner();
    HermitianMatrix::symmetrized((plus - minus).unscale(2.0 * h))
}

/// Checks unit trace and positivity to 1e-10.
pub fn check_state(rho: &HermitianMatrix) -> Result<()> {
    let trace = rho.trace();
    if (trace - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::InvalidState(format!("trace {trace}")));
    }
    let min = rho.min_eigenvalue();
    if min < -STATE_TOLERANCE {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

/// `|+⟩` evolved by `exp(−iθσz/2)`, global phase dropped:
/// `|ψ(θ)⟩ = (|0⟩ + e^{iθ}|1⟩)/√2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QubitPhaseFamily;

impl StateFamily for QubitPhaseFamily {
    fn dim(&self) -> usize {
        2
    }

    fn rho(&self, theta: f64) -> Result<HermitianMatrix> {
        let c = C64::from_polar(0.5, theta);
        let half = C64::new(0.5, 0.0);
        HermitianMatrix::from_rows(2, &[half, c.conj(), c, half])
    }

    fn drho(&self, theta: f64) -> Result<HermitianMatrix> {
        let c = C64::from_polar(0.5, theta) * C64::new(0.0, 1.0);
        let zero = C64::new(0.0, 0.0);
        HermitianMatrix::from_rows(2, &[zero, c.conj(), c, zero])
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }
}

/// `diag(p(θ), 1 − p(θ))` with analytic derivative `diag(ṗ, −ṗ)`.
pub struct DiagonalFamily<P, D> {
    p: P,
    p_dot: D,
}

impl<P, D> DiagonalFamily<P, D>
where
    P: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(p: P, p_dot: D) -> Self {
        Self { p, p_dot }
    }
}

impl<P, D> StateFamily for DiagonalFamily<P, D>
where
    P: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        2
    }

    fn rho(&self, theta: f64) -> Result<HermitianMatrix> {
        let p = (self.p)(theta);
        HermitianMatrix::from_real_diagonal(&[p, 1.0 - p])
    }

    fn drho(&self, theta: f64) -> Result<HermitianMatrix> {
        let d = (self.p_dot)(theta);
        HermitianMatrix::from_real_diagonal(&[d, -d])
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }
}

/// A family given only by `θ ↦ ρθ`, differentiated numerically.
pub struct ClosureFamily<F> {
    dim: usize,
    rho: F,
    step: f64,
}

impl<F> ClosureFamily<F>
where
    F: Fn(f64) -> Result<HermitianMatrix> + Send + Sync,
{
    pub fn new(dim: usize, rho: F) -> Self {
        Self {
            dim,
            rho,
            step: FD_STEP,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

impl<F> StateFamily for ClosureFamily<F>
where
    F: Fn(f64) -> Result<HermitianMatrix> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rho(&self, theta: f64) -> Result<HermitianMatrix> {
        let rho = (self.rho)(theta)?;
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, rho.dim()));
        }
        Ok(rho)
    }

    fn drho(&self, theta: f64) -> Result<HermitianMatrix> {
        central_difference_drho(self, theta, self.step)
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::FiniteDifference(self.step)
    }
}

/// A `θ`-independent state.
#[derive(Debug, Clone)]
pub struct ConstantFamily(HermitianMatrix);

impl ConstantFamily {
    pub fn new(rho: HermitianMatrix) -> Result<Self> {
        check_state(&rho)?;
        Ok(Self(rho))
    }
}

impl StateFamily for ConstantFamily {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn rho(&self, _theta: f64) -> Result<HermitianMatrix> {
        Ok(self.0.clone())
    }

    fn drho(&self, _theta: f64) -> Result<HermitianMatrix> {
        HermitianMatrix::new(DMatrix::zeros(self.dim(), self.dim()))
    }

    fn derivative_kind(&self) -> DerivativeKind {
        DerivativeKind::Analytic
    }
}
