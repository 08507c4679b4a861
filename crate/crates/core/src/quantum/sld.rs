use nalgebra::DMatrix;

use super::family::StateFamily;
use super::matrix::{trace_product, HermitianMatrix, C64};
use super::povm::{born_probability, Povm};
use crate::error::{Error, Result};

/// Eigenvalue pairs of `ρ` with `λi + λj` at or below this are treated as
/// outside the support.
pub const RANK_EPSILON: f64 = 1e-10;

const MIN_PROBABILITY: f64 = 1e-12;
const NEGATIVE_CLAMP: f64 = 1e-10;
const LEAKAGE_FLAG: f64 = 1e-8;

/// The support-restricted SLD with the eigenbasis it was built in.
#[derive(Debug, Clone)]
pub struct SldSolution {
    pub l: HermitianMatrix,
    /// Projector onto eigenvectors of `ρ` with eigenvalue above [`RANK_EPSILON`].
    pub support: HermitianMatrix,
    pub rank: usize,
}

impl SldSolution {
    pub fn solve(rho: &HermitianMatrix, drho: &HermitianMatrix) -> Result<Self> {
        if rho.dim() != drho.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), drho.dim()));
        }
        let (values, vectors) = rho.eigen();
        if let Some(&ambiguous) = values.iter().find(|&&v| v > RANK_EPSILON / 10.0 && v < RANK_EPSILON) {
            return Err(Error::IllConditioned(ambiguous));
        }
        let n = rho.dim();
        let d = vectors.adjoint() * drho.matrix() * &vectors;
        let mut l = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let s = values[i] + values[j];
                if s > RANK_EPSILON {
                    l[(i, j)] = d[(i, j)] * (2.0 / s);
                }
            }
        }
        let l = HermitianMatrix::symmetrized(&vectors * l * vectors.adjoint())?;
        let mut p = DMatrix::<C64>::zeros(n, n);
        let mut rank = 0;
        for (k, &v) in values.iter().enumerate() {
            if v > RANK_EPSILON {
                let col = vectors.column(k);
                p += col * col.adjoint();
                rank += 1;
            }
        }
        Ok(Self {
            l,
            support: HermitianMatrix::symmetrized(p)?,
            rank,
        })
    }
}

/// Symmetric logarithmic derivative: Hermitian `L` with `Lρ + ρL = 2∂θρ` on
/// the support of `ρ`, zero on the kernel.
pub fn sld(rho: &HermitianMatrix, drho: &HermitianMatrix) -> Result<HermitianMatrix> {
    SldSolution::solve(rho, drho).map(|s| s.l)
}

/// `max |(Lρ + ρL − 2∂θρ)_ij|` in the eigenbasis of `ρ`, over pairs with
/// `λi + λj` above [`RANK_EPSILON`].
pub fn sld_residual(rho: &HermitianMatrix, drho: &HermitianMatrix, l: &HermitianMatrix) -> Result<f64> {
    if rho.dim() != drho.dim() || rho.dim() != l.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), l.dim()));
    }
    let (values, vectors) = rho.eigen();
    let r = l.matrix() * rho.matrix() + rho.matrix() * l.matrix() - drho.matrix() * C64::new(2.0, 0.0);
    let r = vectors.adjoint() * r * &vectors;
    let n = rho.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if values[i] + values[j] > RANK_EPSILON {
                worst = worst.max(r[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// Conditional QFI of one outcome with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqfiValue {
    /// `Re Tr(Πx L² ρ) / Tr(ρ Πx)`.
    pub value: f64,
    pub probability: f64,
    /// `Tr(Πx (I − P_supp))`: weight of the element outside the support.
    pub support_leakage: f64,
    pub leaks_outside_support: bool,
}

pub fn cqfi_detailed(rho: &HermitianMatrix, drho: &HermitianMatrix, povm: &Povm, x_index: usize) -> Result<CqfiValue> {
    let element = povm
        .elements()
        .get(x_index)
        .ok_or_else(|| Error::UnknownOutcome(format!("#{x_index}")))?;
    let probability = born_probability(rho, element)?;
    if probability <= MIN_PROBABILITY {
        return Err(Error::ZeroOutcomeProbability {
            outcome: x_index,
            probability,
        });
    }
    let solution = SldSolution::solve(rho, drho)?;
    let l = solution.l.matrix();
    let l2_rho = l * l * rho.matrix();
    let mut value = trace_product(element.matrix(), &l2_rho).re / probability;
    if (-NEGATIVE_CLAMP..0.0).contains(&value) {
        value = 0.0;
    }
    let n = rho.dim();
    let outside = DMatrix::<C64>::identity(n, n) - solution.support.matrix();
    let support_leakage = trace_product(element.matrix(), &outside).re;
    Ok(CqfiValue {
        value,
        probability,
        support_leakage,
        leaks_outside_support: support_leakage > LEAKAGE_FLAG,
    })
}

/// Conditional quantum Fisher information of outcome `x_index` at `theta`.
pub fn cqfi<F: StateFamily + ?Sized>(family: &F, povm: &Povm, x_index: usize, theta: f64) -> Result<f64> {
    let rho = family.rho(theta)?;
    let drho = family.drho(theta)?;
    cqfi_detailed(&rho, &drho, povm, x_index).map(|c| c.value)
}

/// Quantum Fisher information `Tr(ρ L²)`.
pub fn qfi<F: StateFamily + ?Sized>(family: &F, theta: f64) -> Result<f64> {
    let rho = family.rho(theta)?;
    let drho = family.drho(theta)?;
    let l = sld(&rho, &drho)?;
    let l2 = l.matrix() * l.matrix();
    Ok(trace_product(rho.matrix(), &l2).re)
}
