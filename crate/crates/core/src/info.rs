//! Pointwise and ensemble information quantities: marginal, PMI, SFI,
//! surprisal, Fisher information and mutual information.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ConditionalModel, Outcome, OutcomeSpace};
use crate::prior::Prior;

/// Marginals at or below this are treated as zero.
pub const DEGENERATE_MARGINAL: f64 = 1e-300;

const MASS_WINDOW: (f64, f64) = (0.999, 1.001);

/// `p(x) = ∫ p(x|θ) p(θ) dθ`.
pub fn marginal<M: ConditionalModel + ?Sized>(model: &M, prior: &Prior, x: Outcome) -> Result<f64> {
    model.outcome_space().check(x)?;
    let joint: Vec<f64> = prior
        .grid()
        .nodes()
        .iter()
        .zip(prior.density())
        .map(|(&t, &p)| if p == 0.0 { 0.0 } else { model.pdf(x, t) * p })
        .collect();
    if joint.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("marginal integrand"));
    }
    let m = prior.grid().trapezoid(&joint);
    if m <= DEGENERATE_MARGINAL {
        return Err(Error::DegenerateMarginal { marginal: m });
    }
    Ok(m)
}

/// Pointwise mutual information `log p(x|θ) - log p(x)`.
pub fn pmi<M: ConditionalModel + ?Sized>(model: &M, prior: &Prior, x: Outcome, theta: f64) -> Result<f64> {
    let m = marginal(model, prior, x)?;
    pmi_given_marginal(model, x, theta, m)
}

pub(crate) fn pmi_given_marginal<M: ConditionalModel + ?Sized>(
    model: &M,
    x: Outcome,
    theta: f64,
    marginal: f64,
) -> Result<f64> {
    let lp = model.log_pdf(x, theta);
    if lp == f64::NEG_INFINITY {
        return Err(Error::ZeroLikelihood { theta });
    }
    if !lp.is_finite() {
        return Err(Error::NonFinite("log-likelihood"));
    }
    Ok(lp - marginal.ln())
}

/// Stochastic Fisher information: the squared score.
pub fn sfi<M: ConditionalModel + ?Sized>(model: &M, x: Outcome, theta: f64) -> Result<f64> {
    model.outcome_space().check(x)?;
    let s = model.score(x, theta);
    let v = s * s;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("score"))
    }
}

/// Stochastic entropy of the prior, `-log p(θ)`.
pub fn surprisal(prior: &Prior, theta: f64) -> Result<f64> {
    match prior.density_at(theta) {
        Some(p) if p > 0.0 => Ok(-p.ln()),
        _ => Err(Error::OutsideSupport { theta }),
    }
}

/// Classical Fisher information `F(θ) = E_x[ι(x,θ)]` under `p(x|θ)`.
///
/// Outcomes with zero probability at `θ` are skipped. For continuous models
/// the outcome grid must carry the conditional mass to within `1e-3`.
pub fn fisher_information<M: ConditionalModel + ?Sized>(model: &M, theta: f64) -> Result<f64> {
    let space = model.outcome_space();
    let xs = space.outcomes();
    let mut mass = Vec::with_capacity(xs.len());
    let mut weighted = Vec::with_capacity(xs.len());
    for &x in &xs {
        let p = model.pdf(x, theta);
        mass.push(p);
        if p > 0.0 {
            let s = model.score(x, theta);
            let v = p * s * s;
            if !v.is_finite() {
                return Err(Error::NonFinite("score"));
            }
            weighted.push(v);
        } else {
            weighted.push(0.0);
        }
    }
    let total = space.accumulate(&mass);
    if !(total >= MASS_WINDOW.0 && total <= MASS_WINDOW.1) {
        return Err(Error::UnnormalizedOutcomeSpace { mass: total, theta });
    }
    Ok(space.accumulate(&weighted))
}

/// Mutual information: the joint-weighted average of the PMI, by trapezoid
/// quadrature over `θ` and summation (or quadrature) over `x`.
pub fn mutual_information<M: ConditionalModel + ?Sized>(model: &M, prior: &Prior) -> Result<f64> {
    let space = model.outcome_space();
    let per_outcome = space
        .outcomes()
        .par_iter()
        .map(|&x| outcome_information(model, prior, x))
        .collect::<Result<Vec<f64>>>()?;
    let mi = space.accumulate(&per_outcome);
    if mi.is_finite() {
        Ok(mi)
    } else {
        Err(Error::NonFinite("mutual information"))
    }
}

/// `∫ p(x|θ) p(θ) i(x,θ) dθ` for one outcome.
fn outcome_information<M: ConditionalModel + ?Sized>(model: &M, prior: &Prior, x: Outcome) -> Result<f64> {
    let m = marginal(model, prior, x)?;
    let log_m = m.ln();
    let values: Vec<f64> = prior
        .grid()
        .nodes()
        .iter()
        .zip(prior.density())
        .map(|(&t, &p)| {
            let lp = model.log_pdf(x, t);
            let joint = lp.exp() * p;
            if joint == 0.0 {
                0.0
            } else {
                joint * (lp - log_m)
            }
        })
        .collect();
    Ok(prior.grid().trapezoid(&values))
}

/// Total conditional mass `Σ_x p(x|θ)` (or its integral over the outcome grid).
pub fn conditional_mass<M: ConditionalModel + ?Sized>(model: &M, theta: f64) -> f64 {
    let space: &OutcomeSpace = model.outcome_space();
    let mass: Vec<f64> = space.outcomes().iter().map(|&x| model.pdf(x, theta)).collect();
    space.accumulate(&mass)
}
