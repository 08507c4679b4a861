//! Pointwise upper bounds on the PMI and their ensemble averages.
//!
//! For a weight `f` covering the prior's support the PMI obeys
//!
//! ```text
//! i(x,θ) ≤ log( B(x) + ∫ p(x|θ')/p(x) √Λ(x,θ') dθ' ) − log f(θ)
//! Λ = ι f² + ḟ² + 2 (∂θ log p) f ḟ
//! ```
//!
//! where `B(x) = (p(x|a) f(a) + p(x|b) f(b)) / p(x)` accounts for the jump of
//! `f` to zero at the grid edges. A boxcar weight gives the finite-support
//! bound (`B` is the boundary-probability term, `Λ = ι`, no penalty); the
//! prior itself gives the surprisal-penalized bound. Swapping `ι` for the
//! conditional QFI gives the quantum versions.
//!
//! Everything except the penalty depends on `x` only, so sweeps evaluate one
//! [`OutcomeKernel`] per outcome and reuse it across `θ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{fisher_information, marginal, mutual_information, pmi_given_marginal};
use crate::model::{ConditionalModel, Outcome, SensitivitySource};
use crate::prior::{Prior, SupportKind};
use crate::weight::{WeightFunction, WeightKind};

/// Default slack tolerance for counting violations.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Outcome probabilities at or below this are dropped from quantum integrands.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// `Λ = s f² + ḟ² + 2 score f ḟ`, clamped to zero when it is negative only by
/// roundoff.
///
/// Evaluated as `(s − score²) f² + (score f + ḟ)²`. The expanded sum cancels
/// where `score f ≈ −ḟ`; this grouping is exact to rounding there whenever
/// `s` was formed as `score²`.
pub fn lambda_general(sensitivity: f64, score: f64, f: f64, f_dot: f64) -> Result<f64> {
    let excess = (sensitivity - score * score) * f * f;
    let square = (score * f + f_dot).powi(2);
    let value = excess + square;
    if !value.is_finite() {
        return Err(Error::NonFinite("lambda functional"));
    }
    if value >= 0.0 {
        return Ok(value);
    }
    let scale = (sensitivity.abs() + score * score) * f * f + square;
    if value < -1e-9 * scale {
        return Err(Error::NegativeLambda { value });
    }
    Ok(0.0)
}

/// Which sensitivity enters `Λ`.
#[derive(Clone, Copy)]
pub enum Sensitivity<'a> {
    /// The squared score (classical SFI); `√Λ` is taken in factored form.
    Stochastic,
    /// An outcome-resolved replacement such as the conditional QFI.
    Supplied(&'a dyn SensitivitySource),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundComponents {
    /// Edge contribution `(p(x|a) f(a) + p(x|b) f(b)) / p(x)`.
    pub boundary_term: f64,
    /// `∫ p(x|θ')/p(x) √Λ dθ'`.
    pub integral_term: f64,
    /// `−log f(θ)`; the surprisal for the prior-matched weight.
    pub penalty_term: f64,
}

/// One evaluated bound: `slack = bound − pmi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub x: Outcome,
    pub theta: f64,
    pub pmi: f64,
    pub bound: f64,
    pub slack: f64,
    pub components: BoundComponents,
}

/// The `θ`-independent part of a bound for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeKernel {
    pub x: Outcome,
    pub marginal: f64,
    pub boundary_term: f64,
    pub integral_term: f64,
    /// Grid nodes dropped from the integrand because `p(x|θ)` vanished there.
    pub excluded_nodes: usize,
}

impl OutcomeKernel {
    pub fn new<M: ConditionalModel + ?Sized>(
        model: &M,
        prior: &Prior,
        weight: &WeightFunction,
        sensitivity: Sensitivity<'_>,
        x: Outcome,
    ) -> Result<Self> {
        let m = marginal(model, prior, x)?;
        let grid = weight.grid();
        let nodes = grid.nodes();
        let f = weight.values();
        let f_dot = weight.derivative();
        let mut excluded = 0;
        let mut integrand = Vec::with_capacity(nodes.len());
        for (i, &t) in nodes.iter().enumerate() {
            let value = match sensitivity {
                Sensitivity::Stochastic => {
                    // p √Λ = |∂θ(p f)| when Λ is built from the squared score
                    (model.pdf_derivative(x, t) * f[i] + model.pdf(x, t) * f_dot[i]).abs()
                }
                Sensitivity::Supplied(source) => {
                    let p = model.pdf(x, t);
                    if p <= ZERO_PROBABILITY {
                        excluded += 1;
                        0.0
                    } else {
                        let score = model.pdf_derivative(x, t) / p;
                        let lambda = lambda_general(source.sensitivity(x, t)?, score, f[i], f_dot[i])?;
                        p * lambda.sqrt()
                    }
                }
            };
            debug_assert!(!(value < 0.0));
            integrand.push(value);
        }
        if integrand.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("bound integrand"));
        }
        if excluded > 0 {
            log::warn!(
                "outcome {x}: {excluded} grid node(s) with vanishing probability excluded from the bound integral"
            );
        }
        let n = nodes.len();
        let edges = model.pdf(x, nodes[0]) * f[0] + model.pdf(x, nodes[n - 1]) * f[n - 1];
        let boundary_term = edges / m;
        let integral_term = grid.trapezoid(&integrand) / m;
        if !(boundary_term.is_finite() && integral_term.is_finite()) {
            return Err(Error::NonFinite("bound terms"));
        }
        Ok(Self {
            x,
            marginal: m,
            boundary_term,
            integral_term,
            excluded_nodes: excluded,
        })
    }

    /// `log(B + ∫ …)`, the `θ`-independent part of the bound.
    pub fn log_argument(&self) -> f64 {
        (self.boundary_term + self.integral_term).ln()
    }

    /// Completes the bound at `theta` with the weight's penalty term.
    pub fn report<M: ConditionalModel + ?Sized>(
        &self,
        model: &M,
        weight: &WeightFunction,
        theta: f64,
    ) -> Result<BoundReport> {
        let penalty_term = penalty(weight, theta)?;
        let pmi = pmi_given_marginal(model, self.x, theta, self.marginal)?;
        let bound = self.log_argument() + penalty_term;
        Ok(BoundReport {
            x: self.x,
            theta,
            pmi,
            bound,
            slack: bound - pmi,
            components: BoundComponents {
                boundary_term: self.boundary_term,
                integral_term: self.integral_term,
                penalty_term,
            },
        })
    }
}

fn penalty(weight: &WeightFunction, theta: f64) -> Result<f64> {
    let grid = weight.grid();
    match weight.value_at(theta) {
        None if weight.kind() == WeightKind::Boxcar => Err(Error::ThetaOutsideSupport {
            theta,
            a: grid.min(),
            b: grid.max(),
        }),
        None => Err(Error::OutsideSupport { theta }),
        Some(f) if f > 0.0 => Ok(0.0 - f.ln()), // +0 rather than -0 for f = 1
        Some(_) if weight.kind() == WeightKind::PriorMatched => Err(Error::OutsideSupport { theta }),
        Some(_) => Err(Error::ZeroWeightAtTheta { theta }),
    }
}

/// The generalized bound for an arbitrary weight, with the squared score as
/// sensitivity.
pub fn bound_general<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    weight: &WeightFunction,
    x: Outcome,
    theta: f64,
) -> Result<BoundReport> {
    bound_general_with(model, prior, weight, Sensitivity::Stochastic, x, theta)
}

pub fn bound_general_with<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    weight: &WeightFunction,
    sensitivity: Sensitivity<'_>,
    x: Outcome,
    theta: f64,
) -> Result<BoundReport> {
    weight.check_covers(prior)?;
    OutcomeKernel::new(model, prior, weight, sensitivity, x)?.report(model, weight, theta)
}

/// Finite-support bound: boxcar weight on `[a, b]`.
pub fn bound_theorem1<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    x: Outcome,
    theta: f64,
) -> Result<BoundReport> {
    evaluate_bound(model, prior, &BoundKind::Theorem1, x, theta)
}

/// Prior-matched bound with the surprisal as penalty.
pub fn bound_theorem2<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    x: Outcome,
    theta: f64,
) -> Result<BoundReport> {
    evaluate_bound(model, prior, &BoundKind::Theorem2, x, theta)
}

/// Bound selector for sweeps and reports.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundKind {
    /// Boxcar weight, squared-score sensitivity.
    Theorem1,
    /// Prior-matched weight, squared-score sensitivity.
    Theorem2,
    /// Boxcar weight, conditional QFI sensitivity.
    Theorem3,
    /// Prior-matched weight, conditional QFI sensitivity.
    Theorem3Prior,
    /// Arbitrary weight, squared-score sensitivity.
    General(WeightFunction),
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Theorem2 => "theorem2",
            BoundKind::Theorem3 => "theorem3",
            BoundKind::Theorem3Prior => "theorem3_prior",
            BoundKind::General(_) => "general",
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, BoundKind::Theorem3 | BoundKind::Theorem3Prior)
    }

    pub fn requires_finite_support(&self) -> bool {
        matches!(self, BoundKind::Theorem1 | BoundKind::Theorem3)
    }

    /// The weight this bound uses with `prior`, after checking compatibility.
    pub fn weight(&self, prior: &Prior) -> Result<WeightFunction> {
        if self.requires_finite_support() && !prior.is_finite_support() {
            return Err(Error::RequiresFiniteSupport);
        }
        let weight = match self {
            BoundKind::Theorem1 | BoundKind::Theorem3 => WeightFunction::boxcar(prior.grid()),
            BoundKind::Theorem2 | BoundKind::Theorem3Prior => WeightFunction::prior_matched(prior),
            BoundKind::General(w) => w.clone(),
        };
        weight.check_covers(prior)?;
        Ok(weight)
    }

    pub fn sensitivity<'a, M: ConditionalModel + ?Sized>(&self, model: &'a M) -> Result<Sensitivity<'a>> {
        if self.is_quantum() {
            model
                .sensitivity_source()
                .map(Sensitivity::Supplied)
                .ok_or(Error::NotQuantum)
        } else {
            Ok(Sensitivity::Stochastic)
        }
    }

    fn check_theta(&self, prior: &Prior, theta: f64) -> Result<()> {
        if let SupportKind::FiniteSupport { a, b } = prior.support() {
            if self.requires_finite_support() && !(a..=b).contains(&theta) {
                return Err(Error::ThetaOutsideSupport { theta, a, b });
            }
        }
        Ok(())
    }
}

/// Evaluates the selected bound at one `(x, θ)`.
pub fn evaluate_bound<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    kind: &BoundKind,
    x: Outcome,
    theta: f64,
) -> Result<BoundReport> {
    let weight = kind.weight(prior)?;
    let sensitivity = kind.sensitivity(model)?;
    kind.check_theta(prior, theta)?;
    OutcomeKernel::new(model, prior, &weight, sensitivity, x)?.report(model, &weight, theta)
}

/// Result of one sweep point; per-point failures are recorded, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepPoint {
    Evaluated(BoundReport),
    Skipped { x: Outcome, theta: f64, reason: Error },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    /// Points attempted.
    pub n_points: usize,
    /// Points with a finite bound and PMI.
    pub n_evaluations: usize,
    pub skipped: usize,
    pub min_slack: f64,
    pub mean_slack: f64,
    /// Evaluations with `slack < −tolerance`.
    pub violations: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub summary: SweepSummary,
}

/// Evaluates the selected bound on every `(x, θ)` pair, `x`-major, and counts
/// violations of `slack ≥ −tolerance`.
pub fn verify_bound_sweep<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    kind: &BoundKind,
    x_samples: &[Outcome],
    theta_samples: &[f64],
    tolerance: f64,
) -> Result<Sweep> {
    if x_samples.is_empty() || theta_samples.is_empty() {
        return Err(Error::InvalidModel("sweep needs at least one x and one theta".into()));
    }
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::InvalidModel(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let weight = kind.weight(prior)?;
    let sensitivity = kind.sensitivity(model)?;

    let rows: Vec<Vec<SweepPoint>> = x_samples
        .par_iter()
        .map(|&x| {
            let kernel = OutcomeKernel::new(model, prior, &weight, sensitivity, x);
            theta_samples
                .iter()
                .map(|&theta| {
                    let result = kernel.as_ref().map_err(Clone::clone).and_then(|k| {
                        kind.check_theta(prior, theta)?;
                        k.report(model, &weight, theta)
                    });
                    match result {
                        Ok(report) => SweepPoint::Evaluated(report),
                        Err(reason) => SweepPoint::Skipped { x, theta, reason },
                    }
                })
                .collect()
        })
        .collect();
    let points: Vec<SweepPoint> = rows.into_iter().flatten().collect();
    let summary = summarize(&points, tolerance);
    Ok(Sweep { points, summary })
}

fn summarize(points: &[SweepPoint], tolerance: f64) -> SweepSummary {
    let mut n_evaluations = 0;
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    let mut total = 0.0;
    for point in points {
        if let SweepPoint::Evaluated(r) = point {
            n_evaluations += 1;
            total += r.slack;
            min_slack = min_slack.min(r.slack);
            if r.slack < -tolerance {
                violations += 1;
            }
        }
    }
    SweepSummary {
        n_points: points.len(),
        n_evaluations,
        skipped: points.len() - n_evaluations,
        min_slack: if n_evaluations > 0 { min_slack } else { f64::NAN },
        mean_slack: if n_evaluations > 0 {
            total / n_evaluations as f64
        } else {
            f64::NAN
        },
        violations,
        tolerance,
    }
}

/// Joint average `Σ_x ∫ p(x,θ) [bound(x,θ)] dθ` of the pointwise bound, on
/// the prior's grid nodes.
pub fn averaged_pointwise_bound<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    kind: &BoundKind,
) -> Result<f64> {
    let weight = kind.weight(prior)?;
    let sensitivity = kind.sensitivity(model)?;
    let space = model.outcome_space();
    let nodes = prior.grid().nodes();
    let log_f = weight
        .values()
        .iter()
        .zip(prior.density())
        .zip(nodes)
        .map(|((&f, &p), &theta)| match (f > 0.0, p > 0.0) {
            (true, _) => Ok(f.ln()),
            (false, false) => Ok(0.0),
            (false, true) => Err(Error::ZeroWeightAtTheta { theta }),
        })
        .collect::<Result<Vec<f64>>>()?;

    let per_outcome = space
        .outcomes()
        .par_iter()
        .map(|&x| {
            let kernel = OutcomeKernel::new(model, prior, &weight, sensitivity, x)?;
            let log_arg = kernel.log_argument();
            let values: Vec<f64> = nodes
                .iter()
                .zip(prior.density())
                .zip(&log_f)
                .map(|((&t, &p), &lf)| {
                    let joint = model.pdf(x, t) * p;
                    if joint == 0.0 {
                        0.0
                    } else {
                        joint * (log_arg - lf)
                    }
                })
                .collect();
            Ok(prior.grid().trapezoid(&values))
        })
        .collect::<Result<Vec<f64>>>()?;
    let avg = space.accumulate(&per_outcome);
    if avg.is_finite() {
        Ok(avg)
    } else {
        Err(Error::NonFinite("averaged pointwise bound"))
    }
}

/// Ensemble bound `log(f(a) + f(b) + ∫ √(F f² + ḟ²) dθ) − ∫ p log f dθ`
/// with `F` the classical Fisher information.
pub fn mi_bound_average<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    weight: &WeightFunction,
) -> Result<f64> {
    mi_bound_average_with(model, prior, weight, Sensitivity::Stochastic)
}

/// As [`mi_bound_average`], with `F(θ)` replaced by the conditional average
/// of the supplied sensitivity (the QFI for the conditional QFI).
pub fn mi_bound_average_with<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    weight: &WeightFunction,
    sensitivity: Sensitivity<'_>,
) -> Result<f64> {
    let fisher = prior
        .grid()
        .nodes()
        .par_iter()
        .map(|&t| mean_sensitivity(model, sensitivity, t))
        .collect::<Result<Vec<f64>>>()?;
    mi_bound_average_from_fisher(&fisher, prior, weight)
}

/// The ensemble bound from tabulated Fisher information at the grid nodes.
pub fn mi_bound_average_from_fisher(fisher: &[f64], prior: &Prior, weight: &WeightFunction) -> Result<f64> {
    weight.check_covers(prior)?;
    let grid = prior.grid();
    if fisher.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: fisher.len(),
        });
    }
    let f = weight.values();
    let f_dot = weight.derivative();
    let root: Vec<f64> = fisher
        .iter()
        .zip(f)
        .zip(f_dot)
        .map(|((&fi, &w), &wd)| (fi * w * w + wd * wd).sqrt())
        .collect();
    let penalty: Vec<f64> = prior
        .density()
        .iter()
        .zip(f)
        .map(|(&p, &w)| if p == 0.0 { 0.0 } else { p * w.ln() })
        .collect();
    let n = f.len();
    let argument = f[0] + f[n - 1] + grid.quadrature(&root)?;
    let value = argument.ln() - grid.quadrature(&penalty)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("mi_bound_average"))
    }
}

/// `Σ_x p(x|θ) ι(x,θ)`: the Fisher information, or the conditional average of
/// a supplied sensitivity.
pub fn mean_sensitivity<M: ConditionalModel + ?Sized>(
    model: &M,
    sensitivity: Sensitivity<'_>,
    theta: f64,
) -> Result<f64> {
    match sensitivity {
        Sensitivity::Stochastic => fisher_information(model, theta),
        Sensitivity::Supplied(source) => {
            let space = model.outcome_space();
            let values = space
                .outcomes()
                .into_iter()
                .map(|x| {
                    let p = model.pdf(x, theta);
                    if p <= ZERO_PROBABILITY {
                        Ok(0.0)
                    } else {
                        Ok(p * source.sensitivity(x, theta)?)
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(space.accumulate(&values))
        }
    }
}

/// The ensemble chain `MI ≤ ⟨pointwise bound⟩ ≤ mi_bound_average`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiChain {
    pub mutual_information: f64,
    pub averaged_pointwise_bound: f64,
    pub mi_bound_average: f64,
    pub tolerance: f64,
}

impl MiChain {
    pub fn holds(&self) -> bool {
        self.mutual_information <= self.averaged_pointwise_bound + self.tolerance
            && self.averaged_pointwise_bound <= self.mi_bound_average + self.tolerance
    }
}

/// Computes all three links of the chain for `kind` on the prior's grid.
pub fn mi_chain<M: ConditionalModel + ?Sized>(
    model: &M,
    prior: &Prior,
    kind: &BoundKind,
    tolerance: f64,
) -> Result<MiChain> {
    let weight = kind.weight(prior)?;
    let sensitivity = kind.sensitivity(model)?;
    Ok(MiChain {
        mutual_information: mutual_information(model, prior)?,
        averaged_pointwise_bound: averaged_pointwise_bound(model, prior, kind)?,
        mi_bound_average: mi_bound_average_with(model, prior, &weight, sensitivity)?,
        tolerance,
    })
}
