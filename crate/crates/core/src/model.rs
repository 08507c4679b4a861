//! Conditional models `p(x|θ)` and their outcome spaces.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::ParameterGrid;

/// A single measurement outcome: an index into a discrete outcome list or a
/// point of a continuous outcome axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Index(usize),
    Value(f64),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Index(i) => write!(f, "#{i}"),
            Outcome::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeSpace {
    /// Finitely many labelled outcomes.
    DiscreteFinite(Vec<String>),
    /// A real outcome axis; the grid is used for sums over `x` (normalization,
    /// Fisher information, mutual information).
    ContinuousGrid(ParameterGrid),
}

impl OutcomeSpace {
    pub fn discrete<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidModel("discrete outcome list is empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidModel(format!("duplicate outcome label {l:?}")));
            }
        }
        Ok(Self::DiscreteFinite(labels))
    }

    pub fn continuous(x_min: f64, x_max: f64, n_x: usize) -> Result<Self> {
        Ok(Self::ContinuousGrid(ParameterGrid::new(x_min, x_max, n_x)?))
    }

    pub fn contains(&self, x: Outcome) -> bool {
        match (self, x) {
            (Self::DiscreteFinite(labels), Outcome::Index(i)) => i < labels.len(),
            (Self::ContinuousGrid(_), Outcome::Value(v)) => v.is_finite(),
            _ => false,
        }
    }

    pub fn check(&self, x: Outcome) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::UnknownOutcome(x.to_string()))
        }
    }

    /// The outcomes a sum or integral over `x` visits, in order.
    pub fn outcomes(&self) -> Vec<Outcome> {
        match self {
            Self::DiscreteFinite(labels) => (0..labels.len()).map(Outcome::Index).collect(),
            Self::ContinuousGrid(grid) => grid.nodes().iter().map(|&v| Outcome::Value(v)).collect(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::DiscreteFinite(_))
    }

    /// Human-readable label: the discrete label, or the value itself.
    pub fn label(&self, x: Outcome) -> String {
        match (self, x) {
            (Self::DiscreteFinite(labels), Outcome::Index(i)) if i < labels.len() => labels[i].clone(),
            (_, Outcome::Value(v)) => v.to_string(),
            (_, x) => x.to_string(),
        }
    }

    /// Looks up a discrete outcome by label.
    pub fn index_of(&self, label: &str) -> Option<Outcome> {
        match self {
            Self::DiscreteFinite(labels) => labels.iter().position(|l| l == label).map(Outcome::Index),
            Self::ContinuousGrid(_) => None,
        }
    }

    /// Sums (discrete) or integrates (continuous) `values` laid out in the
    /// order of [`outcomes`](Self::outcomes).
    pub(crate) fn accumulate(&self, values: &[f64]) -> f64 {
        match self {
            Self::DiscreteFinite(_) => values.iter().sum(),
            Self::ContinuousGrid(grid) => grid.trapezoid(values),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreKind {
    Analytic,
    FiniteDifference(f64),
}

/// Central-difference step for scores: `max(1e-5, 1e-5 |θ|)`.
pub fn finite_difference_step(theta: f64) -> f64 {
    1e-5_f64.max(1e-5 * theta.abs())
}

/// Central finite difference of `log p(x|θ)` in `θ`.
pub fn central_difference_score<M: ConditionalModel + ?Sized>(model: &M, x: Outcome, theta: f64) -> f64 {
    let h = finite_difference_step(theta);
    (model.log_pdf(x, theta + h) - model.log_pdf(x, theta - h)) / (2.0 * h)
}

/// A parametric family `p(x|θ)` with its score `∂θ log p(x|θ)`.
pub trait ConditionalModel: Send + Sync {
    fn outcome_space(&self) -> &OutcomeSpace;

    /// `log p(x|θ)`; `-inf` where the likelihood vanishes.
    fn log_pdf(&self, x: Outcome, theta: f64) -> f64;

    /// `∂θ log p(x|θ)`.
    fn score(&self, x: Outcome, theta: f64) -> f64;

    fn score_kind(&self) -> ScoreKind {
        ScoreKind::Analytic
    }

    fn pdf(&self, x: Outcome, theta: f64) -> f64 {
        self.log_pdf(x, theta).exp()
    }

    /// `∂θ p(x|θ)`. Models whose score is singular where `p` vanishes should
    /// override this with a direct expression.
    fn pdf_derivative(&self, x: Outcome, theta: f64) -> f64 {
        let p = self.pdf(x, theta);
        if p == 0.0 {
            0.0
        } else {
            p * self.score(x, theta)
        }
    }

    /// An outcome-resolved sensitivity that replaces the squared score in the
    /// bounds (the conditional QFI for quantum models).
    fn sensitivity_source(&self) -> Option<&dyn SensitivitySource> {
        None
    }
}

/// Supplies a per-outcome sensitivity `ι(x,θ)` in place of `score²`.
pub trait SensitivitySource: Sync {
    fn sensitivity(&self, x: Outcome, theta: f64) -> Result<f64>;
}

/// Categorical model with polynomial logits,
/// `p(x_k|θ) ∝ exp(Σ_j c_kj θ^j)`.
#[derive(Debug, Clone)]
pub struct SoftmaxModel {
    space: OutcomeSpace,
    coefficients: Vec<Vec<f64>>,
    score_kind: ScoreKind,
}

impl SoftmaxModel {
    pub fn new<S: Into<String>>(outcomes: impl IntoIterator<Item = (S, Vec<f64>)>) -> Result<Self> {
        let (labels, coefficients): (Vec<String>, Vec<Vec<f64>>) =
            outcomes.into_iter().map(|(l, c)| (l.into(), c)).unzip();
        let space = OutcomeSpace::discrete(labels)?;
        if coefficients.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidModel("non-finite logit coefficient".into()));
        }
        Ok(Self {
            space,
            coefficients,
            score_kind: ScoreKind::Analytic,
        })
    }

    /// A model whose distribution does not depend on `θ`.
    pub fn constant(probabilities: &[f64]) -> Result<Self> {
        if probabilities.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidModel("probabilities must be positive".into()));
        }
        Self::new(
            probabilities
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("x{i}"), vec![p.ln()])),
        )
    }

    /// Use central differences of `log p` instead of the analytic score.
    pub fn with_finite_difference_score(mut self) -> Self {
        self.score_kind = ScoreKind::FiniteDifference(1e-5);
        self
    }

    fn logits(&self, theta: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coefficients.iter().map(move |c| {
            let (mut value, mut slope, mut power) = (0.0, 0.0, 1.0);
            for (j, &cj) in c.iter().enumerate() {
                value += cj * power;
                if j + 1 < c.len() {
                    slope += (j + 1) as f64 * c[j + 1] * power;
                }
                power *= theta;
            }
            (value, slope)
        })
    }

    fn log_normalizer(&self, theta: f64) -> f64 {
        let logits: Vec<f64> = self.logits(theta).map(|(v, _)| v).collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
    }
}

impl ConditionalModel for SoftmaxModel {
    fn outcome_space(&self) -> &OutcomeSpace {
        &self.space
    }

    fn log_pdf(&self, x: Outcome, theta: f64) -> f64 {
        let Outcome::Index(k) = x else { return f64::NAN };
        match self.logits(theta).nth(k) {
            Some((v, _)) => v - self.log_normalizer(theta),
            None => f64::NAN,
        }
    }

    fn score(&self, x: Outcome, theta: f64) -> f64 {
        if let ScoreKind::FiniteDifference(_) = self.score_kind {
            return central_difference_score(self, x, theta);
        }
        let Outcome::Index(k) = x else { return f64::NAN };
        let z = self.log_normalizer(theta);
        let mut mean_slope = 0.0;
        let mut own = f64::NAN;
        for (i, (v, s)) in self.logits(theta).enumerate() {
            mean_slope += (v - z).exp() * s;
            if i == k {
                own = s;
            }
        }
        own - mean_slope
    }

    fn score_kind(&self) -> ScoreKind {
        self.score_kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_outcome() -> SoftmaxModel {
        SoftmaxModel::new([
            ("a", vec![0.0, 1.0, -0.5]),
            ("b", vec![0.3, -0.7, 0.2]),
            ("c", vec![-0.2, 0.1, 0.4]),
        ])
        .unwrap()
    }

    #[test]
    fn softmax_is_normalized() {
        let m = three_outcome();
        for &t in &[-2.0, -0.3, 0.0, 0.7, 3.1] {
            let total: f64 = m.outcome_space().outcomes().into_iter().map(|x| m.pdf(x, t)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_score_matches_finite_difference() {
        let m = three_outcome();
        for &t in &[-1.5, 0.0, 0.4, 2.2] {
            for x in m.outcome_space().outcomes() {
                let a = m.score(x, t);
                let fd = central_difference_score(&m, x, t);
                assert!((a - fd).abs() <= 1e-5_f64.max(1e-4 * a.abs()), "{a} vs {fd}");
            }
        }
    }

    #[test]
    fn constant_model_has_zero_score() {
        let m = SoftmaxModel::constant(&[0.2, 0.3, 0.5]).unwrap();
        for x in m.outcome_space().outcomes() {
            assert!(m.score(x, 0.8).abs() < 1e-15);
        }
        assert!((m.pdf(Outcome::Index(1), 12.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn outcome_space_validation() {
        assert!(OutcomeSpace::discrete(Vec::<String>::new()).is_err());
        assert!(OutcomeSpace::discrete(["+", "+"]).is_err());
        assert!(OutcomeSpace::continuous(-1.0, 1.0, 2).is_err());
        let s = OutcomeSpace::discrete(["+", "-"]).unwrap();
        assert!(s.contains(Outcome::Index(1)));
        assert!(!s.contains(Outcome::Index(2)));
        assert!(!s.contains(Outcome::Value(0.0)));
        assert_eq!(s.index_of("-"), Some(Outcome::Index(1)));
        assert_eq!(s.label(Outcome::Index(0)), "+");
    }
}
