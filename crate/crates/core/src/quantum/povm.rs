use std::fmt;

use nalgebra::DMatrix;

use super::matrix::{max_abs, trace_product, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Tolerance for POVM positivity and completeness.
const POVM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmCheck {
    Empty,
    Dimension,
    Positivity,
    Completeness,
    Labels,
}

/// One failed POVM check. `element` is `None` for whole-set checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmViolation {
    pub element: Option<usize>,
    pub check: PovmCheck,
    /// Offending magnitude: smallest eigenvalue, deviation from identity, or
    /// mismatched dimension.
    pub value: f64,
}

impl fmt::Display for PovmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = match self.element {
            Some(i) => format!("element {i}"),
            None => "povm".to_string(),
        };
        match self.check {
            PovmCheck::Empty => write!(f, "{target}: no elements"),
            PovmCheck::Dimension => write!(f, "{target}: dimension {} differs from the first element", self.value),
            PovmCheck::Positivity => write!(
                f,
                "{target}: not positive semidefinite (min eigenvalue {:e})",
                self.value
            ),
            PovmCheck::Completeness => write!(
                f,
                "{target}: elements do not sum to identity (max deviation {:e})",
                self.value
            ),
            PovmCheck::Labels => write!(f, "{target}: label count or uniqueness mismatch"),
        }
    }
}

/// A labelled set of measurement operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    labels: Vec<String>,
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    /// Builds and validates a POVM.
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, elements: Vec<HermitianMatrix>) -> Result<Self> {
        let povm = Self::unchecked(labels, elements);
        validate_povm(&povm).map_err(Error::InvalidPovm)?;
        Ok(povm)
    }

    /// Stores the operators without checking them; see [`validate_povm`].
    pub fn unchecked<S: Into<String>>(labels: impl IntoIterator<Item = S>, elements: Vec<HermitianMatrix>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            elements,
        }
    }

    /// Projective σx measurement, outcomes `+` and `-`.
    pub fn sigma_x() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_kets(
            ["+", "-"],
            &[
                [C64::new(h, 0.0), C64::new(h, 0.0)],
                [C64::new(h, 0.0), C64::new(-h, 0.0)],
            ],
        )
    }

    /// Projective σy measurement, outcomes `+i` and `-i`.
    pub fn sigma_y() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_kets(
            ["+i", "-i"],
            &[
                [C64::new(h, 0.0), C64::new(0.0, h)],
                [C64::new(h, 0.0), C64::new(0.0, -h)],
            ],
        )
    }

    /// Projective σz measurement, outcomes `0` and `1`.
    pub fn sigma_z() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self::from_kets(["0", "1"], &[[one, zero], [zero, one]])
    }

    fn from_kets(labels: [&str; 2], kets: &[[C64; 2]; 2]) -> Self {
        let elements = kets
            .iter()
            .map(|k| HermitianMatrix::projector(k).expect("2x2 projector"))
            .collect();
        Self::unchecked(labels, elements)
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, HermitianMatrix::dim)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }
}

/// Checks positivity (eigenvalues ≥ −1e-10) of every element and
/// completeness (Σ Πx = I to 1e-10 entrywise). All failures are collected.
pub fn validate_povm(povm: &Povm) -> std::result::Result<(), Vec<PovmViolation>> {
    let mut failures = Vec::new();
    let elements = povm.elements();
    if elements.is_empty() {
        failures.push(PovmViolation {
            element: None,
            check: PovmCheck::Empty,
            value: 0.0,
        });
        return Err(failures);
    }
    let labels = povm.labels();
    if labels.len() != elements.len() || (1..labels.len()).any(|i| labels[..i].contains(&labels[i])) {
        failures.push(PovmViolation {
            element: None,
            check: PovmCheck::Labels,
            value: labels.len() as f64,
        });
    }
    let dim = povm.dim();
    let mut total = DMatrix::<C64>::zeros(dim, dim);
    let mut consistent = true;
    for (i, e) in elements.iter().enumerate() {
        if e.dim() != dim {
            consistent = false;
            failures.push(PovmViolation {
                element: Some(i),
                check: PovmCheck::Dimension,
                value: e.dim() as f64,
            });
            continue;
        }
        let min = e.min_eigenvalue();
        if min < -POVM_TOLERANCE {
            failures.push(PovmViolation {
                element: Some(i),
                check: PovmCheck::Positivity,
                value: min,
            });
        }
        total += e.matrix();
    }
    if consistent {
        let deviation = max_abs(&(total - DMatrix::identity(dim, dim)));
        if deviation > POVM_TOLERANCE {
            failures.push(PovmViolation {
                element: None,
                check: PovmCheck::Completeness,
                value: deviation,
            });
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures)
    }
}

/// `Tr(Π ρ)`, clamped to `[0, 1]`.
pub fn born_probability(state: &HermitianMatrix, element: &HermitianMatrix) -> Result<f64> {
    if state.dim() != element.dim() {
        return Err(Error::DimensionMismatch(state.dim(), element.dim()));
    }
    Ok(trace_product(element.matrix(), state.matrix()).re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_measurements_are_valid() {
        for p in [Povm::sigma_x(), Povm::sigma_y(), Povm::sigma_z()] {
            assert_eq!(validate_povm(&p), Ok(()));
        }
        let half = HermitianMatrix::from_real_diagonal(&[0.5, 0.5]).unwrap();
        assert!(Povm::new(["a", "b"], vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn double_identity_fails_completeness() {
        let id = HermitianMatrix::identity(2);
        let p = Povm::unchecked(["a", "b"], vec![id.clone(), id]);
        let failures = validate_povm(&p).unwrap_err();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].check, PovmCheck::Completeness);
        assert!((failures[0].value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_element_is_named() {
        let a = HermitianMatrix::from_real_diagonal(&[1.5, 0.5]).unwrap();
        let b = HermitianMatrix::from_real_diagonal(&[-0.5, 0.5]).unwrap();
        let failures = validate_povm(&Povm::unchecked(["a", "b"], vec![a, b])).unwrap_err();
        assert_eq!(failures[0].element, Some(1));
        assert_eq!(failures[0].check, PovmCheck::Positivity);
        assert!(failures[0].to_string().contains("element 1"));
    }

    #[test]
    fn mixed_dimensions_and_empty() {
        let failures = validate_povm(&Povm::unchecked(Vec::<String>::new(), vec![])).unwrap_err();
        assert_eq!(failures[0].check, PovmCheck::Empty);
        let p = Povm::unchecked(
            ["a", "b"],
            vec![HermitianMatrix::identity(2), HermitianMatrix::zeros(3)],
        );
        let failures = validate_povm(&p).unwrap_err();
        assert_eq!(failures[0].check, PovmCheck::Dimension);
    }

    #[test]
    fn born_examples() {
        let (x, z) = (Povm::sigma_x(), Povm::sigma_z());
        let (plus, zero) = (&x.elements()[0], &z.elements()[0]);
        assert!((born_probability(plus, plus).unwrap() - 1.0).abs() < 1e-15);
        assert!((born_probability(plus, zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(born_probability(plus, &HermitianMatrix::identity(3)).is_err());
    }
}
