use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Largest supported Hilbert-space dimension (dense eigensolver only).
pub const MAX_DIM: usize = 16;

/// Entrywise tolerance on `A - A†`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// A dense complex Hermitian matrix of dimension at most [`MAX_DIM`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        check_shape(&m)?;
        let asym = max_abs(&(&m - m.adjoint()));
        if !(asym <= HERMITIAN_TOLERANCE) {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self(m))
    }

    /// `(m + m†) / 2`, for matrices that are Hermitian up to roundoff.
    pub fn symmetrized(m: DMatrix<C64>) -> Result<Self> {
        check_shape(&m)?;
        let h = (&m + m.adjoint()).scale(0.5);
        Ok(Self(h))
    }

    /// Row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, entries.len()));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        let d: Vec<C64> = diagonal.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    /// `|ψ⟩⟨ψ|` for the given (not necessarily normalized) vector.
    pub fn projector(ket: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(ket);
        Self::symmetrized(&v * v.adjoint())
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues and unitary eigenvector matrix (columns), unordered.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let e = self.0.clone().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0.into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }
}

fn check_shape(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 || m.nrows() > MAX_DIM {
        return Err(Error::DimensionTooLarge(m.nrows()));
    }
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("matrix entries"));
    }
    Ok(())
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Tr(A B)` without forming the product.
pub(crate) fn trace_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_non_hermitian() {
        let err = HermitianMatrix::from_rows(2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(matches!(err, Err(Error::NotHermitian(_))));
        assert!(HermitianMatrix::from_rows(2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]).is_ok());
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            HermitianMatrix::new(DMatrix::identity(17, 17)),
            Err(Error::DimensionTooLarge(17))
        ));
        assert!(HermitianMatrix::new(DMatrix::identity(16, 16)).is_ok());
        assert!(HermitianMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = HermitianMatrix::from_rows(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let (mut values, vectors) = y.eigen();
        values.sort_by(f64::total_cmp);
        assert!((values[0] + 1.0).abs() < 1e-14 && (values[1] - 1.0).abs() < 1e-14);
        let unitary = vectors.adjoint() * &vectors;
        assert!(max_abs(&(unitary - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, 0.0)]);
        let b = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, -1.0), c(1.0, 0.0), c(0.5, 0.5)]);
        let direct = (&a * &b).trace();
        assert!((trace_product(&a, &b) - direct).norm() < 1e-14);
    }
}
