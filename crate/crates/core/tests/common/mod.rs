#![allow(dead_code)]

use nalgebra::DMatrix;
use pmibound::quantum::{ClosureFamily, HermitianMatrix, Povm, C64};
use pmibound::Result;

/// Unitary `exp(iH)` for the Hermitian matrix with the given entries.
pub fn unitary(dim: usize, seed: &[f64]) -> DMatrix<C64> {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let re = seed[k % seed.len()];
            let im = if i == j { 0.0 } else { seed[(k + 1) % seed.len()] };
            h[(i, j)] = C64::new(re, im);
            h[(j, i)] = C64::new(re, -im);
            k += 2;
        }
    }
    let herm = HermitianMatrix::new(h).unwrap();
    let (values, vectors) = herm.eigen();
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        values.iter().map(|&v| C64::from_polar(1.0, v)),
    ));
    &vectors * phases * vectors.adjoint()
}

/// Two-outcome POVM `{A, I − A}` with `A = U diag(a) U†`, `a ∈ [0, 1]`.
pub fn binary_povm(dim: usize, spectrum: &[f64], seed: &[f64]) -> Povm {
    let u = unitary(dim, seed);
    let d: Vec<C64> = spectrum.iter().map(|&v| C64::new(v, 0.0)).collect();
    let a = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * u.adjoint();
    let a = HermitianMatrix::symmetrized(a).unwrap();
    let b = HermitianMatrix::symmetrized(DMatrix::identity(dim, dim) - a.matrix()).unwrap();
    Povm::new(["a", "b"], vec![a, b]).unwrap()
}

/// Projective measurement in a random basis.
pub fn projective_povm(dim: usize, seed: &[f64]) -> Povm {
    let u = unitary(dim, seed);
    let elements = (0..dim)
        .map(|k| {
            let col: Vec<C64> = u.column(k).iter().copied().collect();
            HermitianMatrix::projector(&col).unwrap()
        })
        .collect();
    Povm::new((0..dim).map(|k| format!("e{k}")), elements).unwrap()
}

/// Full-rank 3-level family `ρ(θ) = U(θ) diag(w(θ)) U(θ)†` with softmax
/// weights and a rotating eigenbasis; derivatives by central differences.
pub fn three_level_family(seed: Vec<f64>) -> ClosureFamily<impl Fn(f64) -> Result<HermitianMatrix> + Send + Sync> {
    ClosureFamily::new(3, move |theta: f64| {
        let logits = [seed[0] + seed[1] * theta, seed[2] - seed[3] * theta, 0.3 * theta.sin()];
        let z: f64 = logits.iter().map(|l| l.exp()).sum();
        let w: Vec<C64> = logits.iter().map(|l| C64::new(l.exp() / z, 0.0)).collect();
        let generator: Vec<f64> = seed[4..].iter().map(|s| s * theta).collect();
        let u = unitary(3, &generator);
        let rho = &u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(w)) * u.adjoint();
        HermitianMatrix::symmetrized(rho)
    })
}
