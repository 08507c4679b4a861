//! Density-matrix families, POVMs, the symmetric logarithmic derivative and
//! the conditional quantum Fisher information.
//!
//! [`QuantumConditionalModel`] turns a state family and a POVM into a
//! [`ConditionalModel`](crate::model::ConditionalModel) through the Born rule
//! and supplies the conditional QFI as the sensitivity for the quantum bounds.

mod family;
mod matrix;
mod model;
mod povm;
mod sld;

pub use family::{
    central_difference_drho, check_state, ClosureFamily, ConstantFamily, DerivativeKind, DiagonalFamily,
    QubitPhaseFamily, StateFamily, FD_STEP,
};
pub use matrix::{HermitianMatrix, C64, HERMITIAN_TOLERANCE, MAX_DIM};
pub use model::QuantumConditionalModel;
pub use povm::{born_probability, validate_povm, Povm, PovmCheck, PovmViolation};
pub use sld::{cqfi, cqfi_detailed, qfi, sld, sld_residual, CqfiValue, SldSolution, RANK_EPSILON};
