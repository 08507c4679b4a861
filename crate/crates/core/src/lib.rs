//! Pointwise mutual information bounds for classical and quantum parametric
//! models.
//!
//! The crate evaluates the pointwise mutual information `i(x,θ)`, the
//! stochastic Fisher information `ι(x,θ)`, and a family of trajectory-level
//! upper bounds on `i(x,θ)` built from an arbitrary weight `f(θ)`. Averaging
//! the pointwise bounds over the joint distribution recovers an
//! ensemble-level bound on the mutual information, which [`bounds::mi_chain`]
//! checks numerically.
//!
//! All integrals use composite trapezoid quadrature on uniform grids
//! ([`ParameterGrid`]).

// NaN must fail range checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod error;
pub mod grid;
pub mod info;
pub mod model;
pub mod prior;
pub mod quantum;
pub mod report;
pub mod scenarios;
pub mod weight;

pub use bounds::{
    bound_general, bound_theorem1, bound_theorem2, evaluate_bound, lambda_general, mi_bound_average, mi_chain,
    verify_bound_sweep, BoundKind, BoundReport, MiChain, Sweep, SweepSummary,
};
pub use error::{Error, Result};
pub use grid::{quadrature, ParameterGrid, DEFAULT_GRID_POINTS};
pub use info::{fisher_information, marginal, mutual_information, pmi, sfi, surprisal};
pub use model::{ConditionalModel, Outcome, OutcomeSpace, ScoreKind, SoftmaxModel};
pub use prior::{Prior, SupportKind};
pub use weight::{WeightFunction, WeightKind};
