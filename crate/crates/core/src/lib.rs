//! Optimal kernel-sum classification toolkit.
//!
//! This crate solves the dual kernel SVM, the nonnegatively-constrained
//! concave QP `max ||α||₁ − ½αᵀK̃α` over labeled kernel matrices K̃, and
//! certifies every solution through its KKT residuals. On top of the
//! solver it provides:
//!
//! - the contraction bounds on optimal quadratic forms under kernel sums
//!   (⅓/⅔ two-kernel forms, m^(−log₂3)/m^(−log₂(3/2)) m-kernel forms),
//! - closed-form complexity bounds (kernel-sum and subset-learning),
//! - Monte-Carlo estimators for the random-sign quadratic-form quantities
//!   behind those bounds, with exact enumeration oracles,
//! - a reproducible Gaussian-mixture generator and a prefix-sum experiment
//!   runner that plots the empirical quadratic form against the bounds.
//!
//! Everything randomized runs on a fixed, seeded generator
//! ([`rng::Xoshiro256PlusPlus`]), so results are bit-reproducible.
//!
//! Start with the runnable examples (`cargo run --example solve_dual`) or
//! the `ksb` binary (`ksb experiment --config configs/default-experiment.json`).

pub mod bounds;
pub mod config;
pub mod instances;
pub mod kernels;
pub mod parallel;
pub mod plot;
pub mod qp;
pub mod rademacher;
pub mod rng;
pub mod runner;
pub mod synth;

pub use bounds::{BoundError, BoundReport};
pub use config::{ConfigError, ExperimentConfig, SolveMode};
pub use kernels::{Dataset, KernelError, KernelSpec, LabeledKernelMatrix};
pub use qp::{DualSolution, KktReport, SolveError};
pub use rademacher::RademacherEstimate;
pub use runner::{RunError, VerifyConfig};
pub use synth::MixtureConfig;
