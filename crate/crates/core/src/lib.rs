//! Coarse-to-fine minimization of large discretized problems through an
//! interpolatory multiresolution ladder.
//!
//! A problem posed on the finest grid of a dyadic hierarchy is solved as a
//! sequence of auxiliary problems, one per level. At level `k` only a
//! coarse perturbation `ε^k` is optimized; it is lifted to the finest grid by
//! repeated interpolatory prediction and added to the current iterate. Any
//! black-box minimizer can be plugged in.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod mr;
pub mod objective;
pub mod optim;
pub mod problems;
pub mod scheme;
pub mod tensor;

pub use driver::{
    build_auxiliary_objective, decay_rates, estimate_decay_rates, reduce_quadratic, run_direct, run_mropt,
    DirectResult, LevelRecord, MrOptConfig, MrOptReport, Prolongation,
};
pub use error::{MrError, Result};
pub use grid::{Dim, GridHierarchy};
pub use objective::{CountedObjective, QuadraticForm};
pub use optim::{OptimStatus, Optimizer, OptimizerConfig};
pub use problems::{ProblemInstance, ProblemName};
pub use scheme::PredictionScheme;
