//! Reference black-box minimizers.

mod bfgs;
mod pattern;

pub use bfgs::{central_difference_gradient, minimize_quasi_newton};
pub use pattern::minimize_pattern_search;

use crate::error::{MrError, Result};
use crate::objective::CountedObjective;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Stop once consecutive accepted iterates differ by at most this in max-norm.
    pub tol_x: f64,
    /// Evaluation cap; `None` is unlimited.
    pub max_evals: Option<u64>,
    /// Relative central-difference step: `h_i = fd_step * max(1, |x_i|)`.
    pub fd_step: f64,
    pub initial_pattern_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            tol_x: 1e-6,
            max_evals: None,
            fd_step: 1e-6,
            initial_pattern_step: 1.0,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_tol(tol_x: f64) -> Self {
        Self {
            tol_x,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_x > 0.0) {
            return Err(MrError::InvalidConfig(format!("tol_x must be positive, got {}", self.tol_x)));
        }
        if !(self.fd_step > 0.0) || !(self.initial_pattern_step > 0.0) {
            return Err(MrError::InvalidConfig("step sizes must be positive".into()));
        }
        Ok(())
    }
}

/// Why a minimizer stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimStatus {
    Converged,
    MaxEvals,
    /// The line search could not find a finite, decreasing point.
    LineSearchFailed,
    NonFinite,
}

impl OptimStatus {
    pub fn is_failure(self) -> bool {
        matches!(self, OptimStatus::LineSearchFailed | OptimStatus::NonFinite)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OptimStatus::Converged => "converged",
            OptimStatus::MaxEvals => "max_evals",
            OptimStatus::LineSearchFailed => "line_search_failed",
            OptimStatus::NonFinite => "non_finite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub fx: f64,
    /// Objective value at the starting point.
    pub f0: f64,
    /// Counter delta on the objective during the call.
    pub evals: u64,
    pub status: OptimStatus,
}

/// Selectable minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Optimizer {
    QuasiNewton,
    PatternSearch,
}

impl Optimizer {
    pub fn minimize(self, f: &CountedObjective, x0: &[f64], config: &OptimizerConfig) -> Result<OptimResult> {
        match self {
            Optimizer::QuasiNewton => minimize_quasi_newton(f, x0, config),
            Optimizer::PatternSearch => minimize_pattern_search(f, x0, config),
        }
    }
}

pub(crate) fn check_start(f: &CountedObjective, x0: &[f64], config: &OptimizerConfig) -> Result<()> {
    config.validate()?;
    if x0.len() != f.dim() {
        return Err(MrError::LengthMismatch {
            expected: f.dim(),
            found: x0.len(),
        });
    }
    Ok(())
}

/// Tracks the evaluation budget of one optimizer call.
pub(crate) struct Budget {
    start: u64,
    cap: Option<u64>,
}

impl Budget {
    pub(crate) fn new(f: &CountedObjective, cap: Option<u64>) -> Self {
        Self { start: f.evals(), cap }
    }

    pub(crate) fn spent(&self, f: &CountedObjective) -> u64 {
        f.evals() - self.start
    }

    pub(crate) fn exhausted(&self, f: &CountedObjective) -> bool {
        self.cap.is_some_and(|c| self.spent(f) >= c)
    }
}

pub(crate) fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
