//! One-dimensional interpolatory multiresolution: decimation, prediction,
//! two-level and full transforms, and stability probes.
//!
//! Vectors at level `k` hold point values on `J_k + 1` equispaced nodes of
//! `[0,1]`. All lengths are inferred from the input slices.

mod predict;
mod probe;
mod transform;

pub use predict::{
    adjoint_multilevel, adjoint_two_level, predict_multilevel, predict_two_level,
};
pub use probe::{property_s_probe, sample_limit_basis, StabilityEstimate};
pub use transform::{
    decimate, forward_full, forward_two_level, inverse_full, inverse_two_level, MultiResData,
};

use crate::error::{MrError, Result};

/// Cell count of a grid with `len` nodes.
pub(crate) fn cells_of(len: usize) -> Result<usize> {
    if len < 2 {
        return Err(MrError::LengthMismatch {
            expected: 2,
            found: len,
        });
    }
    Ok(len - 1)
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
