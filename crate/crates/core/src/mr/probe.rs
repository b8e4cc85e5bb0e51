use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MrError, Result};
use crate::grid::GridHierarchy;
use crate::mr::{max_abs, predict_multilevel};
use crate::scheme::PredictionScheme;

/// Samples the limit basis function attached to coarse node `index` of a
/// grid with `cells` cells, after `refinements` predictions.
pub fn sample_limit_basis(
    cells: usize,
    index: usize,
    refinements: usize,
    scheme: &PredictionScheme,
) -> Result<Vec<f64>> {
    if refinements == 0 {
        return Err(MrError::InvalidConfig("limit basis needs at least one refinement".into()));
    }
    if index > cells {
        return Err(MrError::LengthMismatch {
            expected: cells + 1,
            found: index + 1,
        });
    }
    let mut delta = vec![0.0; cells + 1];
    delta[index] = 1.0;
    predict_multilevel(&delta, refinements, scheme)
}

/// Empirical bounds on `‖P_ℓ^k ε‖_∞ / ‖ε‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityEstimate {
    pub lower: f64,
    pub upper: f64,
}

/// Probes the two-sided stability of multilevel prediction over every level
/// pair `ℓ < k ≤ L` of `hierarchy`.
///
/// Each pair is probed with `trials` uniform random vectors, every canonical
/// vector, and the sign pattern of the row of `P_ℓ^k` with the largest
/// absolute sum (the vector realizing the operator's max-norm).
pub fn property_s_probe(
    scheme: &PredictionScheme,
    hierarchy: &GridHierarchy,
    trials: usize,
    seed: u64,
) -> Result<StabilityEstimate> {
    if trials == 0 {
        return Err(MrError::InvalidConfig("trials must be at least 1".into()));
    }
    hierarchy.check_scheme(scheme)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut est = StabilityEstimate {
        lower: f64::INFINITY,
        upper: 0.0,
    };
    let record = |eps: &[f64], levels: usize, est: &mut StabilityEstimate| -> Result<Vec<f64>> {
        let fine = predict_multilevel(eps, levels, scheme)?;
        let ratio = max_abs(&fine) / max_abs(eps);
        est.lower = est.lower.min(ratio);
        est.upper = est.upper.max(ratio);
        Ok(fine)
    };

    for from in 0..hierarchy.levels() {
        let len = hierarchy.points(from);
        for to in from + 1..=hierarchy.levels() {
            let levels = to - from;
            for _ in 0..trials {
                let eps: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
                record(&eps, levels, &mut est)?;
            }
            let fine_len = hierarchy.points(to);
            let mut columns = Vec::with_capacity(len);
            for j in 0..len {
                let mut delta = vec![0.0; len];
                delta[j] = 1.0;
                columns.push(record(&delta, levels, &mut est)?);
            }
            let worst_row = (0..fine_len)
                .max_by(|&a, &b| {
                    let sa: f64 = columns.iter().map(|c| c[a].abs()).sum();
                    let sb: f64 = columns.iter().map(|c| c[b].abs()).sum();
                    sa.total_cmp(&sb)
                })
                .unwrap_or(0);
            let signs: Vec<f64> = columns
                .iter()
                .map(|c| if c[worst_row] < 0.0 { -1.0 } else { 1.0 })
                .collect();
            record(&signs, levels, &mut est)?;
        }
    }
    Ok(est)
}
