use crate::error::Result;
use crate::objective::CountedObjective;
use crate::optim::{check_start, Budget, OptimResult, OptimStatus, OptimizerConfig};

/// Coordinate pattern search.
///
/// Each poll evaluates `x ± step·e_i` for every coordinate and moves to the
/// best strictly improving point. A poll with no improvement halves the
/// step; the search ends once the step is at most `tol_x`. Non-finite
/// values never count as improvements.
pub fn minimize_pattern_search(
    f: &CountedObjective,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimResult> {
    check_start(f, x0, config)?;
    let budget = Budget::new(f, config.max_evals);
    let mut x = x0.to_vec();
    let f0 = f.eval(&x)?;
    let mut fx = if f0.is_finite() { f0 } else { f64::INFINITY };
    let mut step = config.initial_pattern_step;
    let mut status = OptimStatus::Converged;

    'outer: while step > config.tol_x {
        let mut best: Option<(usize, f64, f64)> = None;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                if budget.exhausted(f) {
                    status = OptimStatus::MaxEvals;
                    break 'outer;
                }
                let old = x[i];
                x[i] = old + dir * step;
                let v = f.eval(&x)?;
                x[i] = old;
                let v = if v.is_finite() { v } else { f64::INFINITY };
                if v < best.map_or(fx, |b| b.2) {
                    best = Some((i, dir, v));
                }
            }
        }
        match best {
            Some((i, dir, v)) => {
                x[i] += dir * step;
                fx = v;
            }
            None => step *= 0.5,
        }
    }
    if !fx.is_finite() && status == OptimStatus::Converged {
        status = OptimStatus::NonFinite;
    }
    Ok(OptimResult {
        x,
        fx,
        f0,
        evals: budget.spent(f),
        status,
    })
}
