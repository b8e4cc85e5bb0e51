use crate::error::Result;
use crate::objective::CountedObjective;
use crate::optim::{check_start, inf_norm_diff, Budget, OptimResult, OptimStatus, OptimizerConfig};

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// Central-difference gradient, `2·dim` evaluations.
pub fn central_difference_gradient(f: &CountedObjective, x: &[f64], rel_step: f64) -> Result<Vec<f64>> {
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = rel_step * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let up = f.eval(&probe)?;
        probe[i] = x[i] - h;
        let down = f.eval(&probe)?;
        probe[i] = x[i];
        g.push((up - down) / (2.0 * h));
    }
    Ok(g)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense inverse-Hessian approximation, row-major.
struct InverseHessian {
    n: usize,
    h: Vec<f64>,
    scaled: bool,
}

impl InverseHessian {
    fn identity(n: usize) -> Self {
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
        Self { n, h, scaled: false }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.h.chunks_exact(self.n).map(|row| dot(row, v)).collect()
    }

    /// BFGS update with the pair `(s, y)`; skipped when curvature fails.
    fn update(&mut self, s: &[f64], y: &[f64]) {
        let sy = dot(s, y);
        if !(sy > 1e-12 * dot(s, s).sqrt() * dot(y, y).sqrt()) {
            return;
        }
        if !self.scaled {
            let gamma = sy / dot(y, y);
            self.h.iter_mut().for_each(|v| *v *= gamma);
            self.scaled = true;
        }
        let hy = self.apply(y);
        let yhy = dot(y, &hy);
        let rho = 1.0 / sy;
        let coef = (1.0 + rho * yhy) * rho;
        let n = self.n;
        for i in 0..n {
            let row = &mut self.h[i * n..(i + 1) * n];
            for j in 0..n {
                row[j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
    }
}

/// BFGS with an Armijo backtracking line search (halving) and central
/// finite-difference gradients.
///
/// Stops when consecutive accepted iterates differ by at most `tol_x` in
/// max-norm, when the step the line search would take has already shrunk
/// below `tol_x`, or when the estimated gradient vanishes.
pub fn minimize_quasi_newton(
    f: &CountedObjective,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimResult> {
    check_start(f, x0, config)?;
    let budget = Budget::new(f, config.max_evals);
    let n = x0.len();
    let mut x = x0.to_vec();
    let f0 = f.eval(&x)?;
    let mut fx = f0;
    let finish = |x: Vec<f64>, fx: f64, status: OptimStatus| OptimResult {
        x,
        fx,
        f0,
        evals: budget.spent(f),
        status,
    };
    if !f0.is_finite() {
        return Ok(finish(x, fx, OptimStatus::NonFinite));
    }
    if n == 0 {
        return Ok(finish(x, fx, OptimStatus::Converged));
    }
    let mut g = central_difference_gradient(f, &x, config.fd_step)?;
    let mut hinv = InverseHessian::identity(n);

    loop {
        if budget.exhausted(f) {
            return Ok(finish(x, fx, OptimStatus::MaxEvals));
        }
        if g.iter().all(|v| *v == 0.0) {
            return Ok(finish(x, fx, OptimStatus::Converged));
        }
        let mut p: Vec<f64> = hinv.apply(&g).iter().map(|v| -v).collect();
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            hinv = InverseHessian::identity(n);
            p = g.iter().map(|v| -v).collect();
            slope = dot(&g, &p);
        }
        let p_norm = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let mut t = 1.0;
        let mut accepted = None;
        let mut saw_non_finite = false;
        for _ in 0..=MAX_HALVINGS {
            if t * p_norm <= config.tol_x {
                // further backtracking cannot move the iterate by more than tol_x
                return Ok(finish(x, fx, OptimStatus::Converged));
            }
            if budget.exhausted(f) {
                return Ok(finish(x, fx, OptimStatus::MaxEvals));
            }
            let trial: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + t * b).collect();
            let ft = f.eval(&trial)?;
            if !ft.is_finite() {
                saw_non_finite = true;
            } else if ft <= fx + ARMIJO_C * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            let status = if saw_non_finite {
                OptimStatus::NonFinite
            } else {
                OptimStatus::LineSearchFailed
            };
            return Ok(finish(x, fx, status));
        };

        let moved = inf_norm_diff(&x_new, &x);
        if moved <= config.tol_x {
            return Ok(finish(x_new, f_new, OptimStatus::Converged));
        }
        let g_new = central_difference_gradient(f, &x_new, config.fd_step)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        hinv.update(&s, &y);
        x = x_new;
        fx = f_new;
        g = g_new;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{solve_quadratic_direct, SparseMatrix};
    use crate::objective::QuadraticForm;

    #[test]
    fn bowl() {
        let f = CountedObjective::new(4, |x| x.iter().map(|v| v * v).sum());
        let r = minimize_quasi_newton(&f, &[1.0; 4], &OptimizerConfig::with_tol(1e-8)).unwrap();
        assert!(r.x.iter().all(|v| v.abs() <= 1e-6));
        assert_eq!(r.status, OptimStatus::Converged);
        assert_eq!(r.evals, f.evals());
    }

    #[test]
    fn rosenbrock() {
        let f = CountedObjective::new(2, |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2));
        let r = minimize_quasi_newton(&f, &[-1.2, 1.0], &OptimizerConfig::with_tol(1e-10)).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!(r.fx <= r.f0);
    }

    #[test]
    fn bvp_quadratic_matches_linear_solve() {
        let j = 16usize;
        let jj = (j * j) as f64;
        let n = j - 1;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 * jj + 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -jj));
                t.push((i + 1, i, -jj));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, t).unwrap();
        let b: Vec<f64> = (1..j).map(|i| 50.0 * (i as f64 / j as f64 * 5.0).cos()).collect();
        let exact = solve_quadratic_direct(&a, &b).unwrap();
        let f = CountedObjective::from_quadratic(QuadraticForm::new(a, b, 0.0).unwrap());
        let r = minimize_quasi_newton(&f, &vec![0.0; n], &OptimizerConfig::with_tol(1e-6)).unwrap();
        let err = r.x.iter().zip(&exact).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-4, "{err}");
    }

    #[test]
    fn gradient_matches_quadratic_form() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, -1.0], vec![0.0, -1.0, 2.0]]).unwrap();
        let q = QuadraticForm::new(a, vec![1.0, -2.0, 0.5], 0.0).unwrap();
        let x = [0.3, -0.7, 1.1];
        let exact = q.gradient(&x).unwrap();
        let f = CountedObjective::from_quadratic(q);
        let g = central_difference_gradient(&f, &x, 1e-6).unwrap();
        for (a, b) in g.iter().zip(&exact) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0));
        }
        assert_eq!(f.evals(), 6);
    }

    #[test]
    fn nan_start_is_reported() {
        let f = CountedObjective::new(1, |_| f64::NAN);
        let r = minimize_quasi_newton(&f, &[0.0], &OptimizerConfig::default()).unwrap();
        assert_eq!(r.status, OptimStatus::NonFinite);
    }

    #[test]
    fn deterministic_counts() {
        let mk = || CountedObjective::new(3, |x| (x[0] - 1.0).powi(4) + (x[1] + x[0]).powi(2) + x[2].cosh());
        let a = minimize_quasi_newton(&mk(), &[0.0; 3], &OptimizerConfig::with_tol(1e-7)).unwrap();
        let b = minimize_quasi_newton(&mk(), &[0.0; 3], &OptimizerConfig::with_tol(1e-7)).unwrap();
        assert_eq!(a, b);
    }
}
