//! Black-box objectives with exact evaluation accounting.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{MrError, Result};
use crate::linalg::SparseMatrix;

/// `F(z) = ½ zᵀAz − bᵀz + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != b.len() {
            return Err(MrError::LengthMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        Ok(Self { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        self.a.half_quadratic(z) - self.b.iter().zip(z).map(|(b, z)| b * z).sum::<f64>() + self.c
    }

    /// `Az − b`.
    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.a.mul_vec(z)?;
        for (g, b) in g.iter_mut().zip(&self.b) {
            *g -= b;
        }
        Ok(g)
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An objective `R^dim → R` that counts every evaluation.
///
/// Clones share the evaluation function and the counter.
#[derive(Clone)]
pub struct CountedObjective {
    dim: usize,
    eval: Arc<EvalFn>,
    counter: Arc<AtomicU64>,
    quadratic: Option<Arc<QuadraticForm>>,
}

impl fmt::Debug for CountedObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CountedObjective")
            .field("dim", &self.dim)
            .field("evals", &self.evals())
            .field("quadratic", &self.quadratic.is_some())
            .finish()
    }
}

impl CountedObjective {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            dim,
            eval: Arc::new(eval),
            counter: Arc::new(AtomicU64::new(0)),
            quadratic: None,
        }
    }

    /// Objective evaluated through its quadratic form.
    pub fn from_quadratic(form: QuadraticForm) -> Self {
        let form = Arc::new(form);
        let f = Arc::clone(&form);
        let mut obj = Self::new(form.dim(), move |z| f.value(z));
        obj.quadratic = Some(form);
        obj
    }

    /// Attaches a quadratic form describing the same function.
    pub fn with_quadratic(mut self, form: QuadraticForm) -> Result<Self> {
        if form.dim() != self.dim {
            return Err(MrError::LengthMismatch {
                expected: self.dim,
                found: form.dim(),
            });
        }
        self.quadratic = Some(Arc::new(form));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn quadratic_form(&self) -> Option<&QuadraticForm> {
        self.quadratic.as_deref()
    }

    /// Evaluates and bumps the counter by one.
    pub fn eval(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(MrError::LengthMismatch {
                expected: self.dim,
                found: z.len(),
            });
        }
        self.counter.fetch_add(1, Ordering::Relaxed);
        Ok((self.eval)(z))
    }

    /// Evaluates without touching the counter. For reporting only.
    pub fn peek(&self, z: &[f64]) -> f64 {
        (self.eval)(z)
    }

    pub fn evals(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::thread;

    #[test]
    fn counter_increments_once_per_call() {
        let f = CountedObjective::new(2, |z| z[0] * z[0] + z[1]);
        assert_eq!(f.eval(&[2.0, 1.0]).unwrap(), 5.0);
        f.eval(&[0.0, 0.0]).unwrap();
        assert_eq!(f.evals(), 2);
        f.peek(&[1.0, 1.0]);
        assert_eq!(f.evals(), 2);
        assert!(f.eval(&[1.0]).is_err());
        assert_eq!(f.evals(), 2);
    }

    #[test]
    fn concurrent_counting_is_exact() {
        let f = CountedObjective::new(1, |z| z[0]);
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let f = f.clone();
                thread::spawn(move || {
                    for _ in 0..1000 {
                        f.eval(&[1.0]).unwrap();
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(f.evals(), 8000);
    }

    #[test]
    fn quadratic_form_value_and_gradient() {
        let a = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let q = QuadraticForm::new(a, vec![1.0, 0.0], 3.0).unwrap();
        // ½(2 - 4 + 8) - 1 + 3
        assert_eq!(q.value(&[1.0, 2.0]), 5.0);
        assert_eq!(q.gradient(&[1.0, 2.0]).unwrap(), vec![-1.0, 3.0]);
        let f = CountedObjective::from_quadratic(q);
        assert_eq!(f.eval(&[1.0, 2.0]).unwrap(), 5.0);
        assert!(f.quadratic_form().is_some());
    }
}
