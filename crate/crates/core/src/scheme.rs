//! Deslauriers–Dubuc style interpolatory prediction rules of odd degree.

use crate::error::{MrError, Result};

/// A linear interpolatory prediction rule of degree `n ∈ {1, 3, 5}`.
///
/// Odd fine values are predicted from the `n + 1` coarse values closest to
/// them: a centered stencil in the interior and one-sided rows near the
/// ends of the interval. All weights are dyadic rationals and therefore
/// exact in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionScheme {
    degree: usize,
    /// `β_1..β_r`, `r = (n+1)/2`.
    betas: Vec<f64>,
    /// Full centered stencil `[β_r, .., β_1, β_1, .., β_r]`.
    interior: Vec<f64>,
    /// Rows for fine indices 1, 3, .. at the left end.
    left_rows: Vec<Vec<f64>>,
    /// Mirror images of `left_rows`, for fine indices 2J-1, 2J-3, ..
    right_rows: Vec<Vec<f64>>,
}

impl PredictionScheme {
    pub fn new(degree: usize) -> Result<Self> {
        let (betas, left_rows): (Vec<f64>, Vec<Vec<f64>>) = match degree {
            1 => (vec![0.5], vec![]),
            3 => (
                vec![9.0 / 16.0, -1.0 / 16.0],
                vec![vec![5.0 / 16.0, 15.0 / 16.0, -5.0 / 16.0, 1.0 / 16.0]],
            ),
            5 => (
                vec![150.0 / 256.0, -25.0 / 256.0, 3.0 / 256.0],
                vec![
                    vec![
                        63.0 / 256.0,
                        315.0 / 256.0,
                        -105.0 / 128.0,
                        63.0 / 128.0,
                        -45.0 / 256.0,
                        7.0 / 256.0,
                    ],
                    vec![
                        -7.0 / 256.0,
                        105.0 / 256.0,
                        105.0 / 128.0,
                        -35.0 / 128.0,
                        21.0 / 256.0,
                        -3.0 / 256.0,
                    ],
                ],
            ),
            other => return Err(MrError::InvalidDegree(other)),
        };
        let interior = betas.iter().rev().chain(betas.iter()).copied().collect();
        let right_rows = left_rows
            .iter()
            .map(|row| row.iter().rev().copied().collect())
            .collect();
        Ok(Self {
            degree,
            betas,
            interior,
            left_rows,
            right_rows,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn interior_weights(&self) -> &[f64] {
        &self.betas
    }

    pub fn left_boundary_rows(&self) -> &[Vec<f64>] {
        &self.left_rows
    }

    /// Half-width `r = (n+1)/2` of the centered stencil.
    fn reach(&self) -> usize {
        self.degree.div_ceil(2)
    }

    /// Stencil predicting fine value `2i - 1` (`1 ≤ i ≤ cells`) on a coarse
    /// grid with `cells` cells. Returns the first coarse index and the
    /// `n + 1` weights applied to consecutive coarse values from there.
    pub fn odd_stencil(&self, i: usize, cells: usize) -> (usize, &[f64]) {
        debug_assert!(i >= 1 && i <= cells && cells >= self.degree);
        let r = self.reach();
        if i < r {
            (0, &self.left_rows[i - 1])
        } else if i + r > cells + 1 {
            (cells - self.degree, &self.right_rows[cells - i])
        } else {
            (i - r, &self.interior)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lagrange weights for evaluating at `x` from nodes `0..=n`.
    fn lagrange_weights(x: f64, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|j| {
                (0..=n)
                    .filter(|&m| m != j)
                    .map(|m| (x - m as f64) / (j as f64 - m as f64))
                    .product()
            })
            .collect()
    }

    #[test]
    fn rows_reproduce_constants() {
        for n in [1, 3, 5] {
            let s = PredictionScheme::new(n).unwrap();
            assert_eq!(2.0 * s.interior_weights().iter().sum::<f64>(), 1.0);
            for row in s.left_boundary_rows() {
                assert_eq!(row.len(), n + 1);
                assert_eq!(row.iter().sum::<f64>(), 1.0);
            }
            assert_eq!(s.left_boundary_rows().len(), (n - 1) / 2);
        }
    }

    #[test]
    fn weights_match_lagrange_interpolation() {
        for n in [1, 3, 5] {
            let s = PredictionScheme::new(n).unwrap();
            // interior point sits halfway between the two middle nodes
            let lw = lagrange_weights((n as f64) / 2.0, n);
            let (_, w) = s.odd_stencil(s.reach(), 2 * n);
            for (a, b) in w.iter().zip(&lw) {
                assert!((a - b).abs() < 1e-15, "n={n}: {a} vs {b}");
            }
            for (row, x) in s.left_boundary_rows().iter().zip([0.5, 1.5]) {
                let lw = lagrange_weights(x, n);
                for (a, b) in row.iter().zip(&lw) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn stencil_positions() {
        let s = PredictionScheme::new(3).unwrap();
        assert_eq!(s.odd_stencil(1, 8).0, 0);
        assert_eq!(s.odd_stencil(2, 8).0, 0);
        assert_eq!(s.odd_stencil(7, 8).0, 5);
        let (start, w) = s.odd_stencil(8, 8);
        assert_eq!(start, 5);
        assert_eq!(w, &[1.0 / 16.0, -5.0 / 16.0, 15.0 / 16.0, 5.0 / 16.0]);

        let s5 = PredictionScheme::new(5).unwrap();
        assert_eq!(s5.odd_stencil(3, 8).0, 0);
        assert_eq!(s5.odd_stencil(6, 8).0, 3);
        assert_eq!(s5.odd_stencil(7, 8), (3, &s5.right_rows[1][..]));
        assert_eq!(s5.odd_stencil(8, 8), (3, &s5.right_rows[0][..]));
    }

    #[test]
    fn rejects_even_degree() {
        assert_eq!(PredictionScheme::new(2), Err(MrError::InvalidDegree(2)));
    }
}
