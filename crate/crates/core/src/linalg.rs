//! Sparse symmetric storage and a banded Cholesky solver.

use crate::error::{MrError, Result};

/// Compressed-row sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(MrError::LengthMismatch {
                expected: nrows.max(ncols),
                found: r.max(c) + 1,
            });
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut m = Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut t = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(MrError::LengthMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            t.extend(row.iter().enumerate().map(|(c, v)| (r, c, *v)));
        }
        Self::from_triplets(rows.len(), ncols, t)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()).expect("in range")
    }

    fn drop_zeros(&mut self) {
        let mut ptr = vec![0; self.nrows + 1];
        let mut cols = Vec::with_capacity(self.values.len());
        let mut vals = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k] != 0.0 {
                    cols.push(self.col_idx[k]);
                    vals.push(self.values[k]);
                }
            }
            ptr[r + 1] = cols.len();
        }
        self.row_ptr = ptr;
        self.col_idx = cols;
        self.values = vals;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|(cc, _)| *cc == c).map_or(0.0, |(_, v)| v)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.ncols {
            return Err(MrError::LengthMismatch {
                expected: self.ncols,
                found: x.len(),
            });
        }
        Ok((0..self.nrows).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect())
    }

    /// `max |a_ij - a_ji|`; infinite for non-square matrices.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|i - j|` over the stored entries.
    pub fn half_bandwidth(&self) -> usize {
        self.triplets().map(|(r, c, _)| r.abs_diff(c)).max().unwrap_or(0)
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let t = keep
            .iter()
            .enumerate()
            .flat_map(|(new_r, &old_r)| {
                let map = &map;
                self.row(old_r)
                    .filter(move |(c, _)| map[*c] != usize::MAX)
                    .map(move |(c, v)| (new_r, map[c], v))
            })
            .collect();
        Self::from_triplets(keep.len(), keep.len(), t).expect("indices remapped in range")
    }

    /// `½ xᵀ A x`.
    pub fn half_quadratic(&self, x: &[f64]) -> f64 {
        0.5 * (0..self.nrows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * x[c]).sum::<f64>())
            .sum::<f64>()
    }
}

/// Cholesky factor of a symmetric positive-definite banded matrix.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    width: usize,
    /// Row `i` stores `L[i][i-width..=i]`, left-padded with zeros.
    lower: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(MrError::LengthMismatch {
                expected: n,
                found: a.ncols(),
            });
        }
        let w = a.half_bandwidth();
        let stride = w + 1;
        let mut lower = vec![0.0; n * stride];
        for (r, c, v) in a.triplets() {
            if c <= r {
                lower[r * stride + (c + w - r)] = v;
            }
        }
        let scale = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let lo = i.saturating_sub(w);
            for j in lo..=i {
                let jlo = j.saturating_sub(w).max(lo);
                let mut sum = lower[i * stride + (j + w - i)];
                for k in jlo..j {
                    sum -= lower[i * stride + (k + w - i)] * lower[j * stride + (k + w - j)];
                }
                if i == j {
                    if !(sum > 1e-14 * scale) {
                        return Err(MrError::NotPositiveDefinite { index: i, pivot: sum });
                    }
                    lower[i * stride + w] = sum.sqrt();
                } else {
                    lower[i * stride + (j + w - i)] = sum / lower[j * stride + w];
                }
            }
        }
        Ok(Self { n, width: w, lower })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(MrError::LengthMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        let (w, stride) = (self.width, self.width + 1);
        let mut y = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(w);
            let s: f64 = (lo..i).map(|k| self.lower[i * stride + (k + w - i)] * y[k]).sum();
            y[i] = (y[i] - s) / self.lower[i * stride + w];
        }
        for i in (0..self.n).rev() {
            let hi = (i + w).min(self.n - 1);
            let s: f64 = (i + 1..=hi).map(|k| self.lower[k * stride + (i + w - k)] * y[k]).sum();
            y[i] = (y[i] - s) / self.lower[i * stride + w];
        }
        Ok(y)
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`, i.e. minimizes
/// `½xᵀAx − bᵀx`.
pub fn solve_quadratic_direct(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let scale = a.triplets().map(|(_, _, v)| v.abs()).fold(0.0, f64::max).max(1.0);
    let asym = a.asymmetry();
    if asym > 1e-10 * scale {
        return Err(MrError::NotSymmetric(asym));
    }
    BandCholesky::factor(a)?.solve(b)
}
