//! Tensor-product extension of the interpolatory transforms to `[0,1]^2`.
//!
//! Arrays are indexed `[row, col] = [y-node, x-node]`; flattening is
//! row-major everywhere in the crate.

use ndarray::{Array2, Axis};

use crate::error::{MrError, Result};
use crate::mr::{adjoint_two_level, forward_two_level, inverse_two_level, predict_two_level};
use crate::scheme::PredictionScheme;

/// Point values on a square `(J_k+1) x (J_k+1)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2Data {
    pub values: Array2<f64>,
    pub level: usize,
}

impl Grid2Data {
    pub fn new(values: Array2<f64>, level: usize) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c || r < 2 {
            return Err(MrError::LengthMismatch { expected: r, found: c });
        }
        Ok(Self { values, level })
    }

    pub fn from_flat(flat: &[f64], level: usize) -> Result<Self> {
        let side = (flat.len() as f64).sqrt().round() as usize;
        if side * side != flat.len() {
            return Err(MrError::LengthMismatch {
                expected: side * side,
                found: flat.len(),
            });
        }
        let values = Array2::from_shape_vec((side, side), flat.to_vec())
            .map_err(|e| MrError::InvalidConfig(e.to_string()))?;
        Self::new(values, level)
    }

    /// Samples `f(x, y)` on the uniform grid with `cells` cells per axis.
    pub fn sample(cells: usize, level: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let h = 1.0 / cells as f64;
        let values = Array2::from_shape_fn((cells + 1, cells + 1), |(r, c)| f(c as f64 * h, r as f64 * h));
        Self { values, level }
    }

    pub fn side(&self) -> usize {
        self.values.nrows()
    }

    pub fn cells(&self) -> usize {
        self.side() - 1
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }
}

/// The three detail blocks produced by one 2D transform step, keyed by the
/// parity of their fine (x, y) indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBlocks {
    /// Odd x, even y: `(J_c+1) x J_c`.
    pub odd_x: Array2<f64>,
    /// Even x, odd y: `J_c x (J_c+1)`.
    pub odd_y: Array2<f64>,
    /// Odd x, odd y: `J_c x J_c`.
    pub odd_xy: Array2<f64>,
}

impl DetailBlocks {
    pub fn zeros(coarse_cells: usize) -> Self {
        let j = coarse_cells;
        Self {
            odd_x: Array2::zeros((j + 1, j)),
            odd_y: Array2::zeros((j, j + 1)),
            odd_xy: Array2::zeros((j, j)),
        }
    }

    pub fn max_abs(&self) -> f64 {
        [&self.odd_x, &self.odd_y, &self.odd_xy]
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn len(&self) -> usize {
        self.odd_x.len() + self.odd_y.len() + self.odd_xy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Applies a 1D map to every row of `a`.
fn map_rows(a: &Array2<f64>, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Array2<f64>> {
    let rows: Vec<Vec<f64>> = a
        .axis_iter(Axis(0))
        .map(|row| f(&row.to_vec()))
        .collect::<Result<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((a.nrows(), width), flat).map_err(|e| MrError::InvalidConfig(e.to_string()))
}

/// Applies a 1D map to every column of `a`.
fn map_cols(a: &Array2<f64>, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Array2<f64>> {
    Ok(map_rows(&a.t().to_owned(), f)?.t().as_standard_layout().into_owned())
}

fn forward_rows(a: &Array2<f64>, scheme: &PredictionScheme) -> Result<(Array2<f64>, Array2<f64>)> {
    // transform each row, then separate coarse samples from details
    let packed = map_rows(a, |row| {
        let (c, d) = forward_two_level(row, scheme)?;
        Ok(c.into_iter().chain(d).collect())
    })?;
    let split = a.ncols() / 2 + 1;
    let coarse = packed.slice(ndarray::s![.., ..split]).to_owned();
    let detail = packed.slice(ndarray::s![.., split..]).to_owned();
    Ok((coarse, detail))
}

fn inverse_rows(coarse: &Array2<f64>, detail: &Array2<f64>, scheme: &PredictionScheme) -> Result<Array2<f64>> {
    if coarse.nrows() != detail.nrows() {
        return Err(MrError::LengthMismatch {
            expected: coarse.nrows(),
            found: detail.nrows(),
        });
    }
    let joined = ndarray::concatenate(Axis(1), &[coarse.view(), detail.view()])
        .map_err(|e| MrError::InvalidConfig(e.to_string()))?;
    let split = coarse.ncols();
    map_rows(&joined, |row| inverse_two_level(&row[..split], &row[split..], scheme))
}

/// One tensor-product analysis step: rows first, then columns of both halves.
pub fn forward_two_level_2d(fine: &Grid2Data, scheme: &PredictionScheme) -> Result<(Grid2Data, DetailBlocks)> {
    if fine.level == 0 {
        return Err(MrError::InvalidConfig("cannot coarsen level 0".into()));
    }
    let (cx, dx) = forward_rows(&fine.values, scheme)?;
    let (coarse, odd_y) = forward_rows(&cx.t().to_owned(), scheme)?;
    let (odd_x, odd_xy) = forward_rows(&dx.t().to_owned(), scheme)?;
    let std = |a: Array2<f64>| a.t().as_standard_layout().into_owned();
    Ok((
        Grid2Data {
            values: std(coarse),
            level: fine.level - 1,
        },
        DetailBlocks {
            odd_x: std(odd_x),
            odd_y: std(odd_y),
            odd_xy: std(odd_xy),
        },
    ))
}

pub fn inverse_two_level_2d(
    coarse: &Grid2Data,
    details: &DetailBlocks,
    scheme: &PredictionScheme,
) -> Result<Grid2Data> {
    let j = coarse.cells();
    let expect = DetailBlocks::zeros(j);
    for (have, want) in [
        (&details.odd_x, &expect.odd_x),
        (&details.odd_y, &expect.odd_y),
        (&details.odd_xy, &expect.odd_xy),
    ] {
        if have.dim() != want.dim() {
            return Err(MrError::LengthMismatch {
                expected: want.len(),
                found: have.len(),
            });
        }
    }
    let cx = inverse_rows(&coarse.values.t().to_owned(), &details.odd_y.t().to_owned(), scheme)?;
    let dx = inverse_rows(&details.odd_x.t().to_owned(), &details.odd_xy.t().to_owned(), scheme)?;
    let values = inverse_rows(
        &cx.t().as_standard_layout().into_owned(),
        &dx.t().as_standard_layout().into_owned(),
        scheme,
    )?;
    Ok(Grid2Data {
        values,
        level: coarse.level + 1,
    })
}

/// Two-level tensor prediction (x direction, then y).
pub fn predict_two_level_2d(coarse: &Grid2Data, scheme: &PredictionScheme) -> Result<Grid2Data> {
    let rows = map_rows(&coarse.values, |r| predict_two_level(r, scheme))?;
    let values = map_cols(&rows, |c| predict_two_level(c, scheme))?;
    Ok(Grid2Data {
        values,
        level: coarse.level + 1,
    })
}

pub fn predict_multilevel_2d(coarse: &Grid2Data, target: usize, scheme: &PredictionScheme) -> Result<Grid2Data> {
    if target < coarse.level {
        return Err(MrError::InvalidConfig(format!(
            "target level {target} below source level {}",
            coarse.level
        )));
    }
    let mut g = coarse.clone();
    while g.level < target {
        g = predict_two_level_2d(&g, scheme)?;
    }
    Ok(g)
}

/// Transpose of [`predict_two_level_2d`].
pub fn adjoint_two_level_2d(fine: &Grid2Data, scheme: &PredictionScheme) -> Result<Grid2Data> {
    if fine.level == 0 {
        return Err(MrError::InvalidConfig("cannot coarsen level 0".into()));
    }
    let cols = map_cols(&fine.values, |c| adjoint_two_level(c, scheme))?;
    let values = map_rows(&cols, |r| adjoint_two_level(r, scheme))?;
    Ok(Grid2Data {
        values,
        level: fine.level - 1,
    })
}

/// Multiscale representation of a 2D grid: coarse block plus per-level details.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiResData2 {
    pub coarse: Grid2Data,
    /// `details[j]` holds the blocks between levels `base + j` and `base + j + 1`.
    pub details: Vec<DetailBlocks>,
}

impl MultiResData2 {
    pub fn scalar_count(&self) -> usize {
        self.coarse.values.len() + self.details.iter().map(DetailBlocks::len).sum::<usize>()
    }
}

pub fn forward_full_2d(z: &Grid2Data, base_level: usize, scheme: &PredictionScheme) -> Result<MultiResData2> {
    if base_level > z.level {
        return Err(MrError::InvalidConfig(format!(
            "base level {base_level} above data level {}",
            z.level
        )));
    }
    let mut coarse = z.clone();
    let mut details = Vec::new();
    while coarse.level > base_level {
        let (c, d) = forward_two_level_2d(&coarse, scheme)?;
        details.push(d);
        coarse = c;
    }
    details.reverse();
    Ok(MultiResData2 { coarse, details })
}

pub fn inverse_full_2d(rep: &MultiResData2, scheme: &PredictionScheme) -> Result<Grid2Data> {
    rep.details
        .iter()
        .try_fold(rep.coarse.clone(), |g, d| inverse_two_level_2d(&g, d, scheme))
}
