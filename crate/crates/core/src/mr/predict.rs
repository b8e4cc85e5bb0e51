use crate::error::{MrError, Result};
use crate::mr::cells_of;
use crate::scheme::PredictionScheme;

fn check_coarse(len: usize, scheme: &PredictionScheme) -> Result<usize> {
    let cells = cells_of(len)?;
    if cells < scheme.degree() {
        return Err(MrError::UnsupportedGrid {
            cells,
            degree: scheme.degree(),
        });
    }
    Ok(cells)
}

/// Predicts level `k` values from level `k-1` values.
///
/// Even fine entries copy the coarse data; odd entries are filled by the
/// scheme's interpolating stencils.
pub fn predict_two_level(coarse: &[f64], scheme: &PredictionScheme) -> Result<Vec<f64>> {
    let cells = check_coarse(coarse.len(), scheme)?;
    let mut fine = vec![0.0; 2 * cells + 1];
    predict_into(coarse, scheme, cells, &mut fine);
    Ok(fine)
}

pub(crate) fn predict_into(coarse: &[f64], scheme: &PredictionScheme, cells: usize, fine: &mut [f64]) {
    for (i, c) in coarse.iter().enumerate() {
        fine[2 * i] = *c;
    }
    for i in 1..=cells {
        let (start, w) = scheme.odd_stencil(i, cells);
        fine[2 * i - 1] = w
            .iter()
            .zip(&coarse[start..start + w.len()])
            .map(|(a, b)| a * b)
            .sum();
    }
}

/// Transpose of [`predict_two_level`]: maps a level `k` vector to level `k-1`.
pub fn adjoint_two_level(fine: &[f64], scheme: &PredictionScheme) -> Result<Vec<f64>> {
    let fine_cells = cells_of(fine.len())?;
    if fine_cells % 2 != 0 {
        return Err(MrError::NotDyadic { cells: fine_cells });
    }
    let cells = check_coarse(fine_cells / 2 + 1, scheme)?;
    let mut coarse = vec![0.0; cells + 1];
    adjoint_into(fine, scheme, cells, &mut coarse);
    Ok(coarse)
}

pub(crate) fn adjoint_into(fine: &[f64], scheme: &PredictionScheme, cells: usize, coarse: &mut [f64]) {
    for (i, c) in coarse.iter_mut().enumerate() {
        *c = fine[2 * i];
    }
    for i in 1..=cells {
        let (start, w) = scheme.odd_stencil(i, cells);
        let v = fine[2 * i - 1];
        for (c, a) in coarse[start..start + w.len()].iter_mut().zip(w) {
            *c += a * v;
        }
    }
}

/// Applies `levels` successive two-level predictions (`P_ℓ^{ℓ+levels}`).
pub fn predict_multilevel(coarse: &[f64], levels: usize, scheme: &PredictionScheme) -> Result<Vec<f64>> {
    let mut v = coarse.to_vec();
    for _ in 0..levels {
        v = predict_two_level(&v, scheme)?;
    }
    Ok(v)
}

/// Transpose of [`predict_multilevel`].
pub fn adjoint_multilevel(fine: &[f64], levels: usize, scheme: &PredictionScheme) -> Result<Vec<f64>> {
    let mut v = fine.to_vec();
    for _ in 0..levels {
        v = adjoint_two_level(&v, scheme)?;
    }
    Ok(v)
}
