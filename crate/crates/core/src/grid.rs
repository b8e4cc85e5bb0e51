//! Nested dyadic grids on `[0,1]` and `[0,1]^2`.

use crate::error::{MrError, Result};
use crate::scheme::PredictionScheme;

/// Spatial dimension of a hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Ladder of nested uniform meshes. Level `k` has `j0 * 2^k` cells, so
/// `j0 * 2^k + 1` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridHierarchy {
    j0: usize,
    levels: usize,
    dim: Dim,
}

impl GridHierarchy {
    /// `levels` is the number of refinements above the coarsest grid. A
    /// ladder with `levels == 0` is the degenerate single-grid case.
    pub fn new(j0: usize, levels: usize, dim: Dim) -> Result<Self> {
        if j0 == 0 {
            return Err(MrError::InvalidConfig("j0 must be positive".into()));
        }
        if levels > 24 {
            return Err(MrError::InvalidConfig(format!("{levels} levels is too many")));
        }
        Ok(Self { j0, levels, dim })
    }

    /// Checks that every level carries the boundary stencils of `scheme`.
    pub fn check_scheme(&self, scheme: &PredictionScheme) -> Result<()> {
        if self.j0 < scheme.degree() {
            return Err(MrError::UnsupportedGrid {
                cells: self.j0,
                degree: scheme.degree(),
            });
        }
        Ok(())
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    /// Index of the finest level, `L`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Cell count `J_k` along one axis.
    pub fn cells(&self, level: usize) -> usize {
        self.j0 << level
    }

    /// Node count `J_k + 1` along one axis.
    pub fn points(&self, level: usize) -> usize {
        self.cells(level) + 1
    }

    /// Total number of values `N_k` stored at `level`.
    pub fn len(&self, level: usize) -> usize {
        self.points(level).pow(self.dim.as_usize() as u32)
    }

    pub fn finest_len(&self) -> usize {
        self.len(self.levels)
    }

    pub fn spacing(&self, level: usize) -> f64 {
        1.0 / self.cells(level) as f64
    }

    /// Flat index at the finest level of the node that coarse index `idx`
    /// at `level` sits on.
    pub fn fine_image(&self, level: usize, idx: usize) -> usize {
        let stride = 1usize << (self.levels - level);
        match self.dim {
            Dim::One => idx * stride,
            Dim::Two => {
                let side = self.points(level);
                let fine_side = self.points(self.levels);
                let (row, col) = (idx / side, idx % side);
                row * stride * fine_side + col * stride
            }
        }
    }

    /// Flat indices of the outer boundary (both end points in 1D, the ring in 2D).
    pub fn boundary_indices(&self, level: usize) -> Vec<usize> {
        let j = self.cells(level);
        match self.dim {
            Dim::One => vec![0, j],
            Dim::Two => {
                let side = j + 1;
                (0..side * side)
                    .filter(|&p| {
                        let (r, c) = (p / side, p % side);
                        r == 0 || c == 0 || r == j || c == j
                    })
                    .collect()
            }
        }
    }
}
