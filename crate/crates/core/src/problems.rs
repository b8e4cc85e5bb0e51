//! Benchmark objectives: a 1D boundary value problem, the 2D Poisson
//! equation, the minimal surface problem and MOREBV.
//!
//! Objectives take full finest-level vectors (boundary included). 2D
//! vectors are row-major with rows indexed by `y`, so `z_{i,j}` with `i`
//! along `x` is stored at `j * (J+1) + i`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{MrError, Result};
use crate::grid::{Dim, GridHierarchy};
use crate::linalg::{solve_quadratic_direct, SparseMatrix};
use crate::objective::{CountedObjective, QuadraticForm};
use crate::optim::{Optimizer, OptimizerConfig};
use crate::tensor::Grid2Data;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemName {
    Bvp1d,
    Poisson2d,
    Mins,
    Morebv,
}

impl ProblemName {
    pub const ALL: [ProblemName; 4] = [Self::Bvp1d, Self::Poisson2d, Self::Mins, Self::Morebv];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bvp1d => "bvp1d",
            Self::Poisson2d => "poisson2d",
            Self::Mins => "mins",
            Self::Morebv => "morebv",
        }
    }

    pub fn dim(self) -> Dim {
        match self {
            Self::Bvp1d => Dim::One,
            _ => Dim::Two,
        }
    }
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemName {
    type Err = MrError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| MrError::InvalidConfig(format!("unknown problem `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Direct solve of the discrete linear system.
    DirectSolve,
    /// High-accuracy optimizer run; not an exact minimizer.
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub values: Vec<f64>,
    pub kind: ReferenceKind,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub name: ProblemName,
    pub hierarchy: GridHierarchy,
    pub objective: CountedObjective,
    pub initial_guess: Vec<f64>,
    /// Finest-level indices held at their initial values.
    pub boundary_mask: Vec<usize>,
    pub reference: Option<Reference>,
}

impl ProblemInstance {
    pub fn new(name: ProblemName, hierarchy: GridHierarchy) -> Result<Self> {
        match name {
            ProblemName::Bvp1d => make_bvp1d(hierarchy),
            ProblemName::Poisson2d => make_poisson2d(hierarchy),
            ProblemName::Mins => make_mins(hierarchy),
            ProblemName::Morebv => make_morebv(hierarchy),
        }
    }

    /// Minimizes at the finest level with quasi-Newton to `tol` and stores
    /// the result as a numerical reference. Evaluations are not counted.
    pub fn compute_numerical_reference(&mut self, tol: f64) -> Result<&Reference> {
        let free: Vec<usize> = {
            let mut pinned = vec![false; self.initial_guess.len()];
            for &i in &self.boundary_mask {
                pinned[i] = true;
            }
            (0..pinned.len()).filter(|&i| !pinned[i]).collect()
        };
        let (f, base, idx) = (self.objective.clone(), self.initial_guess.clone(), free.clone());
        let inner = CountedObjective::new(free.len(), move |x| {
            let mut z = base.clone();
            for (&i, v) in idx.iter().zip(x) {
                z[i] = *v;
            }
            f.peek(&z)
        });
        let x0: Vec<f64> = free.iter().map(|&i| self.initial_guess[i]).collect();
        let res = Optimizer::QuasiNewton.minimize(&inner, &x0, &OptimizerConfig::with_tol(tol))?;
        let mut values = self.initial_guess.clone();
        for (&i, v) in free.iter().zip(&res.x) {
            values[i] = *v;
        }
        Ok(self.reference.insert(Reference {
            values,
            kind: ReferenceKind::Numerical,
        }))
    }
}

fn require_dim(h: &GridHierarchy, dim: Dim, name: ProblemName) -> Result<()> {
    if h.dim() != dim {
        return Err(MrError::InvalidConfig(format!("{name} needs a {}D hierarchy", dim.as_usize())));
    }
    Ok(())
}

fn direct_reference(form: &QuadraticForm, mask: &[usize]) -> Result<Reference> {
    let n = form.dim();
    let mut pinned = vec![false; n];
    for &i in mask {
        pinned[i] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !pinned[i]).collect();
    let sub = form.a.principal_submatrix(&free);
    let rhs: Vec<f64> = free.iter().map(|&i| form.b[i]).collect();
    let x = solve_quadratic_direct(&sub, &rhs)?;
    let mut values = vec![0.0; n];
    for (&i, v) in free.iter().zip(x) {
        values[i] = v;
    }
    Ok(Reference {
        values,
        kind: ReferenceKind::DirectSolve,
    })
}

/// Right-hand side of the 1D problem.
pub fn bvp1d_rhs(t: f64) -> f64 {
    1e6 * t * (1.0 - t) * (t - 0.5) * (t - 0.25) * (0.75 - t)
}

/// `-u'' + 2u = f` on `[0,1]` with zero boundary values, as the quadratic
/// `½zᵀAz − bᵀz` over interior nodes.
pub fn make_bvp1d(hierarchy: GridHierarchy) -> Result<ProblemInstance> {
    require_dim(&hierarchy, Dim::One, ProblemName::Bvp1d)?;
    let j = hierarchy.cells(hierarchy.levels());
    let jj = (j * j) as f64;
    let mut t = Vec::new();
    for i in 1..j {
        t.push((i, i, 2.0 * jj + 2.0));
        if i + 1 < j {
            t.push((i, i + 1, -jj));
            t.push((i + 1, i, -jj));
        }
    }
    let a = SparseMatrix::from_triplets(j + 1, j + 1, t)?;
    let b = (0..=j)
        .map(|i| if i == 0 || i == j { 0.0 } else { bvp1d_rhs(i as f64 / j as f64) })
        .collect();
    let form = QuadraticForm::new(a, b, 0.0)?;
    let mask = vec![0, j];
    let reference = direct_reference(&form, &mask)?;
    Ok(ProblemInstance {
        name: ProblemName::Bvp1d,
        hierarchy,
        objective: CountedObjective::from_quadratic(form),
        initial_guess: vec![0.0; j + 1],
        boundary_mask: mask,
        reference: Some(reference),
    })
}

pub fn poisson2d_rhs(x: f64, y: f64) -> f64 {
    (4.0 * PI * x * (1.0 - x) * y * (1.0 - y)).sin()
}

/// `-Δu = f` on the unit square with zero boundary values and the 5-point
/// Laplacian.
pub fn make_poisson2d(hierarchy: GridHierarchy) -> Result<ProblemInstance> {
    require_dim(&hierarchy, Dim::Two, ProblemName::Poisson2d)?;
    let j = hierarchy.cells(hierarchy.levels());
    let side = j + 1;
    let jj = (j * j) as f64;
    let h = 1.0 / j as f64;
    let mut t = Vec::new();
    let mut b = vec![0.0; side * side];
    for r in 1..j {
        for c in 1..j {
            let p = r * side + c;
            t.push((p, p, 4.0 * jj));
            for (rr, cc) in [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)] {
                if rr > 0 && rr < j && cc > 0 && cc < j {
                    t.push((p, rr * side + cc, -jj));
                }
            }
            b[p] = poisson2d_rhs(c as f64 * h, r as f64 * h);
        }
    }
    let form = QuadraticForm::new(SparseMatrix::from_triplets(side * side, side * side, t)?, b, 0.0)?;
    let mask = hierarchy.boundary_indices(hierarchy.levels());
    let reference = direct_reference(&form, &mask)?;
    Ok(ProblemInstance {
        name: ProblemName::Poisson2d,
        hierarchy,
        objective: CountedObjective::from_quadratic(form),
        initial_guess: vec![0.0; side * side],
        boundary_mask: mask,
        reference: Some(reference),
    })
}

/// Discrete surface area of the interpolant of `z` on a `J x J` grid.
pub fn mins_area(z: &[f64], j: usize) -> f64 {
    let side = j + 1;
    let jf = j as f64;
    let at = |i: usize, jj: usize| z[jj * side + i];
    let mut sum = 0.0;
    for jy in 0..j {
        for i in 0..j {
            let a = jf * (at(i, jy + 1) - at(i, jy));
            let b = jf * (at(i + 1, jy + 1) - at(i, jy + 1));
            let c = jf * (at(i + 1, jy + 1) - at(i + 1, jy));
            let d = jf * (at(i + 1, jy) - at(i, jy));
            sum += (1.0 + a * a + b * b).sqrt() + (1.0 + c * c + d * d).sqrt();
        }
    }
    sum / (2.0 * jf * jf)
}

/// Minimal surface spanning `x(1−x)` on the edges `y ∈ {0,1}` and zero on
/// `x ∈ {0,1}`.
pub fn make_mins(hierarchy: GridHierarchy) -> Result<ProblemInstance> {
    require_dim(&hierarchy, Dim::Two, ProblemName::Mins)?;
    let j = hierarchy.cells(hierarchy.levels());
    let side = j + 1;
    let initial_guess = (0..side * side)
        .map(|p| {
            let x = (p % side) as f64 / j as f64;
            x * (1.0 - x)
        })
        .collect();
    Ok(ProblemInstance {
        name: ProblemName::Mins,
        hierarchy,
        objective: CountedObjective::new(side * side, move |z| mins_area(z, j)),
        initial_guess,
        boundary_mask: hierarchy.boundary_indices(hierarchy.levels()),
        reference: None,
    })
}

/// Sum of squared residuals of the discrete MOREBV system.
pub fn morebv_residual_norm(z: &[f64], j: usize) -> f64 {
    let side = j + 1;
    let jf = j as f64;
    let scale = 1.0 / (2.0 * jf * jf);
    let mut sum = 0.0;
    for jy in 1..j {
        for i in 1..j {
            let p = jy * side + i;
            let u = z[p];
            let lap = 4.0 * u - z[p - 1] - z[p + 1] - z[p - side] - z[p + side];
            let s = u + i as f64 / jf + jy as f64 / jf + 1.0;
            let r = lap + scale * s * s * s;
            sum += r * r;
        }
    }
    sum
}

/// `-Δu + ½(u + x + y + 1)^3 = 0` with zero boundary values, posed as a
/// least-squares problem over interior residuals.
pub fn make_morebv(hierarchy: GridHierarchy) -> Result<ProblemInstance> {
    require_dim(&hierarchy, Dim::Two, ProblemName::Morebv)?;
    let j = hierarchy.cells(hierarchy.levels());
    let side = j + 1;
    Ok(ProblemInstance {
        name: ProblemName::Morebv,
        hierarchy,
        objective: CountedObjective::new(side * side, move |z| morebv_residual_norm(z, j)),
        initial_guess: vec![0.0; side * side],
        boundary_mask: hierarchy.boundary_indices(hierarchy.levels()),
        reference: None,
    })
}

/// Centered difference quotients of a 2D grid function. Entries where the
/// stencil leaves the grid are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessTables {
    pub third_x: Array2<f64>,
    pub third_y: Array2<f64>,
    pub second_x: Array2<f64>,
    pub second_y: Array2<f64>,
}

pub fn smoothness_probe(z: &Grid2Data) -> Result<SmoothnessTables> {
    let j = z.cells();
    if j < 4 {
        return Err(MrError::InvalidConfig(format!("smoothness probe needs at least 4 cells, got {j}")));
    }
    let h = 1.0 / j as f64;
    let v = &z.values;
    let n = j + 1;
    let third = |get: &dyn Fn(usize) -> f64, k: usize| {
        if k < 2 || k + 2 > j {
            f64::NAN
        } else {
            (-get(k - 2) + 2.0 * get(k - 1) - 2.0 * get(k + 1) + get(k + 2)) / (2.0 * h * h * h)
        }
    };
    let second = |get: &dyn Fn(usize) -> f64, k: usize| {
        if k < 1 || k + 1 > j {
            f64::NAN
        } else {
            (get(k - 1) - 2.0 * get(k) + get(k + 1)) / (h * h)
        }
    };
    Ok(SmoothnessTables {
        third_x: Array2::from_shape_fn((n, n), |(r, c)| third(&|k| v[[r, k]], c)),
        third_y: Array2::from_shape_fn((n, n), |(r, c)| third(&|k| v[[k, c]], r)),
        second_x: Array2::from_shape_fn((n, n), |(r, c)| second(&|k| v[[r, k]], c)),
        second_y: Array2::from_shape_fn((n, n), |(r, c)| second(&|k| v[[k, c]], r)),
    })
}
