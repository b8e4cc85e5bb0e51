//! The coarse-to-fine driver.
//!
//! Starting from `z^{L,0}`, level `k` minimizes `F_k(ε) = F(z^{L,k} + P_k^L ε)`
//! over the free coarse coordinates and sets
//! `z^{L,k+1} = z^{L,k} + P_k^L ε_*`. The ladder stops after the finest level
//! or as soon as a step falls below `tol_m`.

use crate::error::{MrError, Result};
use crate::grid::{Dim, GridHierarchy};
use crate::linalg::{BandCholesky, SparseMatrix};
use crate::mr::{adjoint_multilevel, max_abs, predict_multilevel};
use crate::objective::{CountedObjective, QuadraticForm};
use crate::optim::{OptimStatus, Optimizer, OptimizerConfig};
use crate::scheme::PredictionScheme;
use crate::tensor::{adjoint_two_level_2d, predict_multilevel_2d, Grid2Data};

/// Lifts coarse perturbations to the finest level of a hierarchy.
#[derive(Debug, Clone)]
pub struct Prolongation {
    scheme: PredictionScheme,
    hierarchy: GridHierarchy,
}

impl Prolongation {
    pub fn new(scheme: PredictionScheme, hierarchy: GridHierarchy) -> Result<Self> {
        hierarchy.check_scheme(&scheme)?;
        Ok(Self { scheme, hierarchy })
    }

    pub fn hierarchy(&self) -> &GridHierarchy {
        &self.hierarchy
    }

    pub fn scheme(&self) -> &PredictionScheme {
        &self.scheme
    }

    fn check_len(&self, v: &[f64], level: usize) -> Result<()> {
        let expected = self.hierarchy.len(level);
        if v.len() != expected {
            return Err(MrError::LengthMismatch {
                expected,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `P_k^L ε` for a full (flattened) level-`k` vector.
    pub fn apply(&self, eps: &[f64], level: usize) -> Result<Vec<f64>> {
        self.check_len(eps, level)?;
        let up = self.hierarchy.levels() - level;
        match self.hierarchy.dim() {
            Dim::One => predict_multilevel(eps, up, &self.scheme),
            Dim::Two => {
                let g = Grid2Data::from_flat(eps, level)?;
                Ok(predict_multilevel_2d(&g, self.hierarchy.levels(), &self.scheme)?.to_flat())
            }
        }
    }

    /// `(P_k^L)ᵀ v` for a finest-level vector `v`.
    pub fn adjoint(&self, v: &[f64], level: usize) -> Result<Vec<f64>> {
        let top = self.hierarchy.levels();
        self.check_len(v, top)?;
        match self.hierarchy.dim() {
            Dim::One => adjoint_multilevel(v, top - level, &self.scheme),
            Dim::Two => {
                let mut g = Grid2Data::from_flat(v, top)?;
                while g.level > level {
                    g = adjoint_two_level_2d(&g, &self.scheme)?;
                }
                Ok(g.to_flat())
            }
        }
    }

    /// Coordinates of level `level` that are not pinned. A coarse node is
    /// pinned when the finest node it sits on is.
    pub fn free_indices(&self, level: usize, pinned_fine: &[bool]) -> Vec<usize> {
        (0..self.hierarchy.len(level))
            .filter(|&i| !pinned_fine[self.hierarchy.fine_image(level, i)])
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct MrOptConfig {
    pub scheme: PredictionScheme,
    pub hierarchy: GridHierarchy,
    /// Ladder stops once `‖z^{L,k+1} − z^{L,k}‖_∞ ≤ tol_m`.
    pub tol_m: f64,
    /// Finest-level indices that never move.
    pub boundary_mask: Option<Vec<usize>>,
    pub optimizer: Optimizer,
    pub optimizer_config: OptimizerConfig,
    /// Attach the reduced quadratic form to each auxiliary objective.
    pub quadratic_fast_path: bool,
    /// Solve each quadratic auxiliary problem by a direct linear solve.
    pub oracle_mode: bool,
    /// Largest number of free coordinates for which the reduced form is built.
    pub fast_path_max_dofs: usize,
}

impl MrOptConfig {
    /// Config with `tol_m = tol_x`, no mask and the fast path enabled.
    pub fn new(
        scheme: PredictionScheme,
        hierarchy: GridHierarchy,
        optimizer: Optimizer,
        optimizer_config: OptimizerConfig,
    ) -> Self {
        Self {
            scheme,
            hierarchy,
            tol_m: optimizer_config.tol_x,
            boundary_mask: None,
            optimizer,
            optimizer_config,
            quadratic_fast_path: true,
            oracle_mode: false,
            fast_path_max_dofs: 20_000,
        }
    }

    pub fn with_mask(mut self, mask: Vec<usize>) -> Self {
        self.boundary_mask = Some(mask);
        self
    }

    pub fn oracle(mut self) -> Self {
        self.oracle_mode = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol_m > 0.0) {
            return Err(MrError::InvalidConfig(format!("tol_m must be positive, got {}", self.tol_m)));
        }
        self.optimizer_config.validate()?;
        self.hierarchy.check_scheme(&self.scheme)?;
        let n = self.hierarchy.finest_len();
        if let Some(bad) = self.boundary_mask.iter().flatten().find(|&&i| i >= n) {
            return Err(MrError::InvalidConfig(format!("mask index {bad} outside finest grid of {n} values")));
        }
        Ok(())
    }

    fn pinned(&self) -> Vec<bool> {
        let mut pinned = vec![false; self.hierarchy.finest_len()];
        for &i in self.boundary_mask.iter().flatten() {
            pinned[i] = true;
        }
        pinned
    }

    fn prolongation(&self) -> Result<Prolongation> {
        Prolongation::new(self.scheme.clone(), self.hierarchy)
    }
}

fn scatter(free: &[usize], values: &[f64], len: usize) -> Vec<f64> {
    let mut full = vec![0.0; len];
    for (&i, v) in free.iter().zip(values) {
        full[i] = *v;
    }
    full
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn check_finest(z: &[f64], config: &MrOptConfig) -> Result<()> {
    let n = config.hierarchy.finest_len();
    if z.len() != n {
        return Err(MrError::LengthMismatch {
            expected: n,
            found: z.len(),
        });
    }
    Ok(())
}

/// Reduced form `(A_k, b_k, c_k)` over all `N_k` coordinates of `level`;
/// pinned coordinates get zero rows and columns.
fn reduce_on_level(
    form: &QuadraticForm,
    z_current: &[f64],
    level: usize,
    prolong: &Prolongation,
    free: &[usize],
) -> Result<QuadraticForm> {
    let h = prolong.hierarchy();
    let n_k = h.len(level);
    let residual: Vec<f64> = form.gradient(z_current)?.iter().map(|g| -g).collect();
    let c = form.value(z_current);
    if level == h.levels() {
        let mut keep = vec![false; n_k];
        for &i in free {
            keep[i] = true;
        }
        let t = form.a.triplets().filter(|(r, c, _)| keep[*r] && keep[*c]).collect();
        let a = SparseMatrix::from_triplets(n_k, n_k, t)?;
        let b = residual.iter().enumerate().map(|(i, v)| if keep[i] { *v } else { 0.0 }).collect();
        return QuadraticForm::new(a, b, c);
    }
    let mut t = Vec::new();
    let mut unit = vec![0.0; n_k];
    for &j in free {
        unit[j] = 1.0;
        let column = prolong.adjoint(&form.a.mul_vec(&prolong.apply(&unit, level)?)?, level)?;
        unit[j] = 0.0;
        t.extend(free.iter().map(|&i| (i, j, column[i])));
    }
    let a = SparseMatrix::from_triplets(n_k, n_k, t)?;
    let b_full = prolong.adjoint(&residual, level)?;
    let b = scatter(free, &free.iter().map(|&i| b_full[i]).collect::<Vec<_>>(), n_k);
    QuadraticForm::new(a, b, c)
}

fn restrict(form: &QuadraticForm, free: &[usize]) -> Result<QuadraticForm> {
    QuadraticForm::new(
        form.a.principal_submatrix(free),
        free.iter().map(|&i| form.b[i]).collect(),
        form.c,
    )
}

/// Reduces a quadratic objective to level `level` around `z_current`:
/// `A_k = PᵀAP`, `b_k = Pᵀ(b − A z)`, `c_k = F(z)` with `P = P_k^L` acting on
/// mask-zeroed vectors. Fails when `A_k` is not positive definite on the
/// free coordinates.
pub fn reduce_quadratic(
    form: &QuadraticForm,
    z_current: &[f64],
    level: usize,
    config: &MrOptConfig,
) -> Result<QuadraticForm> {
    config.validate()?;
    check_finest(z_current, config)?;
    check_level(level, config)?;
    let prolong = config.prolongation()?;
    let free = prolong.free_indices(level, &config.pinned());
    let reduced = reduce_on_level(form, z_current, level, &prolong, &free)?;
    BandCholesky::factor(&reduced.a.principal_submatrix(&free))?;
    Ok(reduced)
}

fn check_level(level: usize, config: &MrOptConfig) -> Result<()> {
    if level > config.hierarchy.levels() {
        return Err(MrError::InvalidConfig(format!(
            "level {level} above finest level {}",
            config.hierarchy.levels()
        )));
    }
    Ok(())
}

/// `F_k(ε) = F(z_current + P_k^L ε)` over the free coordinates of `level`.
///
/// Each evaluation forwards exactly one evaluation to `f`. With the fast
/// path enabled and a quadratic `f`, the reduced form restricted to the free
/// coordinates is attached.
pub fn build_auxiliary_objective(
    f: &CountedObjective,
    z_current: &[f64],
    level: usize,
    config: &MrOptConfig,
) -> Result<CountedObjective> {
    config.validate()?;
    check_finest(z_current, config)?;
    check_level(level, config)?;
    let prolong = config.prolongation()?;
    let free = prolong.free_indices(level, &config.pinned());
    aux_objective(f, z_current, level, config, &prolong, &free)
}

fn aux_objective(
    f: &CountedObjective,
    z_current: &[f64],
    level: usize,
    config: &MrOptConfig,
    prolong: &Prolongation,
    free: &[usize],
) -> Result<CountedObjective> {
    let n_k = prolong.hierarchy().len(level);
    let (parent, base, lift, idx) = (f.clone(), z_current.to_vec(), prolong.clone(), free.to_vec());
    let aux = CountedObjective::new(free.len(), move |eps| {
        let full = scatter(&idx, eps, n_k);
        match lift.apply(&full, level) {
            Ok(dz) => parent.eval(&add(&base, &dz)).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    });
    match f.quadratic_form() {
        Some(form) if config.quadratic_fast_path && free.len() <= config.fast_path_max_dofs => {
            let reduced = reduce_on_level(form, z_current, level, prolong, free)?;
            aux.with_quadratic(restrict(&reduced, free)?)
        }
        _ => Ok(aux),
    }
}

/// Outcome of one rung of the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub level: usize,
    /// Values stored at this level, `N_k`.
    pub n_k: usize,
    /// Free coordinates handed to the optimizer.
    pub dofs: usize,
    pub evals: u64,
    /// `‖z^{L,k+1} − z^{L,k}‖_∞`.
    pub step_norm: f64,
    /// `F(z^{L,k+1})`.
    pub f_value: f64,
    /// `‖ε_*^k‖_∞`.
    pub eps_norm: f64,
    pub status: OptimStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrOptReport {
    pub levels: Vec<LevelRecord>,
    /// `z^{L,0}, z^{L,1}, ..` for every executed level.
    pub solutions: Vec<Vec<f64>>,
    pub f_initial: f64,
    pub total_evals: u64,
    pub stopped_early: bool,
    /// Counts are zero because auxiliary problems were solved directly.
    pub oracle: bool,
    /// `decay_rates[k]` compares the steps of levels `k-1` and `k`; entry 0
    /// is always `None`.
    pub decay_rates: Vec<Option<f64>>,
    /// First failing status, or `Converged`/`MaxEvals`.
    pub status: OptimStatus,
}

impl MrOptReport {
    pub fn solution(&self) -> &[f64] {
        self.solutions.last().expect("report always holds the initial guess")
    }

    pub fn step_norms(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.step_norm).collect()
    }
}

/// `log2(s_{k-1} / s_k)` for consecutive step norms. Pairs with a zero,
/// non-finite or negative entry yield `None`.
pub fn decay_rates(steps: &[f64]) -> Vec<Option<f64>> {
    steps
        .windows(2)
        .map(|w| {
            let r = (w[0] / w[1]).log2();
            (w[0] > 0.0 && w[1] > 0.0 && r.is_finite()).then_some(r)
        })
        .collect()
}

/// Decay rates of a report's step norms, aligned with its levels.
pub fn estimate_decay_rates(report: &MrOptReport) -> Vec<Option<f64>> {
    let steps = report.step_norms();
    if steps.is_empty() {
        return Vec::new();
    }
    std::iter::once(None).chain(decay_rates(&steps)).collect()
}

struct LevelSolve {
    eps: Vec<f64>,
    fx: f64,
    evals: u64,
    status: OptimStatus,
}

fn solve_level(
    f: &CountedObjective,
    z: &[f64],
    level: usize,
    config: &MrOptConfig,
    prolong: &Prolongation,
    free: &[usize],
) -> Result<LevelSolve> {
    if config.oracle_mode {
        let form = f
            .quadratic_form()
            .ok_or_else(|| MrError::OracleUnavailable("objective exposes no quadratic form".into()))?;
        if free.len() > config.fast_path_max_dofs {
            return Err(MrError::OracleUnavailable(format!(
                "{} free coordinates exceed the limit of {}",
                free.len(),
                config.fast_path_max_dofs
            )));
        }
        let reduced = restrict(&reduce_on_level(form, z, level, prolong, free)?, free)?;
        let eps = BandCholesky::factor(&reduced.a)?.solve(&reduced.b)?;
        return Ok(LevelSolve {
            fx: reduced.value(&eps),
            eps,
            evals: 0,
            status: OptimStatus::Converged,
        });
    }
    let aux = aux_objective(f, z, level, config, prolong, free)?;
    let res = config
        .optimizer
        .minimize(&aux, &vec![0.0; free.len()], &config.optimizer_config)?;
    Ok(LevelSolve {
        eps: res.x,
        fx: res.fx,
        evals: res.evals,
        status: res.status,
    })
}

/// Runs the coarse-to-fine ladder from `z0`.
///
/// Optimizer failures stop the ladder and are reported in `status`; a hit
/// evaluation cap is flagged on the level and the ladder continues.
pub fn run_mropt(f: &CountedObjective, z0: &[f64], config: &MrOptConfig) -> Result<MrOptReport> {
    config.validate()?;
    check_finest(z0, config)?;
    if f.dim() != z0.len() {
        return Err(MrError::LengthMismatch {
            expected: f.dim(),
            found: z0.len(),
        });
    }
    let prolong = config.prolongation()?;
    let pinned = config.pinned();
    let top = config.hierarchy.levels();

    let mut z = z0.to_vec();
    let mut report = MrOptReport {
        levels: Vec::new(),
        solutions: vec![z.clone()],
        f_initial: f.peek(&z),
        total_evals: 0,
        stopped_early: false,
        oracle: config.oracle_mode,
        decay_rates: Vec::new(),
        status: OptimStatus::Converged,
    };
    for level in 0..=top {
        let free = prolong.free_indices(level, &pinned);
        let solved = solve_level(f, &z, level, config, &prolong, &free)?;
        let n_k = config.hierarchy.len(level);
        let dz = prolong.apply(&scatter(&free, &solved.eps, n_k), level)?;
        z = add(&z, &dz);
        let step = max_abs(&dz);
        report.levels.push(LevelRecord {
            level,
            n_k,
            dofs: free.len(),
            evals: solved.evals,
            step_norm: step,
            f_value: solved.fx,
            eps_norm: max_abs(&solved.eps),
            status: solved.status,
        });
        report.total_evals += solved.evals;
        report.solutions.push(z.clone());
        if solved.status.is_failure() {
            report.status = solved.status;
            break;
        }
        if solved.status == OptimStatus::MaxEvals {
            report.status = OptimStatus::MaxEvals;
        }
        if step <= config.tol_m && level < top {
            report.stopped_early = true;
            break;
        }
    }
    report.decay_rates = estimate_decay_rates(&report);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult {
    pub z: Vec<f64>,
    pub f_value: f64,
    pub evals: u64,
    pub status: OptimStatus,
}

/// Baseline: one optimizer call on the free finest-level coordinates.
pub fn run_direct(f: &CountedObjective, z0: &[f64], config: &MrOptConfig) -> Result<DirectResult> {
    config.validate()?;
    check_finest(z0, config)?;
    let prolong = config.prolongation()?;
    let top = config.hierarchy.levels();
    let free = prolong.free_indices(top, &config.pinned());
    let solved = solve_level(f, z0, top, config, &prolong, &free)?;
    let dz = scatter(&free, &solved.eps, z0.len());
    Ok(DirectResult {
        z: add(z0, &dz),
        f_value: solved.fx,
        evals: solved.evals,
        status: solved.status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_quadratic_direct;
    use crate::mr::forward_full;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 1D `-u'' + 2u = f` on the full grid with both ends pinned.
    fn bvp(cells: usize) -> (CountedObjective, Vec<usize>) {
        let jj = (cells * cells) as f64;
        let mut t = Vec::new();
        for i in 1..cells {
            t.push((i, i, 2.0 * jj + 2.0));
            if i + 1 < cells {
                t.push((i, i + 1, -jj));
                t.push((i + 1, i, -jj));
            }
        }
        let a = SparseMatrix::from_triplets(cells + 1, cells + 1, t).unwrap();
        let b: Vec<f64> = (0..=cells)
            .map(|i| {
                let x = i as f64 / cells as f64;
                if i == 0 || i == cells {
                    0.0
                } else {
                    1e3 * x * (1.0 - x) * (x - 0.3)
                }
            })
            .collect();
        let form = QuadraticForm::new(a, b, 0.0).unwrap();
        (CountedObjective::from_quadratic(form), vec![0, cells])
    }

    fn config(n: usize, j0: usize, levels: usize, opt: Optimizer, tol: f64) -> MrOptConfig {
        let h = GridHierarchy::new(j0, levels, Dim::One).unwrap();
        MrOptConfig::new(PredictionScheme::new(n).unwrap(), h, opt, OptimizerConfig::with_tol(tol))
            .with_mask(vec![0, j0 << levels])
    }

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn aux_objective_at_zero_and_top_level() {
        let (f, _) = bvp(32);
        let cfg = config(3, 4, 3, Optimizer::QuasiNewton, 1e-6);
        let z = {
            let mut z = random(33, 1);
            z[0] = 0.0;
            z[32] = 0.0;
            z
        };
        let aux = build_auxiliary_objective(&f, &z, 1, &cfg).unwrap();
        assert_eq!(aux.dim(), 7);
        let before = f.evals();
        assert_eq!(aux.eval(&[0.0; 7]).unwrap(), f.peek(&z));
        assert_eq!(f.evals(), before + 1);

        let mut open = cfg.clone();
        open.boundary_mask = None;
        let top = build_auxiliary_objective(&f, &z, 3, &open).unwrap();
        let e = random(33, 2);
        assert!((top.eval(&e).unwrap() - f.peek(&add(&z, &e))).abs() < 1e-9);
    }

    #[test]
    fn linear_objective_matches_explicit_prediction() {
        let f = CountedObjective::new(17, |z| z.iter().sum());
        let h = GridHierarchy::new(2, 3, Dim::One).unwrap();
        let cfg = MrOptConfig::new(PredictionScheme::new(1).unwrap(), h, Optimizer::PatternSearch, OptimizerConfig::default());
        let z = random(17, 3);
        let eps = random(5, 4);
        let aux = build_auxiliary_objective(&f, &z, 1, &cfg).unwrap();
        let lifted = predict_multilevel(&eps, 2, &PredictionScheme::new(1).unwrap()).unwrap();
        let expect: f64 = lifted.iter().sum();
        assert!((aux.eval(&eps).unwrap() - aux.eval(&[0.0; 5]).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn reduced_form_agrees_with_black_box() {
        let (f, _) = bvp(64);
        let cfg = config(3, 4, 4, Optimizer::QuasiNewton, 1e-6);
        let mut z = random(65, 5);
        z[0] = 0.0;
        z[64] = 0.0;
        let form = f.quadratic_form().unwrap();
        for level in 0..=4 {
            let red = reduce_quadratic(form, &z, level, &cfg).unwrap();
            assert!(red.a.asymmetry() <= 1e-10);
            let aux = build_auxiliary_objective(&f, &z, level, &cfg).unwrap();
            let q = aux.quadratic_form().unwrap();
            for s in 0..10 {
                let e = random(aux.dim(), 100 + s);
                let (a, b) = (aux.eval(&e).unwrap(), q.value(&e));
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "level {level}: {a} vs {b}");
            }
        }
        let unmasked = {
            let mut c = cfg.clone();
            c.boundary_mask = None;
            c
        };
        let red = reduce_quadratic(&QuadraticForm::new(SparseMatrix::identity(65), vec![1.0; 65], 0.0).unwrap(), &z, 4, &unmasked).unwrap();
        assert_eq!(red.a, SparseMatrix::identity(65));
        let expect_b: Vec<f64> = z.iter().map(|v| 1.0 - v).collect();
        assert_eq!(red.b, expect_b);
    }

    #[test]
    fn indefinite_reduction_is_rejected() {
        let cfg = {
            let mut c = config(1, 2, 1, Optimizer::QuasiNewton, 1e-6);
            c.boundary_mask = None;
            c
        };
        let form = QuadraticForm::new(SparseMatrix::from_triplets(5, 5, vec![(0, 0, 1.0)]).unwrap(), vec![0.0; 5], 0.0).unwrap();
        assert!(matches!(
            reduce_quadratic(&form, &[0.0; 5], 1, &cfg),
            Err(MrError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn oracle_ladder_ends_at_exact_minimizer_and_keeps_details() {
        let (f, mask) = bvp(64);
        let mut cfg = config(3, 4, 4, Optimizer::QuasiNewton, 1e-14).oracle();
        cfg.boundary_mask = Some(mask.clone());
        let z0 = vec![0.0; 65];
        let rep = run_mropt(&f, &z0, &cfg).unwrap();
        assert!(!rep.stopped_early);
        assert_eq!(rep.levels.len(), 5);
        assert_eq!(rep.total_evals, 0);
        assert_eq!(f.evals(), 0);

        let form = f.quadratic_form().unwrap();
        let free: Vec<usize> = (1..64).collect();
        let sub = restrict(form, &free).unwrap();
        let exact = solve_quadratic_direct(&sub.a, &sub.b).unwrap();
        let z = rep.solution();
        for (i, &p) in free.iter().enumerate() {
            assert!((z[p] - exact[i]).abs() <= 1e-9);
        }

        let s = PredictionScheme::new(3).unwrap();
        let d0 = forward_full(&rep.solutions[0], 4, 0, &s).unwrap();
        for k in 0..4 {
            let dk = forward_full(&rep.solutions[k + 1], 4, 0, &s).unwrap();
            for i in k..4 {
                let diff = dk.details[i].iter().zip(&d0.details[i]).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                assert!(diff <= 1e-10, "k={k} i={i}: {diff}");
            }
        }
        for w in rep.levels.windows(2) {
            assert!(w[1].f_value <= w[0].f_value + 1e-12 * (1.0 + w[0].f_value.abs()));
        }
    }

    #[test]
    fn optimal_start_stops_at_level_zero() {
        let (f, _) = bvp(32);
        let cfg = config(1, 4, 3, Optimizer::QuasiNewton, 1e-6).oracle();
        let direct = run_direct(&f, &vec![0.0; 33], &cfg).unwrap();
        let rep = run_mropt(&f, &direct.z, &cfg).unwrap();
        assert!(rep.stopped_early);
        assert_eq!(rep.levels.len(), 1);
        assert!(rep.levels[0].eps_norm <= 1e-9);
    }

    #[test]
    fn degenerate_ladder_equals_direct_call() {
        let (f, _) = bvp(8);
        let cfg = config(1, 8, 0, Optimizer::QuasiNewton, 1e-7);
        let rep = run_mropt(&f, &[0.0; 9], &cfg).unwrap();
        let direct = run_direct(&f, &[0.0; 9], &cfg).unwrap();
        assert_eq!(rep.solution(), &direct.z[..]);
        assert_eq!(rep.total_evals, direct.evals);
    }

    #[test]
    fn direct_is_deterministic_and_costlier_than_ladder() {
        let (f, _) = bvp(32);
        let tol = 1e-5;
        let cfg = config(3, 4, 3, Optimizer::PatternSearch, tol);
        let a = run_direct(&f, &[0.0; 33], &cfg).unwrap();
        let b = run_direct(&f, &[0.0; 33], &cfg).unwrap();
        assert_eq!(a.evals, b.evals);
        let rep = run_mropt(&f, &[0.0; 33], &cfg).unwrap();
        assert!(rep.total_evals < a.evals, "{} vs {}", rep.total_evals, a.evals);
    }

    #[test]
    fn nesting_of_lifted_spaces() {
        let s = PredictionScheme::new(5).unwrap();
        let h = GridHierarchy::new(8, 3, Dim::One).unwrap();
        let p = Prolongation::new(s.clone(), h).unwrap();
        for k in 0..3 {
            let e = random(h.len(k), k as u64);
            let up = predict_multilevel(&e, 1, &s).unwrap();
            let a = p.apply(&e, k).unwrap();
            let b = p.apply(&up, k + 1).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-12));
        }
    }

    #[test]
    fn decay_rate_examples() {
        assert_eq!(decay_rates(&[1.0, 0.25, 0.0625]), vec![Some(2.0), Some(2.0)]);
        assert_eq!(decay_rates(&[1.0, 0.0]), vec![None]);
        assert_eq!(decay_rates(&[0.0, 0.0]), vec![None]);
        assert!(decay_rates(&[1.0]).is_empty());
    }

    #[test]
    fn oracle_requires_quadratic_form() {
        let f = CountedObjective::new(9, |z| z.iter().map(|v| v * v).sum());
        let cfg = config(1, 4, 1, Optimizer::QuasiNewton, 1e-6).oracle();
        assert!(matches!(run_mropt(&f, &[0.0; 9], &cfg), Err(MrError::OracleUnavailable(_))));
    }

    #[test]
    fn two_dimensional_prolongation_adjoint() {
        let s = PredictionScheme::new(3).unwrap();
        let h = GridHierarchy::new(4, 2, Dim::Two).unwrap();
        let p = Prolongation::new(s, h).unwrap();
        let x = random(25, 1);
        let y = random(17 * 17, 2);
        let lhs: f64 = p.apply(&x, 0).unwrap().iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&p.adjoint(&y, 0).unwrap()).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-11);
        let pinned = {
            let mut v = vec![false; 17 * 17];
            for i in h.boundary_indices(2) {
                v[i] = true;
            }
            v
        };
        assert_eq!(p.free_indices(0, &pinned).len(), 9);
        assert_eq!(p.free_indices(2, &pinned).len(), 15 * 15);
    }
}
