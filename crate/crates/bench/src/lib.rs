//! Experiment runner for the coarse-to-fine optimizer: builds a benchmark
//! problem, runs the ladder and/or the direct baseline, and writes CSV
//! reports and grid dumps.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mropt::problems::{smoothness_probe, ProblemInstance, ProblemName};
use mropt::mr::sample_limit_basis;
use mropt::tensor::Grid2Data;
use mropt::{
    run_direct, run_mropt, Dim, DirectResult, GridHierarchy, MrError, MrOptConfig, MrOptReport, OptimStatus,
    Optimizer, OptimizerConfig, PredictionScheme,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl From<MrError> for BenchError {
    fn from(e: MrError) -> Self {
        BenchError::InvalidSpec(e.to_string())
    }
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::InvalidSpec(_) => 1,
            BenchError::Io { .. } | BenchError::Parse { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerChoice {
    QuasiNewton,
    PatternSearch,
    Oracle,
}

impl OptimizerChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::QuasiNewton => "quasi_newton",
            Self::PatternSearch => "pattern_search",
            Self::Oracle => "oracle",
        }
    }
}

impl FromStr for OptimizerChoice {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quasi_newton" => Ok(Self::QuasiNewton),
            "pattern_search" => Ok(Self::PatternSearch),
            "oracle" => Ok(Self::Oracle),
            _ => Err(BenchError::InvalidSpec(format!("unknown optimizer `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Mropt,
    Direct,
    Both,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mropt => "mropt",
            Self::Direct => "direct",
            Self::Both => "both",
        }
    }
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mropt" => Ok(Self::Mropt),
            "direct" => Ok(Self::Direct),
            "both" => Ok(Self::Both),
            _ => Err(BenchError::InvalidSpec(format!("unknown mode `{s}`"))),
        }
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemName,
    pub n: usize,
    pub j0: usize,
    pub levels: usize,
    /// Used for both the optimizer tolerance and the ladder's early stop.
    pub tol: f64,
    pub optimizer: OptimizerChoice,
    pub mode: Mode,
    pub seed: u64,
    pub max_evals: Option<u64>,
    pub out: PathBuf,
    pub dump_solutions: bool,
    pub dump_limit_basis: bool,
    pub dump_smoothness: bool,
}

impl RunSpec {
    /// Spec with the desk-scale defaults for `problem`.
    pub fn new(problem: ProblemName, out: impl Into<PathBuf>) -> Self {
        let (j0, levels) = default_grid(problem);
        Self {
            problem,
            n: 3,
            j0,
            levels,
            tol: 1e-5,
            optimizer: OptimizerChoice::PatternSearch,
            mode: Mode::Mropt,
            seed: 0,
            max_evals: None,
            out: out.into(),
            dump_solutions: false,
            dump_limit_basis: false,
            dump_smoothness: false,
        }
    }

    /// Everything that determines the numbers in a report.
    pub fn canonical(&self) -> String {
        let cap = self.max_evals.map_or("none".to_string(), |m| m.to_string());
        format!(
            "problem={} n={} j0={} levels={} tol={:e} optimizer={} mode={} seed={} max_evals={}",
            self.problem,
            self.n,
            self.j0,
            self.levels,
            self.tol,
            self.optimizer.as_str(),
            self.mode.as_str(),
            self.seed,
            cap
        )
    }

    pub fn validate(&self) -> Result<()> {
        let scheme = PredictionScheme::new(self.n)?;
        let h = GridHierarchy::new(self.j0, self.levels, self.problem.dim())?;
        h.check_scheme(&scheme)?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(BenchError::InvalidSpec(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_evals == Some(0) {
            return Err(BenchError::InvalidSpec("max-evals must be at least 1".into()));
        }
        let quadratic = matches!(self.problem, ProblemName::Bvp1d | ProblemName::Poisson2d);
        if self.optimizer == OptimizerChoice::Oracle && !quadratic {
            return Err(BenchError::InvalidSpec(format!("oracle optimizer needs a quadratic problem, not {}", self.problem)));
        }
        if self.dump_smoothness && self.problem.dim() != Dim::Two {
            return Err(BenchError::InvalidSpec("smoothness dump needs a 2D problem".into()));
        }
        if self.dump_smoothness && h.cells(self.levels) < 4 {
            return Err(BenchError::InvalidSpec("smoothness dump needs at least 4 cells".into()));
        }
        Ok(())
    }

    pub fn hierarchy(&self) -> Result<GridHierarchy> {
        Ok(GridHierarchy::new(self.j0, self.levels, self.problem.dim())?)
    }

    pub fn config(&self, problem: &ProblemInstance) -> Result<MrOptConfig> {
        let optimizer = match self.optimizer {
            OptimizerChoice::PatternSearch => Optimizer::PatternSearch,
            _ => Optimizer::QuasiNewton,
        };
        let oc = OptimizerConfig {
            max_evals: self.max_evals,
            seed: self.seed,
            ..OptimizerConfig::with_tol(self.tol)
        };
        let mut cfg = MrOptConfig::new(PredictionScheme::new(self.n)?, problem.hierarchy, optimizer, oc)
            .with_mask(problem.boundary_mask.clone());
        cfg.oracle_mode = self.optimizer == OptimizerChoice::Oracle;
        Ok(cfg)
    }
}

/// Desk-scale `(j0, L)` per problem.
pub fn default_grid(problem: ProblemName) -> (usize, usize) {
    match problem {
        ProblemName::Bvp1d => (4, 5),
        _ => (4, 3),
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Option<MrOptReport>,
    pub direct: Option<DirectResult>,
    /// Evaluations of the ladder over evaluations of the direct run.
    pub eval_ratio: Option<f64>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        let bad = |s: OptimStatus| s.is_failure();
        self.report.as_ref().is_some_and(|r| bad(r.status)) || self.direct.as_ref().is_some_and(|d| bad(d.status))
    }

    /// 0 on success, 2 when an optimizer failed.
    pub fn exit_code(&self) -> i32 {
        if self.failed() {
            2
        } else {
            0
        }
    }
}

pub fn eval_ratio(mropt: u64, direct: u64) -> Option<f64> {
    (direct > 0).then(|| mropt as f64 / direct as f64)
}

pub fn run_experiment(spec: &RunSpec) -> Result<Outcome> {
    spec.validate()?;
    let problem = ProblemInstance::new(spec.problem, spec.hierarchy()?)?;
    let cfg = spec.config(&problem)?;
    let reference = problem.reference.as_ref().map(|r| r.values.as_slice());

    let report = match spec.mode {
        Mode::Direct => None,
        _ => Some(run_mropt(&problem.objective, &problem.initial_guess, &cfg)?),
    };
    let direct = match spec.mode {
        Mode::Mropt => None,
        _ => Some(run_direct(&problem.objective, &problem.initial_guess, &cfg)?),
    };
    let eval_ratio = match (&report, &direct) {
        (Some(r), Some(d)) => eval_ratio(r.total_evals, d.evals),
        _ => None,
    };

    let header = ReportHeader {
        spec: spec.canonical(),
        seed: spec.seed,
    };
    let csv = match (&report, &direct) {
        (Some(r), d) => render_report(&header, r, reference, d.as_ref()),
        (None, Some(d)) => render_direct(&header, d, &problem, reference),
        (None, None) => unreachable!("every mode runs something"),
    };
    write_file(&spec.out, &csv)?;
    let mut files = vec![spec.out.clone()];

    let h = problem.hierarchy;
    if spec.dump_solutions {
        if let Some(r) = &report {
            for (k, z) in r.solutions.iter().enumerate() {
                let path = sibling(&spec.out, &format!("solution_{k}"));
                dump_solution(z, h.dim(), &path)?;
                files.push(path);
            }
        }
        if let Some(d) = &direct {
            let path = sibling(&spec.out, "solution_direct");
            dump_solution(&d.z, h.dim(), &path)?;
            files.push(path);
        }
    }
    if spec.dump_limit_basis {
        let path = sibling(&spec.out, "limit_basis");
        let basis = sample_limit_basis(spec.j0, spec.j0 / 2, 10, &cfg.scheme)?;
        dump_solution(&basis, Dim::One, &path)?;
        files.push(path);
    }
    if spec.dump_smoothness {
        let z = report
            .as_ref()
            .map(|r| r.solution().to_vec())
            .or_else(|| direct.as_ref().map(|d| d.z.clone()))
            .expect("a solution exists");
        let t = smoothness_probe(&Grid2Data::from_flat(&z, h.levels())?)?;
        for (name, table) in [
            ("third_x", &t.third_x),
            ("third_y", &t.third_y),
            ("second_x", &t.second_x),
            ("second_y", &t.second_y),
        ] {
            let path = sibling(&spec.out, name);
            dump_solution(&table.iter().copied().collect::<Vec<_>>(), Dim::Two, &path)?;
            files.push(path);
        }
    }
    Ok(Outcome {
        report,
        direct,
        eval_ratio,
        files,
    })
}

/// `dir/stem_suffix.csv` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportHeader {
    pub spec: String,
    pub seed: u64,
}

const COLUMNS: &str = "level,N_k,evals_k,step_inf_norm,F_value,err_vs_reference,decay_rate";

fn err_cell(z: &[f64], reference: Option<&[f64]>) -> String {
    reference.map_or(String::new(), |r| {
        num(z.iter().zip(r).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    })
}

fn head(header: &ReportHeader) -> String {
    format!("# spec: {}\n# seed: {}\n{COLUMNS}\n", header.spec, header.seed)
}

/// Report CSV for a ladder run, plus comparison lines when `direct` is given.
pub fn render_report(
    header: &ReportHeader,
    report: &MrOptReport,
    reference: Option<&[f64]>,
    direct: Option<&DirectResult>,
) -> String {
    let mut s = head(header);
    for (i, level) in report.levels.iter().enumerate() {
        let decay = match report.decay_rates.get(i).copied().flatten() {
            _ if i == 0 => String::new(),
            Some(r) => num(r),
            None => "undefined".into(),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            level.level,
            level.n_k,
            level.evals,
            num(level.step_norm),
            num(level.f_value),
            err_cell(&report.solutions[i + 1], reference),
            decay
        );
    }
    let _ = writeln!(s, "total_evals,{}", report.total_evals);
    let _ = writeln!(s, "stopped_early,{}", report.stopped_early);
    if report.status != OptimStatus::Converged {
        let _ = writeln!(s, "status,{}", report.status.as_str());
    }
    if let Some(d) = direct {
        let _ = writeln!(s, "direct_evals,{}", d.evals);
        let ratio = eval_ratio(report.total_evals, d.evals).map_or("undefined".into(), num);
        let _ = writeln!(s, "eval_ratio,{ratio}");
        if d.status != OptimStatus::Converged {
            let _ = writeln!(s, "direct_status,{}", d.status.as_str());
        }
    }
    s
}

fn render_direct(header: &ReportHeader, d: &DirectResult, problem: &ProblemInstance, reference: Option<&[f64]>) -> String {
    let mut s = head(header);
    let h = problem.hierarchy;
    let step = d
        .z
        .iter()
        .zip(&problem.initial_guess)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},",
        h.levels(),
        h.finest_len(),
        d.evals,
        num(step),
        num(d.f_value),
        err_cell(&d.z, reference)
    );
    let _ = writeln!(s, "total_evals,{}", d.evals);
    let _ = writeln!(s, "stopped_early,false");
    if d.status != OptimStatus::Converged {
        let _ = writeln!(s, "status,{}", d.status.as_str());
    }
    s
}

/// Writes a report CSV for `report`.
pub fn emit_report(header: &ReportHeader, report: &MrOptReport, reference: Option<&[f64]>, path: &Path) -> Result<()> {
    write_file(path, &render_report(header, report, reference, None))
}

/// Grid dump: `x,value` lines in 1D, `x,y,value` lines (row-major, `y`
/// outer) in 2D.
pub fn render_dump(values: &[f64], dim: Dim) -> String {
    let mut s = String::new();
    match dim {
        Dim::One => {
            let h = 1.0 / (values.len().max(2) - 1) as f64;
            for (i, v) in values.iter().enumerate() {
                let _ = writeln!(s, "{},{}", num(i as f64 * h), num(*v));
            }
        }
        Dim::Two => {
            let side = (values.len() as f64).sqrt().round() as usize;
            let h = 1.0 / (side.max(2) - 1) as f64;
            for (p, v) in values.iter().enumerate() {
                let _ = writeln!(s, "{},{},{}", num((p % side) as f64 * h), num((p / side) as f64 * h), num(*v));
            }
        }
    }
    s
}

pub fn dump_solution(values: &[f64], dim: Dim, path: &Path) -> Result<()> {
    write_file(path, &render_dump(values, dim))
}

/// Values column of a dump written by [`dump_solution`].
pub fn parse_dump(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            line.rsplit(',')
                .next()
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| BenchError::Parse {
                    path: path.to_path_buf(),
                    msg: format!("line {}: `{line}`", i + 1),
                })
        })
        .collect()
}
