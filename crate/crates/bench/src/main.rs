use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mropt::problems::ProblemName;
use mropt_bench::{default_grid, run_experiment, BenchError, Mode, OptimizerChoice, RunSpec};

/// Run one coarse-to-fine optimization experiment and write a CSV report.
#[derive(Debug, Parser)]
#[command(name = "mropt-bench", version)]
struct Args {
    /// bvp1d, poisson2d, mins or morebv
    #[arg(long)]
    problem: String,
    /// Prediction degree (1, 3 or 5)
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Cells of the coarsest grid
    #[arg(long)]
    j0: Option<usize>,
    /// Number of refinements L
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// quasi_newton, pattern_search or oracle
    #[arg(long, default_value = "pattern_search")]
    optimizer: String,
    /// mropt, direct or both
    #[arg(long, default_value = "mropt")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "report.csv")]
    out: PathBuf,
    #[arg(long)]
    dump_solutions: bool,
    #[arg(long)]
    dump_limit_basis: bool,
    #[arg(long)]
    dump_smoothness: bool,
    #[arg(long)]
    max_evals: Option<u64>,
}

fn spec(args: Args) -> Result<RunSpec, BenchError> {
    let problem: ProblemName = args.problem.parse()?;
    let (j0, levels) = default_grid(problem);
    Ok(RunSpec {
        problem,
        n: args.n,
        j0: args.j0.unwrap_or(j0),
        levels: args.levels.unwrap_or(levels),
        tol: args.tol,
        optimizer: args.optimizer.parse::<OptimizerChoice>()?,
        mode: args.mode.parse::<Mode>()?,
        seed: args.seed,
        max_evals: args.max_evals,
        out: args.out,
        dump_solutions: args.dump_solutions,
        dump_limit_basis: args.dump_limit_basis,
        dump_smoothness: args.dump_smoothness,
    })
}

fn main() -> ExitCode {
    let outcome = spec(Args::parse()).and_then(|s| run_experiment(&s));
    match outcome {
        Ok(o) => {
            for f in &o.files {
                println!("{}", f.display());
            }
            if let Some(r) = o.eval_ratio {
                println!("eval_ratio {r:.4}");
            }
            if o.failed() {
                eprintln!("optimizer failed; partial report written");
            }
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
