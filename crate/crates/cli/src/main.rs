use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tcpgds::config::{default_seed, parse_vector, ExperimentConfig, ProblemSource, X0Source};
use tcpgds::experiment::{report_table, run_experiment};
use tcpgds_core::{parse_activation_list, IntegratorConfigF64, Method, Verdict};

/// Solve tensor complementarity problems by integrating a gradient flow.
#[derive(Debug, Parser)]
#[command(name = "tcpgds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the flow once per activation and write CSV trajectories
    /// plus summary.json.
    Solve(SolveArgs),
    /// Check whether a point solves the problem.
    Verify(VerifyArgs),
    /// Search for a vector showing the tensor is not a P-tensor.
    CheckPtensor(CheckArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// builtin:eg1|eg2|eg3, file:PATH or diag:m=M,n=N,seed=S
    #[arg(long)]
    problem: ProblemSource,
    /// Comma-separated q; defaults to the builtin's q or the file's q.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
}

impl ProblemArgs {
    fn q(&self) -> Result<Option<Vec<f64>>> {
        self.q.as_deref().map(|s| parse_vector(s).context("invalid --q")).transpose()
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rk45,
    Rk4,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Semicolon-separated activations, e.g. "lin;bs:q=7;ps:p=5,q=7".
    #[arg(long)]
    act: Option<String>,
    #[arg(long, default_value_t = 1e6)]
    gamma: f64,
    /// Initial state "v1,...,vn" or "seed:N" (uniform on [0,1)).
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Residual tolerance for convergence.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Horizon in scaled time.
    #[arg(long, default_value_t = 100.0)]
    tmax: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Rk45)]
    method: MethodArg,
    /// Fixed step (rk4) or initial step (rk45), in scaled time.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Keep every k-th step in the CSV; the last state is always kept.
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// Defaults to TCPGDS_SEED, else 1.
    #[arg(long)]
    seed: Option<u64>,
}

fn solve(args: SolveArgs) -> Result<bool> {
    let activations = args
        .act
        .as_deref()
        .map(parse_activation_list)
        .transpose()
        .context("invalid --act")?;
    let x0 = match args.x0.as_deref() {
        Some(s) => s.parse::<X0Source>().context("invalid --x0")?,
        None => X0Source::Seed { seed: default_seed()? },
    };
    let cfg = ExperimentConfig {
        q: args.problem.q()?,
        problem: args.problem.problem,
        activations,
        gamma: args.gamma,
        integrator: IntegratorConfigF64 {
            method: match args.method {
                MethodArg::Rk45 => Method::Rk45Adaptive,
                MethodArg::Rk4 => Method::Rk4Fixed,
            },
            step: args.step,
            t_max: args.tmax,
            res_tol: args.tol,
            max_steps: args.max_steps,
            record_every: args.record_every,
            ..IntegratorConfigF64::default()
        },
        x0,
        out: args.out,
    };
    let summary = run_experiment(&cfg)?;
    print!("{}", report_table(&summary.runs));
    Ok(summary.all_converged())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let problem = args.problem.problem.load(args.problem.q()?.as_deref())?.problem;
    let x = parse_vector(&args.x).context("invalid --x")?;
    anyhow::ensure!(args.tol > 0.0, "--tol must be positive");
    let verdict = problem.verify_solution(&x, args.tol)?;
    match &verdict {
        Verdict::Solution => println!("solution (tol {:e})", args.tol),
        Verdict::Violations(vs) => {
            println!("not a solution (tol {:e})", args.tol);
            for v in vs {
                println!("  {v}");
            }
        }
    }
    Ok(verdict.is_solution())
}

fn check_ptensor(args: CheckArgs) -> Result<bool> {
    let problem = args.problem.problem.load(args.problem.q()?.as_deref())?.problem;
    let seed = match args.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    let verdict = problem.tensor().p_tensor_sample_check(args.trials, seed);
    println!("{}", serde_json::to_string(&verdict)?);
    Ok(!verdict.is_counterexample())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::CheckPtensor(a) => check_ptensor(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
