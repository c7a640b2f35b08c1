use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coreshell::app::{self, Command, Solver, Study};
use coreshell::config::parse_config;

#[derive(Parser)]
#[command(name = "coreshell", version, about = "Core-shell reaction-diffusion solver and estimate audits")]
struct Cli {
    /// Output root; each run writes into <out>/<command>/
    #[arg(long, global = true, env = "CORESHELL_OUT")]
    out: Option<PathBuf>,

    /// Seed for randomized audits (overrides the config)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Suppress the per-run status line
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct ConfigArg {
    /// Experiment config (JSON)
    config: PathBuf,
}

#[derive(Args)]
struct SolverArg {
    /// Use the nodal method-of-lines solver instead of the Galerkin one
    #[arg(long)]
    fem: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Leading eigenpairs of the diffraction operator
    Eigen(ConfigArg),
    /// Time integration with per-step norm table
    Solve {
        #[command(flatten)]
        cfg: ConfigArg,
        #[command(flatten)]
        solver: SolverArg,
    },
    /// Steady state by damped Newton
    Stationary(ConfigArg),
    /// Audit the weak and strong energy estimates along a trajectory
    Energy {
        #[command(flatten)]
        cfg: ConfigArg,
        #[command(flatten)]
        solver: SolverArg,
    },
    /// Convergence tables
    Converge {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Galerkin truncation against the nodal solver
        #[arg(long, conflicts_with = "mesh", required_unless_present = "mesh")]
        galerkin: bool,
        /// Nodal solver under mesh refinement
        #[arg(long)]
        mesh: bool,
    },
    /// Smoothed-interface study
    Regularize(ConfigArg),
    /// Continuous-dependence bounds on seeded perturbation pairs
    Depend(ConfigArg),
    /// Print the admissibility and Lipschitz constants
    Certify(ConfigArg),
}

fn solver(s: &SolverArg) -> Solver {
    if s.fem {
        Solver::Fem
    } else {
        Solver::Galerkin
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, path) = match &cli.command {
        Cmd::Eigen(c) => (Command::Eigen, &c.config),
        Cmd::Solve { cfg, solver: s } => (Command::Solve(solver(s)), &cfg.config),
        Cmd::Stationary(c) => (Command::Stationary, &c.config),
        Cmd::Energy { cfg, solver: s } => (Command::Energy(solver(s)), &cfg.config),
        Cmd::Converge { cfg, mesh, .. } => {
            (Command::Converge(if *mesh { Study::Mesh } else { Study::Galerkin }), &cfg.config)
        }
        Cmd::Regularize(c) => (Command::Regularize, &c.config),
        Cmd::Depend(c) => (Command::Depend, &c.config),
        Cmd::Certify(c) => (Command::Certify, &c.config),
    };

    let mut cfg = match parse_config(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone());

    match app::run(command, &cfg, &out) {
        Ok(outcome) => {
            if command == Command::Certify {
                println!("{}", serde_json::to_string_pretty(&outcome.summary).expect("json"));
            }
            if !cli.quiet {
                let verdict = if outcome.pass { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {} -> {}", command.name(), outcome.directory.display());
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 1 })
        }
    }
}
