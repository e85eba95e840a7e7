use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conflab_lab::{execute, RunOptions, ScenarioKind};

#[derive(Parser)]
#[command(name = "conflab", version, about = "Conformal DN-map laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conformal identities under refinement, round-off cases, hyperbolicity
    Identities(Flags),
    /// Flat base, plane-wave factor, same Γ-to-Γ DN data
    Thm11(Flags),
    /// Curved static base, manufactured factor, disjoint patches
    Thm12(Flags),
    /// Jet ODE equilibrium and Christoffel pullback
    Rigidity(Flags),
    /// Hessian non-isometry certificate
    Certify(Flags),
    /// Manufactured-solution convergence of the solver
    Convergence(Flags),
    /// Assemble one DN matrix
    Dnmap(Flags),
    /// Single forward solve with traces and snapshot
    Solve(Flags),
}

#[derive(Args)]
struct Flags {
    /// TOML file merged over the scenario defaults
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Finest refinement level
    #[arg(long, value_name = "K")]
    level: Option<u32>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for sampled checks
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Also run the control slab that crosses Γ (thm11)
    #[arg(long)]
    negative_control: bool,
}

impl Command {
    fn split(self) -> (ScenarioKind, Flags) {
        match self {
            Command::Identities(f) => (ScenarioKind::Identities, f),
            Command::Thm11(f) => (ScenarioKind::Thm11, f),
            Command::Thm12(f) => (ScenarioKind::Thm12, f),
            Command::Rigidity(f) => (ScenarioKind::Rigidity, f),
            Command::Certify(f) => (ScenarioKind::Certify, f),
            Command::Convergence(f) => (ScenarioKind::Convergence, f),
            Command::Dnmap(f) => (ScenarioKind::Dnmap, f),
            Command::Solve(f) => (ScenarioKind::Solve, f),
        }
    }
}

fn main() -> ExitCode {
    let (kind, f) = Cli::parse().command.split();
    let opts = RunOptions {
        config: f.config,
        level: f.level,
        out: f.out,
        seed: f.seed,
        negative_control: f.negative_control,
    };
    let result = opts.resolve(kind).and_then(|cfg| execute(&cfg).map(|r| (cfg, r)));
    match result {
        Ok((cfg, (summary, _))) => {
            for c in &summary.checks {
                println!("{}", c.line());
            }
            println!("summary: {}", cfg.output.dir.join("summary.json").display());
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("conflab {kind}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
