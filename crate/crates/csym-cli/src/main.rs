use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csym_core::ToleranceConfig;

use csym_cli::commands::{self, CliError, RankChoice};

/// Certification of complex symmetric partial isometries: generation,
/// certification with explicit witness conjugations, Monte Carlo sweeps,
/// counterexample search, Aluthge transforms, and unitary extension.
#[derive(Parser)]
#[command(name = "csym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    tolerances: ToleranceArgs,

    /// Worker threads for restart loops and Monte Carlo trials
    /// (deterministic for any value).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Human-readable summary on standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Args)]
struct ToleranceArgs {
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-10)]
    eps_rank: f64,

    /// Relative residual tolerance for certification.
    #[arg(long, global = true, default_value_t = 1e-8)]
    eps_res: f64,

    /// Restart budget for the detection and oracle searches.
    #[arg(long, global = true, default_value_t = 16)]
    restarts: usize,

    /// Iteration budget per restart.
    #[arg(long, global = true, default_value_t = 400)]
    max_iter: usize,

    /// Base seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random rank-r partial isometry.
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        /// Output matrix file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide complex symmetry of the partial isometry in a file.
    Certify {
        input: PathBuf,
        /// Write the witness conjugation matrix here when positive.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a stream of seeded samples and report aggregate counts.
    Montecarlo {
        #[arg(long)]
        dim: usize,
        /// A fixed rank, or "all" for a seeded uniform mix over 0..=dim.
        #[arg(long, default_value = "all")]
        rank: String,
        #[arg(long)]
        trials: usize,
    },
    /// Search seeded samples for a corroborated negative instance.
    FindNegative {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        budget: usize,
        /// Write the found instance here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend a C-symmetric partial isometry to a C-symmetric unitary.
    Extend {
        input: PathBuf,
        conjugation: PathBuf,
        #[arg(long)]
        out_u: Option<PathBuf>,
        #[arg(long)]
        out_p: Option<PathBuf>,
    },
    /// Aluthge transform, file in, file out.
    Aluthge {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimization-oracle evidence for complex symmetry of a square matrix.
    Oracle {
        input: PathBuf,
        /// Write the best symmetric unitary found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<csym_cli::Report, CliError> {
    let cfg = ToleranceConfig {
        eps_rank: cli.tolerances.eps_rank,
        eps_res: cli.tolerances.eps_res,
        restarts: cli.tolerances.restarts,
        max_iter: cli.tolerances.max_iter,
        seed: cli.tolerances.seed,
    };
    cfg.validate()
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    let jobs = cli.jobs;
    commands::with_pool(jobs, move || match &cli.command {
        Command::Gen { dim, rank, out } => commands::cmd_gen(*dim, *rank, &cfg, out),
        Command::Certify { input, out } => commands::cmd_certify(input, &cfg, out.as_deref()),
        Command::Montecarlo { dim, rank, trials } => {
            let rank = if rank == "all" {
                RankChoice::All
            } else {
                let r: usize = rank
                    .parse()
                    .map_err(|_| CliError::Invalid(format!("bad rank '{rank}'")))?;
                RankChoice::Fixed(r)
            };
            commands::cmd_montecarlo(*dim, rank, *trials, &cfg)
        }
        Command::FindNegative {
            dim,
            rank,
            budget,
            out,
        } => commands::cmd_find_negative(*dim, *rank, *budget, &cfg, out.as_deref()),
        Command::Extend {
            input,
            conjugation,
            out_u,
            out_p,
        } => commands::cmd_extend(input, conjugation, &cfg, out_u.as_deref(), out_p.as_deref()),
        Command::Aluthge { input, out } => commands::cmd_aluthge(input, &cfg, out),
        Command::Oracle { input, out } => commands::cmd_oracle(input, &cfg, out.as_deref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verbose = cli.verbose;
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render());
            if verbose {
                eprintln!("{}", commands::summarize(&report));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
