use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dgne::cli::{run_from_path, validate_config, RunOptions};

#[derive(Parser)]
#[command(name = "dgne", version, about = "Distributed online GNE seeking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write trace.csv and summary.txt
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// KKT tolerance of the reference equilibrium solver
        #[arg(long)]
        gne_tol: Option<f64>,
        /// Abort with exit code 5 on the first violated bound
        #[arg(long)]
        hard_diagnostics: bool,
    },
    /// Parse and check a config without running it
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            gne_tol,
            hard_diagnostics,
        } => run_from_path(
            &config,
            &RunOptions {
                out,
                gne_tol,
                hard_diagnostics,
            },
        )
        .map(|outcome| {
            println!("{}", outcome.summary);
            println!("wrote {}", outcome.out_dir.display());
        }),
        Command::Validate { config } => validate_config(&config).map(|c| {
            println!(
                "ok: {:?} with {} players, horizon {}",
                c.game.kind, c.game.n_players, c.run.horizon
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
