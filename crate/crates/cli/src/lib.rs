//! Command-line surface: `explore`, `baseline`, `verify`, `plotdata`.

pub mod bundle;
pub mod commands;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, EXIT_ERROR, EXIT_OK, EXIT_SAFETY_VIOLATION, EXIT_VERIFY_FAILED};

#[derive(Debug, Parser)]
#[command(
    name = "etc-explore",
    version,
    about = "Safe exploration of event-trigger parameters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run safe active exploration and write the output bundle.
    Explore(RunArgs),
    /// Run the uniform random-search baseline.
    Baseline(RunArgs),
    /// Re-simulate every certified grid point of a finished run.
    Verify {
        /// Directory written by `explore`.
        run_dir: PathBuf,
    },
    /// Emit columnar data for the parameter-space, trajectory and safety-series plots.
    Plotdata {
        run_dir: PathBuf,
        /// Number of trajectories re-simulated from the certified set.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in configuration (`paper_iv`).
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid points per parameter dimension.
    #[arg(long)]
    pub grid_res: Option<usize>,
    /// Episode horizon in seconds.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Integration step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of exploration iterations (random-search draws for `baseline`).
    #[arg(long)]
    pub n_exp: Option<usize>,
    #[arg(long)]
    pub n_init: Option<usize>,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Explore(args) => commands::explore(&args),
        Command::Baseline(args) => commands::baseline(&args),
        Command::Verify { run_dir } => commands::verify(&run_dir),
        Command::Plotdata { run_dir, samples } => commands::plotdata(&run_dir, samples),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
