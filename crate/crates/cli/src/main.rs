use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mtmbsp_cli::commands;
use mtmbsp_cli::output::Manifest;
use mtmbsp_cli::{CliError, Overrides, Result, RunConfig, THREADS_ENV};

/// Mixed-type multivariate Bayesian regression with shrinkage priors.
///
/// Exit codes: 0 ok, 2 invalid input or configuration, 3 numerical failure,
/// 4 I/O or checksum failure. The worker thread count comes from MTMBSP_THREADS.
#[derive(Parser)]
#[command(name = "mtmbsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the model to X/Y files described by a schema.
    Fit {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run simulated replicates and write metric tables.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Print the planned cells and exit without sampling.
        #[arg(long)]
        dry_run: bool,
    },
    /// Recompute the quantile table from a draws file.
    Summarize {
        draws: PathBuf,
        #[arg(long, default_value_t = 0.025)]
        lower: f64,
        #[arg(long, default_value_t = 0.975)]
        upper: f64,
        /// Write here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML file with any RunConfig keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Take the configuration from an earlier run's manifest.json.
    #[arg(long, conflicts_with = "config")]
    from_manifest: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
    #[command(flatten)]
    overrides: Overrides,
}

impl RunArgs {
    fn resolve(self, command: &str) -> Result<(RunConfig, bool)> {
        let mut cfg = match (&self.config, &self.from_manifest) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(path)) => {
                let m = Manifest::load(path)?;
                if m.command != command {
                    return Err(CliError::validation(format!(
                        "{} records a `{}` run, not `{command}`",
                        path.display(),
                        m.command
                    )));
                }
                m.config
            }
            (None, None) => RunConfig::default(),
        };
        self.overrides.apply(&mut cfg);
        Ok((cfg, self.print_config))
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::validation(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Fit { run } => {
            let (cfg, print) = run.resolve("fit")?;
            if print {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            let dir = commands::fit(&cfg)?;
            eprintln!("wrote {}", dir.display());
        }
        Command::Simulate { run, dry_run } => {
            let (cfg, print) = run.resolve("simulate")?;
            if print {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            if dry_run {
                print!("{}", commands::simulation_plan(&cfg)?);
                return Ok(());
            }
            let dir = commands::simulate(&cfg, &mut |line| eprintln!("{line}"))?;
            eprintln!("wrote {}", dir.display());
        }
        Command::Summarize { draws, lower, upper, output } => {
            let table = commands::summarize(&draws, lower, upper)?;
            match output {
                Some(path) => std::fs::write(&path, table).map_err(|e| CliError::io(&path, e))?,
                None => std::io::stdout()
                    .write_all(table.as_bytes())
                    .map_err(|e| CliError::Io(format!("stdout: {e}")))?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
