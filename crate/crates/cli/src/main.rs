//! `centralforce` command-line front end.
//!
//! Exit codes: 0 success, 1 analysis failure, 2 configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use output::OutDir;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Analysis(String),
}

impl From<centralforce::Error> for CliError {
    fn from(e: centralforce::Error) -> Self {
        match e {
            centralforce::Error::Config { .. } => CliError::Config(e.to_string()),
            _ => CliError::Analysis(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "centralforce",
    version,
    about = "Action-angle, Arnold determinant and drift analyses of central-force Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomly drawn initial data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Critical-point branches and momentum intervals.
    Profile,
    /// Action and frequency grid on a chart, optional log asymptotics.
    Actions,
    /// Arnold determinant map and zero set.
    Arnold,
    /// Closed-form frequency-ratio coefficients against quadrature.
    Birkhoff,
    /// Whether the frequency ratio is constant on a chart.
    Bertrand,
    /// Drift of |L| and H under perturbation.
    Nekhoroshev,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Actions => "actions",
            Command::Arnold => "arnold",
            Command::Birkhoff => "birkhoff",
            Command::Bertrand => "bertrand",
            Command::Nekhoroshev => "nekhoroshev",
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<String>, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = RunConfig::load(path)?;
    cfg.check_analysis(cli.command.name())?;
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Analysis(e.to_string()))?;
    }
    let mut out = OutDir::create(&cli.out)?;
    match cli.command {
        Command::Profile => commands::profile(&cfg, &mut out)?,
        Command::Actions => commands::actions(&cfg, &mut out)?,
        Command::Arnold => commands::arnold(&cfg, &mut out)?,
        Command::Birkhoff => commands::birkhoff(&cfg, &mut out)?,
        Command::Bertrand => commands::bertrand(&cfg, &mut out)?,
        Command::Nekhoroshev => commands::nekhoroshev(&cfg, &mut out, cli.seed)?,
    }
    Ok(out.written().to_vec())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", cli.out.join(f).display());
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Analysis(msg)) => {
            eprintln!("analysis failed: {msg}");
            ExitCode::from(1)
        }
    }
}
