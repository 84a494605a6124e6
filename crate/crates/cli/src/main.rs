//! `esrad` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::KeyValues;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<esrad::Error> for CliError {
    fn from(e: esrad::Error) -> Self {
        match e {
            esrad::Error::Integration { .. } | esrad::Error::IllConditionedFit { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Human-readable report; `audit` only.
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RegimeArg {
    Adiabatic,
    Sudden,
}

#[derive(Debug, Parser)]
#[command(
    name = "esrad",
    version,
    about = "Radiation of a two-level atom dressed by a strong near-resonant field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Override a configuration key, e.g. `--set alpha=3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Decide process directions from the exact dipole spectra.
    #[arg(long, global = true, conflicts_with = "asymptotic")]
    exact: bool,

    /// Decide process directions from the truncated coefficients.
    #[arg(long, global = true)]
    asymptotic: bool,

    #[arg(long, global = true, value_enum)]
    regime: Option<RegimeArg>,

    /// `start:stop:points(log|lin)`, e.g. `0.01:100:41log`.
    #[arg(long = "alpha-grid", global = true, value_name = "GRID")]
    alpha_grid: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Dressed-state parameters for one configuration or an alpha sweep.
    Params,
    /// Sideband positions against both caption asymptotes.
    Fig1,
    /// First-order emission/absorption table.
    Table,
    /// Dressed dipole spectral components.
    Dipoles,
    /// Time-domain oracle compared with the analytic components.
    Oracle,
    /// Ensemble intensity scaling with atom number.
    Ensemble,
    /// Discrepancies between printed truncations and exact mode.
    Audit,
}

impl Cli {
    /// File keys first, then flags, then `--set` overrides.
    fn key_values(&self) -> Result<KeyValues, CliError> {
        let mut kv = match &self.config {
            Some(p) => KeyValues::load(p)?,
            None => KeyValues::default(),
        };
        if let Some(s) = self.seed {
            kv.set_value("seed", &s.to_string());
        }
        if self.exact {
            kv.set_value("mode", "exact");
        }
        if self.asymptotic {
            kv.set_value("mode", "asymptotic");
        }
        if let Some(r) = self.regime {
            let name = match r {
                RegimeArg::Adiabatic => "adiabatic",
                RegimeArg::Sudden => "sudden",
            };
            kv.set_value("regime", name);
        }
        if let Some(g) = &self.alpha_grid {
            kv.set_value("alpha_grid", g);
        }
        for pair in &self.overrides {
            kv.set(pair)?;
        }
        Ok(kv)
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let kv = cli.key_values()?;
    if cli.format == Format::Text && !matches!(cli.command, Command::Audit) {
        return Err(CliError::Config(
            "--format text is only available for `audit`".into(),
        ));
    }
    let bytes = match cli.command {
        Command::Params => commands::params(&kv, cli.format)?,
        Command::Fig1 => commands::fig1(&kv, cli.format)?,
        Command::Table => commands::table(&kv, cli.format)?,
        Command::Dipoles => commands::dipoles(&kv, cli.format)?,
        Command::Oracle => commands::oracle(&kv, cli.format)?,
        Command::Ensemble => commands::ensemble(&kv, cli.format)?,
        Command::Audit => commands::audit(&kv, cli.format)?,
    };
    output::emit(&bytes, cli.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("esrad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
