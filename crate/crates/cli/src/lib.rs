//! Command-line front end: configuration, presets and the subcommands of the
//! `mfunclab` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::info;
use mfunclab::par::Execution;

pub use config::{Config, CONFIG_SCHEMA};
pub use error::CliError;

use commands::RunContext;

#[derive(Debug, Parser)]
#[command(name = "mfunclab", version, about = "Spectral scans and M-function checks for boundary realizations")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Overrides `grid_n` from the configuration.
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic determinant and |M| over the λ-window.
    Scan,
    /// M-functions of the coefficient twins and their essential spectra.
    CompareTwins,
    /// Kreĭn resolvent formula against the direct solve.
    KreinVerify {
        /// Trials per λ, overriding the configuration.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Symbol tables for the half-space model.
    Halfspace,
    /// Runs a shipped preset: decoupled, generic or counterexample.
    Demo { name: String },
}

impl Cli {
    pub fn execution(&self) -> Execution {
        match self.workers {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }
}

fn load_config(cli: &Cli, required: bool) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None if required => return Err(CliError::Config("--config is required for this command".into())),
        None => Config::empty(),
    };
    apply_overrides(cli, &mut cfg)?;
    Ok(cfg)
}

fn apply_overrides(cli: &Cli, cfg: &mut Config) -> Result<(), CliError> {
    if let Some(n) = cli.grid_n {
        if n < 9 || n % 2 == 0 {
            return Err(CliError::Config(format!("--grid-n {n}: need an odd number >= 9")));
        }
        cfg.grid_n = Some(n);
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Runs one demo preset: writes the resolved configuration, then the
/// commands the preset has sections for.
pub fn run_demo(name: &str, cli: &Cli, ctx: &RunContext) -> Result<(), CliError> {
    let mut cfg = presets::preset(name).ok_or_else(|| {
        CliError::Config(format!("unknown demo {name:?}; expected one of {}", presets::PRESETS.join(", ")))
    })?;
    apply_overrides(cli, &mut cfg)?;
    output::write_json(&ctx.out.join("config.json"), &cfg)?;
    if cfg.twin.is_some() {
        let r = commands::cmd_compare_twins(&cfg, ctx)?;
        info!("demo {name}: twins pass = {}", r.pass);
    }
    commands::cmd_scan(&cfg, ctx)?;
    if cfg.krein.is_some() {
        let r = commands::cmd_krein_verify(&cfg, ctx, None)?;
        info!("demo {name}: krein pass = {}", r.pass);
    }
    Ok(())
}

/// Executes the parsed command line.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    ensure_dir(&cli.out)?;
    let ctx = RunContext { out: &cli.out, seed: cli.seed, exec: cli.execution() };
    match &cli.command {
        Command::Scan => {
            commands::cmd_scan(&load_config(cli, true)?, &ctx)?;
        }
        Command::CompareTwins => {
            let r = commands::cmd_compare_twins(&load_config(cli, true)?, &ctx)?;
            println!("max_M_diff={:e} hausdorff={} pass={}", r.max_m_diff, r.hausdorff, r.pass);
        }
        Command::KreinVerify { trials } => {
            let r = commands::cmd_krein_verify(&load_config(cli, true)?, &ctx, *trials)?;
            match (r.max, r.median) {
                (Some(m), Some(md)) => println!("trials={} max={m:e} median={md:e} pass={}", r.trials.len(), r.pass),
                _ => println!("trials=0"),
            }
        }
        Command::Halfspace => {
            let r = commands::cmd_halfspace(&load_config(cli, false)?, &ctx)?;
            println!("rows={} max_det_p_check={:e}", r.rows, r.max_det_p_check);
        }
        Command::Demo { name } => run_demo(name, cli, &ctx)?,
    }
    Ok(())
}
