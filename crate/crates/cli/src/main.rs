use std::process::ExitCode;

use clap::Parser;
use mfunclab_cli::{run, Cli, CliError};

fn run_with_workers(cli: &Cli) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.workers.filter(|&n| n > 1) {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("--workers {n}: {e}")))?;
        return pool.install(|| run(cli));
    }
    run(cli)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MFUNCLAB_LOG", "warn")).init();
    let cli = Cli::parse();
    if cli.workers == Some(0) {
        eprintln!("error: config: --workers must be at least 1");
        return ExitCode::from(2);
    }
    match run_with_workers(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
