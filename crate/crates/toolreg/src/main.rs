use std::process::ExitCode;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use toolreg::cli::{run, Cli};

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli).await {
        Ok(outcome) => {
            if let Err(e) = outcome.emit(format, &mut std::io::stdout().lock()) {
                eprintln!("error: writing output: {e}");
                return ExitCode::FAILURE;
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
