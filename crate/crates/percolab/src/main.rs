use clap::Parser;
use percolab::experiment::{run, Command};
use percolab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Bond percolation experiments on finite graphs with a halo.
#[derive(Parser)]
#[command(name = "percolab", version, arg_required_else_help = true)]
struct Cli {
    /// Read the whole configuration from a JSON file instead of flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 means all cores. Overrides PERCOLAB_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn report(e: &Error) -> ExitCode {
    let body = serde_json::json!({"error": {"category": e.category(), "message": e.to_string()}});
    eprintln!("{body}");
    match e {
        Error::Argument(_) | Error::Json(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = match (&cli.config, cli.command) {
        (Some(path), None) => match std::fs::read_to_string(path).map_err(Error::from).and_then(|t| Command::from_json(&t)) {
            Ok(c) => c,
            Err(e) => return report(&e),
        },
        (None, Some(c)) => c,
        (Some(_), Some(_)) => return report(&Error::Argument("--config replaces the subcommand; give one or the other".into())),
        (None, None) => return report(&Error::Argument("no subcommand".into())),
    };
    if let Some(w) = cli.workers {
        std::env::set_var("PERCOLAB_WORKERS", w.to_string());
    }
    match run(&cmd) {
        Ok(m) if m.failed_check => ExitCode::from(3),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
