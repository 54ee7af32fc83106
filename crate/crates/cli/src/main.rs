//! `actmap`: generate synthetic clouds, build mapper graphs, analyze them.

mod args;
mod commands;

use std::process::ExitCode;

use actmap::Error;
use clap::Parser;

use args::{Cli, Command};

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Param(_) | Error::NotFound(_) | Error::Io { .. } => 2,
        Error::Format(_) | Error::Data(_) | Error::Degenerate(_) | Error::Json(_) => 3,
    }
}

fn run(cli: Cli) -> actmap::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Param("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Param(format!("cannot size thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Build(a) => commands::build(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Stats(a) => commands::stats(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(4),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Param("x".into())), 2);
        assert_eq!(exit_code(&Error::NotFound("x".into())), 2);
        assert_eq!(exit_code(&Error::Data("x".into())), 3);
        assert_eq!(exit_code(&Error::Degenerate("x".into())), 3);
    }

    #[test]
    fn flags_parse() {
        Cli::try_parse_from(["actmap", "build", "--input", "a.bin", "--epsilon", "0.5", "--metric", "cosine"]).unwrap();
        assert!(Cli::try_parse_from(["actmap", "build", "--input", "a.bin", "--epsilon", "wide"]).is_err());
        assert!(Cli::try_parse_from(["actmap", "build", "--input", "a", "--manifest", "m"]).is_err());
    }
}
