mod args;
mod commands;
mod context;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{AnalyzeCommand, Cli, Command};
use paraeval_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_PROVIDER: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) => EXIT_USAGE,
        e if e.is_provider_error() => EXIT_PROVIDER,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };

    let threads = cli.threads.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_USAGE);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(EXIT_USAGE);
    }

    let result = match &cli.command {
        Command::Score(a) => commands::score(a, threads),
        Command::Evaluate(a) => commands::evaluate(a, threads),
        Command::Analyze(AnalyzeCommand::DistanceGroups(a)) => commands::distance_groups(a, threads),
        Command::Analyze(AnalyzeCommand::Cases(a)) => commands::cases(a, threads),
        Command::Analyze(AnalyzeCommand::Attribution(a)) => commands::attribution(a, threads),
        Command::Tune(a) => commands::tune(a, threads),
        Command::Extend(a) => commands::extend(a, threads),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(exit_code(&e))
        }
    }
}
