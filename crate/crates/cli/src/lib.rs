//! Command-line front end: argument parsing, mesh sources, report
//! envelopes and the subcommands.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;
pub mod source;

use args::{Cli, Command};
use clap::Parser;
pub use commands::Outcome;
pub use error::{CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};

/// Runs a parsed command, honouring `--threads`.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let timestamp = !cli.no_timestamp;
    let threads = cli.threads;
    let work = || match &cli.command {
        Command::Mesh(c) => commands::mesh(c, threads, timestamp),
        Command::Betti(c) => commands::betti(c, threads, timestamp),
        Command::Constants(c) => commands::constants(c, threads, timestamp),
        Command::Decompose(c) => commands::decompose(c, threads, timestamp),
        Command::Verify(c) => commands::verify(c, threads, timestamp),
        Command::Sweep(c) => commands::sweep(c, threads, timestamp),
    };
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let to_file = match &cli.command {
                Command::Mesh(c) => c.out.out.is_some(),
                Command::Betti(c) => c.out.out.is_some(),
                Command::Constants(c) => c.out.out.is_some(),
                Command::Decompose(c) => c.out.out.is_some(),
                Command::Verify(c) => c.out.out.is_some(),
                Command::Sweep(c) => c.out.out.is_some(),
            };
            if let Some(extra) = &out.extra {
                print!("{extra}");
            } else if !to_file {
                print!("{}", out.json);
            }
            if out.exit == EXIT_VIOLATION {
                eprintln!("kml: inequality violated beyond the allowed slack");
            }
            out.exit
        }
        Err(e) => {
            eprintln!("kml: {e}");
            e.exit_code()
        }
    }
}
