use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match seccap::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors; bad usage is invalid input
            return ExitCode::from(if e.use_stderr() { seccap::commands::EXIT_INPUT } else { 0 });
        }
    };
    ExitCode::from(seccap::run(cli))
}
