use std::process::ExitCode;

use clap::Parser;
use mortar_fem_cli::{run, Cli};

fn main() -> ExitCode {
    // clap exits with 2 on usage errors; 2 is reserved for numerical failures
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
