use std::process::ExitCode;

use clap::Parser;
use dimerdyn_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            if let Some(report) = summary.report {
                print!("{report}");
            }
            for f in &summary.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dimerdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
