use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use mconc_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (text, failures) = match execute(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("mconc: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("mconc: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if failures > 0 {
        eprintln!("mconc: {failures} check(s) failed");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
