mod args;
mod commands;
mod render;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Help and version requests are not errors.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let (report, json) = commands::run(&cli.command);
    if json {
        match serde_json::to_string_pretty(&report) {
            // A closed pipe is not worth a panic.
            Ok(text) => {
                let _ = writeln!(std::io::stdout().lock(), "{text}");
            }
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(3);
            }
        }
    } else {
        let text = render::human(&report);
        let _ = if report.exit.code == 3 {
            std::io::stderr().lock().write_all(text.as_bytes())
        } else {
            std::io::stdout().lock().write_all(text.as_bytes())
        };
    }
    ExitCode::from(report.exit.code as u8)
}
