use std::io::{ErrorKind, Write};
use std::process::ExitCode;

use clap::Parser;
use nilrad::{execute, Cli};
use serde_json::json;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|report| {
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        match &cli.output {
            Some(path) => std::fs::write(path, text + "\n")?,
            None => match writeln!(std::io::stdout(), "{}", text) {
                Err(e) if e.kind() == ErrorKind::BrokenPipe => {}
                r => r?,
            },
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut err = json!({"error": e.kind(), "message": e.to_string()});
            if let Some(h) = e.hint() {
                err["hint"] = json!(h);
            }
            eprintln!("{}", err);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
