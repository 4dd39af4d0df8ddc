use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use crossmerge::bench::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(|e| crossmerge::bench::CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crossmerge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
