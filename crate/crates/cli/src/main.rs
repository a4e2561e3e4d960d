use std::io::Write;
use std::process::ExitCode;

use ci_overlap_cli::{run, Cli, Failure};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut stdin.lock(), &mut out) {
        Ok(code) => code,
        Err(err) => {
            let code = match err.downcast_ref::<Failure>() {
                Some(failure) => failure.code(),
                None => match err.downcast_ref::<ci_overlap::Error>() {
                    Some(ci_overlap::Error::Frozen(_)) => 4,
                    _ => 2,
                },
            };
            let _ = out.flush();
            eprintln!("error: {err:#}");
            code
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
