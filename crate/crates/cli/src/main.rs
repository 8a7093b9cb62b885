use std::io;
use std::process::ExitCode;

use clap::Parser;

use fraclangevin::args::Cli;
use fraclangevin::{run, Io};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut stdout, mut stderr) = (io::stdout().lock(), io::stderr());
    let mut io = Io { stdout: &mut stdout, stderr: &mut stderr };
    match run(&cli, &mut io) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
