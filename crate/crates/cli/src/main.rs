mod args;
mod commands;
mod diag;
mod output;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use diag::Diagnostic;

fn report(d: &Diagnostic) {
    eprintln!("{}", serde_json::to_string(d).unwrap_or_else(|_| d.message.clone()));
}

fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            report(&Diagnostic::from_clap(&e));
            return 2;
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match commands::dispatch(&cli) {
        Ok(()) => 0,
        Err(d) => {
            report(&d);
            d.exit_code
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
