//! Drives the `verify` subcommand in-process and prints its report.

use clap::Parser;
use lieqs::cli::{run, Cli};

fn main() {
    let dir = std::env::temp_dir().join("lieqs-example");
    let args = ["lieqs", "verify", "--suite", "all", "--n", "3", "--trials", "20", "--output-dir", dir.to_str().unwrap()];
    let cli = Cli::parse_from(args);
    let code = run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    let report = std::fs::read_to_string(dir.join("report.txt")).unwrap_or_default();
    println!("--- first lines of {} ---", dir.join("report.txt").display());
    for line in report.lines().take(20) {
        println!("{line}");
    }
    std::process::exit(code);
}
