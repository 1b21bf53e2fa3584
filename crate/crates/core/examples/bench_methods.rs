//! Median wall time of each method on noisy fields of several sizes.

use clap::Parser;
use sfd::cli::{bench_table, cmd_bench, Cli, Command};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cli = Cli::parse_from(["sfd", "bench", "--sizes", "64,128", "--methods", "gaussian,median,nlm,wff,stbpf", "--reps", "3"]);
    let Command::Bench(args) = cli.command else { unreachable!() };
    print!("{}", bench_table(&cmd_bench(&args)?));
    Ok(())
}
