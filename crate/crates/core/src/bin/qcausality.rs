use clap::Parser;
use qcausality::cli;

fn main() {
    let args = cli::Cli::parse();
    std::process::exit(cli::run(args));
}
