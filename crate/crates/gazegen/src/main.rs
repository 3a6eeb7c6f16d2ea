use clap::Parser;

use gazegen::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
