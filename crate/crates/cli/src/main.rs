use clap::Parser;

fn main() {
    std::process::exit(evdd_cli::run(evdd_cli::args::Cli::parse()));
}
