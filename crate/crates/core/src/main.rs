use clap::Parser;

fn main() {
    std::process::exit(bitrade::cli::main_with(bitrade::cli::Args::parse()));
}
