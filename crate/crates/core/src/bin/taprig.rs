use clap::Parser;

fn main() {
    let cli = taprig_core::cli::Cli::parse();
    std::process::exit(taprig_core::cli::dispatch(cli));
}
