use clap::Parser;

fn main() {
    let cli = kerrcap_cli::Cli::parse();
    std::process::exit(kerrcap_cli::run(cli));
}
