use clap::Parser;

fn main() {
    let cli = curvecensus_cli::config::Cli::parse();
    std::process::exit(curvecensus_cli::run(&cli));
}
