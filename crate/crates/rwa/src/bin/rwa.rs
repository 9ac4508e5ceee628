use clap::Parser;

fn main() {
    let cli = rwa::cli::Cli::parse();
    std::process::exit(rwa::cli::run(cli));
}
