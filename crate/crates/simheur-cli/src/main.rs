use clap::Parser;
use simheur_cli::{execute, Cli};

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(err) = execute(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
