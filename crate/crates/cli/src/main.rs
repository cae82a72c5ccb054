use clap::Parser;
use qwalk_cli::args::Cli;

fn main() {
    // clap itself exits with 2 on malformed arguments, matching validation
    let cli = Cli::parse();
    if let Err(err) = qwalk_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
