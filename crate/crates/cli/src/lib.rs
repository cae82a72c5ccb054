//! Library side of the `qwalk` binary, exposed so tests can drive the
//! commands without spawning a process.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::CliResult;

/// Runs one parsed invocation. Progress and timing go to stderr.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Evolve(args) => {
            let cfg = args.resolve()?;
            let s = commands::cmd_evolve(&cfg)?;
            if let Some(tau) = s.analysis.tau {
                eprintln!("detected quasi-period tau = {tau}");
            }
            eprintln!(
                "wrote {} files to {} in {:.3} s",
                s.files.len(),
                cfg.output.display(),
                s.wall_time.as_secs_f64()
            );
        }
        Command::Spectrum(args) => {
            let req = args.resolve()?;
            let s = commands::cmd_spectrum(&req)?;
            eprintln!(
                "{} levels in {} band(s){}; wrote {}",
                2 * req.n_sites,
                s.bands.n_bands,
                if s.bands.flagged { " (no clear gaps)" } else { "" },
                req.output.display()
            );
        }
        Command::Reproduce(args) => {
            let start = std::time::Instant::now();
            commands::cmd_reproduce(args.scenario, &args.output, args.format)?;
            eprintln!(
                "wrote {} in {:.3} s",
                args.output.join(args.scenario.name()).display(),
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
