use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{Scenario, SpectrumRequest};
use crate::config::{
    parse_amplitude, Angle, Backend, ConfigFile, Format, Initial, RunConfig, TopologyKind,
};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Coined quantum walks with site-dependent phases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a walk and write per-step distributions and a summary.
    Evolve(EvolveArgs),
    /// Quasi-energy spectrum, band report and closed-form residuals on a ring.
    Spectrum(SpectrumArgs),
    /// Regenerate a preset figure data set.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialKind {
    Symmetric,
    Custom,
}

/// Every flag overrides the matching key of `--config`.
#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// TOML file with RunConfig keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Radians, or `a*pi/b`.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Angle>,
    #[arg(long)]
    pub q: Option<i64>,
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long, value_enum)]
    pub topology: Option<TopologyKind>,
    #[arg(long)]
    pub n_sites: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub n_traj: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub initial: Option<InitialKind>,
    /// Coin-0 amplitude `re,im` for `--initial custom`.
    #[arg(long, value_parser = parse_amplitude, allow_hyphen_values = true)]
    pub amp0: Option<[f64; 2]>,
    /// Coin-1 amplitude `re,im` for `--initial custom`.
    #[arg(long, value_parser = parse_amplitude, allow_hyphen_values = true)]
    pub amp1: Option<[f64; 2]>,
    /// Start site for `--initial custom`.
    #[arg(long, allow_hyphen_values = true)]
    pub site: Option<i64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl EvolveArgs {
    pub fn resolve(self) -> CliResult<RunConfig> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut cfg = file.apply_to(RunConfig::default());
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v; }
            )*};
        }
        take!(steps, theta, q, p, topology, gamma, eta, backend, n_traj, seed, output, format);
        if self.n_sites.is_some() {
            cfg.n_sites = self.n_sites;
        }

        let custom_flags = self.amp0.is_some() || self.amp1.is_some() || self.site.is_some();
        let kind = self.initial.unwrap_or(match (&cfg.initial, custom_flags) {
            (Initial::Custom { .. }, _) | (_, true) => InitialKind::Custom,
            _ => InitialKind::Symmetric,
        });
        cfg.initial = match kind {
            InitialKind::Symmetric => {
                if custom_flags {
                    return Err(CliError::Validation(
                        "--amp0/--amp1/--site require --initial custom".into(),
                    ));
                }
                Initial::Symmetric
            }
            InitialKind::Custom => {
                let (f0, f1, fs) = match cfg.initial {
                    Initial::Custom { amp0, amp1, site } => (Some(amp0), Some(amp1), site),
                    Initial::Symmetric => (None, None, 0),
                };
                let missing = || CliError::Validation("custom initial state needs both --amp0 and --amp1".into());
                Initial::Custom {
                    amp0: self.amp0.or(f0).ok_or_else(missing)?,
                    amp1: self.amp1.or(f1).ok_or_else(missing)?,
                    site: self.site.unwrap_or(fs),
                }
            }
        };
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// TOML file; only theta, q, p, n_sites, output and format are read.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<Angle>,
    #[arg(long)]
    pub q: Option<i64>,
    #[arg(long)]
    pub p: Option<i64>,
    #[arg(long)]
    pub n_sites: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl SpectrumArgs {
    pub fn resolve(self) -> CliResult<SpectrumRequest> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let defaults = RunConfig::default();
        let n_sites = self
            .n_sites
            .or(file.n_sites)
            .ok_or_else(|| CliError::Validation("spectrum requires n_sites".into()))?;
        Ok(SpectrumRequest {
            theta: self.theta.or(file.theta).unwrap_or(defaults.theta),
            q: self.q.or(file.q).unwrap_or(defaults.q),
            p: self.p.or(file.p).unwrap_or(defaults.p),
            n_sites,
            output: self.output.or(file.output).unwrap_or(defaults.output),
            format: self.format.or(file.format).unwrap_or(defaults.format),
        })
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub scenario: Scenario,
    /// Files land in `<output>/<scenario>/`.
    #[arg(long, short, default_value = "out")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Accepted for symmetry with `evolve`; the presets are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qwalk").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_defaults() {
        let Command::Evolve(a) = parse(&["evolve", "--theta", "pi/3", "--q", "1", "--p", "4"]).command else {
            panic!()
        };
        let cfg = a.resolve().unwrap();
        assert_eq!(cfg.theta.text(), "pi/3");
        assert_eq!((cfg.q, cfg.p, cfg.seed), (1, 4, 0));
    }

    #[test]
    fn custom_initial_from_flags() {
        let Command::Evolve(a) = parse(&["evolve", "--amp0", "0.6,0", "--amp1", "0,-0.8", "--site", "-2"]).command
        else {
            panic!()
        };
        assert_eq!(
            a.resolve().unwrap().initial,
            Initial::Custom {
                amp0: [0.6, 0.0],
                amp1: [0.0, -0.8],
                site: -2
            }
        );
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "steps = 6\ntheta = \"2*pi/5\"\nq = 1\np = 4\nseed = 9\n").unwrap();
        let Command::Evolve(a) = parse(&["evolve", "--config", path.to_str().unwrap(), "--steps", "8"]).command
        else {
            panic!()
        };
        let cfg = a.resolve().unwrap();
        assert_eq!((cfg.steps, cfg.seed, cfg.theta.text()), (8, 9, "2*pi/5"));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "stepz = 6\n").unwrap();
        let err = ConfigFile::load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
