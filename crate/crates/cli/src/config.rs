//! Run configuration: TOML file and/or command-line flags, validated
//! before any computation starts.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use qwalk_core::{CoinBias, PhaseProfile, Topology, WalkParams};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, CliResult};

/// An angle given either as decimal radians or as `a*pi/b`.
///
/// The original text is kept so configs echo losslessly.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    text: String,
    radians: f64,
}

impl Angle {
    pub fn radians(&self) -> f64 {
        self.radians
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// `num * pi / den`.
    pub fn pi_fraction(num: i64, den: i64) -> Self {
        let text = match (num, den) {
            (1, 1) => "pi".to_string(),
            (1, d) => format!("pi/{d}"),
            (n, 1) => format!("{n}*pi"),
            (n, d) => format!("{n}*pi/{d}"),
        };
        Self {
            text,
            radians: num as f64 * PI / den as f64,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text = s.trim().to_string();
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(radians) = compact.parse::<f64>() {
            if !radians.is_finite() {
                return Err(format!("angle '{text}' is not finite"));
            }
            return Ok(Self { text, radians });
        }
        let bad = || format!("angle '{text}' is neither decimal radians nor of the form a*pi/b");
        let lower = compact.to_ascii_lowercase();
        let (numer, denom) = match lower.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (lower.as_str(), None),
        };
        let a: i64 = match numer.strip_suffix("pi").ok_or_else(bad)? {
            "" => 1,
            "-" => -1,
            pre => pre.strip_suffix('*').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        let b: i64 = match denom {
            Some(d) => d.parse().map_err(|_| bad())?,
            None => 1,
        };
        if b == 0 {
            return Err(format!("angle '{text}' divides by zero"));
        }
        Ok(Self {
            text,
            radians: a as f64 * PI / b as f64,
        })
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(radians) => Ok(Angle {
                text: format!("{radians:?}"),
                radians,
            }),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Line,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Pure,
    Density,
    Trajectories,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Initial {
    Symmetric,
    /// Amplitudes as `[re, im]` pairs.
    Custom {
        amp0: [f64; 2],
        amp1: [f64; 2],
        site: i64,
    },
}

/// Everything `evolve` needs. Field names double as TOML keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub steps: usize,
    pub theta: Angle,
    pub q: i64,
    pub p: i64,
    pub topology: TopologyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    pub gamma: f64,
    pub eta: f64,
    pub backend: Backend,
    pub n_traj: usize,
    pub seed: u64,
    pub initial: Initial,
    pub output: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            steps: 10,
            theta: Angle::pi_fraction(1, 4),
            q: 0,
            p: 1,
            topology: TopologyKind::Line,
            n_sites: None,
            gamma: 0.0,
            eta: 0.0,
            backend: Backend::Pure,
            n_traj: 10_000,
            seed: 0,
            initial: Initial::Symmetric,
            output: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// Partial config as read from a file; missing keys fall back to defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub steps: Option<usize>,
    pub theta: Option<Angle>,
    pub q: Option<i64>,
    pub p: Option<i64>,
    pub topology: Option<TopologyKind>,
    pub n_sites: Option<usize>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub backend: Option<Backend>,
    pub n_traj: Option<usize>,
    pub seed: Option<u64>,
    pub initial: Option<Initial>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config file {}: {e}", path.display())))
    }

    /// Layers `self` over `base`.
    pub fn apply_to(self, base: RunConfig) -> RunConfig {
        RunConfig {
            steps: self.steps.unwrap_or(base.steps),
            theta: self.theta.unwrap_or(base.theta),
            q: self.q.unwrap_or(base.q),
            p: self.p.unwrap_or(base.p),
            topology: self.topology.unwrap_or(base.topology),
            n_sites: self.n_sites.or(base.n_sites),
            gamma: self.gamma.unwrap_or(base.gamma),
            eta: self.eta.unwrap_or(base.eta),
            backend: self.backend.unwrap_or(base.backend),
            n_traj: self.n_traj.unwrap_or(base.n_traj),
            seed: self.seed.unwrap_or(base.seed),
            initial: self.initial.unwrap_or(base.initial),
            output: self.output.unwrap_or(base.output),
            format: self.format.unwrap_or(base.format),
        }
    }
}

/// A config that passed every check, with the core objects built.
#[derive(Debug, Clone)]
pub struct ValidatedRun {
    pub config: RunConfig,
    pub params: WalkParams,
    pub initial: qwalk_core::PureState,
}

pub fn phase_profile(q: i64, p: i64) -> CliResult<PhaseProfile> {
    let profile = PhaseProfile::harmonic(q, p).map_err(invalid)?;
    Ok(if q == 0 { PhaseProfile::Zero } else { profile })
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<ValidatedRun> {
        let coin = CoinBias::new(self.theta.radians()).map_err(invalid)?;
        let profile = phase_profile(self.q, self.p)?;
        for (name, v) in [("gamma", self.gamma), ("eta", self.eta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(CliError::Validation(format!("{name} must lie in [0, 1], received {v}")));
            }
        }
        if self.gamma != 0.0 && self.eta != 0.0 {
            return Err(CliError::Validation(
                "gamma and eta are both nonzero; choose one noise model per run".into(),
            ));
        }
        match self.backend {
            Backend::Pure if self.gamma != 0.0 || self.eta != 0.0 => {
                return Err(CliError::Validation(
                    "the pure backend is noiseless; use backend = density for gamma or trajectories for eta".into(),
                ));
            }
            Backend::Density if self.eta != 0.0 => {
                return Err(CliError::Validation(
                    "eta applies to the trajectories backend; use gamma with the density backend".into(),
                ));
            }
            Backend::Trajectories if self.gamma != 0.0 => {
                return Err(CliError::Validation(
                    "gamma applies to the density backend; use eta with the trajectories backend".into(),
                ));
            }
            Backend::Trajectories if self.n_traj == 0 => {
                return Err(CliError::Validation("n_traj must be at least 1".into()));
            }
            _ => {}
        }

        let start_site = match &self.initial {
            Initial::Symmetric => 0,
            Initial::Custom { site, .. } => *site,
        };
        let topology = match self.topology {
            TopologyKind::Line => {
                if self.n_sites.is_some() {
                    return Err(CliError::Validation("n_sites applies only to ring topology".into()));
                }
                let t_max = (self.steps + start_site.unsigned_abs() as usize).max(1);
                Topology::line(t_max).map_err(invalid)?
            }
            TopologyKind::Ring => {
                let n = self
                    .n_sites
                    .ok_or_else(|| CliError::Validation("ring topology requires n_sites".into()))?;
                Topology::ring(n).map_err(invalid)?
            }
        };
        if self.backend == Backend::Density && topology.dim() > qwalk_core::state::MAX_DENSITY_DIM {
            return Err(CliError::Validation(format!(
                "density backend needs 2 x sites <= {} but this run has {}",
                qwalk_core::state::MAX_DENSITY_DIM,
                topology.dim()
            )));
        }
        let params = WalkParams::new(coin, profile, topology).map_err(invalid)?;
        let initial = match &self.initial {
            Initial::Symmetric => qwalk_core::make_symmetric_initial(topology),
            Initial::Custom { amp0, amp1, site } => qwalk_core::make_initial(
                topology,
                Complex64::new(amp0[0], amp0[1]),
                Complex64::new(amp1[0], amp1[1]),
                *site,
            )
            .map_err(invalid)?,
        };
        Ok(ValidatedRun {
            config: self.clone(),
            params,
            initial,
        })
    }
}

/// Parses `re,im` (or a bare real) into a `[re, im]` pair.
pub fn parse_amplitude(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("'{s}' is not 're,im'"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("'{s}' is not 're,im'")),
    }
}
