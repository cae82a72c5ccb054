use std::time::{Duration, Instant};

use qwalk_core::evolution::{evolve_density, evolve_pure, evolve_trajectories};
use qwalk_core::metrics::{
    detect_quasi_period, fit_spreading_exponent, recurrence, std_dev, variance, PowerLawFit,
    QuasiPeriod, TimeSeries,
};
use qwalk_core::{distribution_of, DensityState, PositionDistribution};
use serde::Serialize;

use crate::config::{Backend, Format, RunConfig, TopologyKind, ValidatedRun};
use crate::error::CliResult;
use crate::output::{distributions_csv, distributions_json, series_csv, std_errors_csv, OutputDir};

/// Exponent fits start here; earlier steps are transient.
pub const FIT_T_MIN: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    /// `None` on a ring, where signed positions are undefined.
    pub variance: Option<Vec<f64>>,
    pub recurrence: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    /// Needs at least 4 steps (τ ≥ 2 with two multiples in range).
    pub tau: Option<usize>,
    pub tau_score: Option<f64>,
    /// Fitted on σ over `[FIT_T_MIN, steps]`; needs a line and ≥ 22 steps.
    pub exponent: Option<PowerLawFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub series: Series,
    pub analysis: Analysis,
    /// Relative to the output directory.
    pub files: Vec<String>,
    /// Reported on stderr only so that files stay byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Distributions for t = 0..=steps plus optional per-site standard errors.
#[derive(Debug, Clone)]
pub struct WalkRun {
    pub distributions: Vec<PositionDistribution>,
    pub std_errors: Option<Vec<Vec<f64>>>,
}

pub fn simulate(run: &ValidatedRun) -> CliResult<WalkRun> {
    let cfg = &run.config;
    Ok(match cfg.backend {
        Backend::Pure => WalkRun {
            distributions: evolve_pure(&run.initial, &run.params, cfg.steps)?
                .iter()
                .map(distribution_of)
                .collect(),
            std_errors: None,
        },
        Backend::Density => {
            let rho = DensityState::from_pure(&run.initial)?;
            WalkRun {
                distributions: evolve_density(&rho, &run.params, cfg.gamma, cfg.steps)?
                    .iter()
                    .map(distribution_of)
                    .collect(),
                std_errors: None,
            }
        }
        Backend::Trajectories => {
            let ens = evolve_trajectories(
                &run.initial,
                &run.params,
                cfg.eta,
                cfg.n_traj,
                cfg.seed,
                cfg.steps,
            )?;
            WalkRun {
                distributions: ens.distributions,
                std_errors: Some(ens.std_errors),
            }
        }
    })
}

pub fn analyse(cfg: &RunConfig, dists: &[PositionDistribution]) -> CliResult<(Series, Analysis)> {
    let recur: Vec<f64> = dists.iter().map(recurrence).collect();
    let on_line = cfg.topology == TopologyKind::Line;
    let variance_series = if on_line {
        Some(dists.iter().map(variance).collect::<qwalk_core::Result<Vec<f64>>>()?)
    } else {
        None
    };

    let tau_max = cfg.steps / 2;
    let period: Option<QuasiPeriod> = if tau_max >= 2 {
        Some(detect_quasi_period(&TimeSeries::new("recurrence", recur.clone())?, tau_max)?)
    } else {
        None
    };

    let exponent = if on_line && cfg.steps >= FIT_T_MIN + 2 {
        let sigma: Vec<f64> = dists.iter().map(std_dev).collect::<qwalk_core::Result<_>>()?;
        // a vanishing σ (e.g. the swap coin) has no power law; report none
        fit_spreading_exponent(&TimeSeries::new("sigma", sigma)?, FIT_T_MIN, cfg.steps).ok()
    } else {
        None
    };

    Ok((
        Series {
            variance: variance_series,
            recurrence: recur,
        },
        Analysis {
            tau: period.map(|p| p.tau),
            tau_score: period.map(|p| p.score),
            exponent,
        },
    ))
}

/// Validates, simulates and writes every artifact of one run.
pub fn cmd_evolve(cfg: &RunConfig) -> CliResult<RunSummary> {
    evolve_with_walk(cfg).map(|(summary, _)| summary)
}

/// [`cmd_evolve`] that also hands back the simulated distributions.
pub fn evolve_with_walk(cfg: &RunConfig) -> CliResult<(RunSummary, WalkRun)> {
    let run = cfg.validate()?;
    let start = Instant::now();
    let walk = simulate(&run)?;
    let (series, analysis) = analyse(cfg, &walk.distributions)?;

    let mut out = OutputDir::create(&cfg.output)?;
    match cfg.format {
        Format::Csv => {
            out.write("distributions.csv", distributions_csv(&walk.distributions).as_bytes())?;
            let var: Vec<Option<f64>> = match &series.variance {
                Some(v) => v.iter().copied().map(Some).collect(),
                None => vec![None; series.recurrence.len()],
            };
            let rec: Vec<Option<f64>> = series.recurrence.iter().copied().map(Some).collect();
            out.write(
                "series.csv",
                series_csv(&[("variance", &var), ("recurrence", &rec)]).as_bytes(),
            )?;
            if let Some(se) = &walk.std_errors {
                out.write("std_errors.csv", std_errors_csv(&walk.distributions, se).as_bytes())?;
            }
        }
        Format::Json => {
            let mut doc = serde_json::json!({ "distributions": distributions_json(&walk.distributions) });
            if let Some(se) = &walk.std_errors {
                doc["std_errors"] = serde_json::to_value(se)?;
            }
            out.write_json("distributions.json", &doc)?;
        }
    }
    let echo = toml::to_string(cfg).expect("RunConfig always serializes to TOML");
    out.write("config.toml", echo.as_bytes())?;

    let mut files: Vec<String> = out
        .written()
        .iter()
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    files.push("summary.json".into());
    let mut summary = RunSummary {
        config: cfg.clone(),
        series,
        analysis,
        files,
        wall_time: Duration::ZERO,
    };
    out.write_json("summary.json", &summary)?;
    summary.wall_time = start.elapsed();
    Ok((summary, walk))
}
