use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qwalk_core::metrics::{normalized_variance, TimeSeries};
use qwalk_core::spectral::identity_proximity;
use qwalk_core::{CoinBias, PhaseProfile, Topology, WalkParams};
use serde::Serialize;

use super::evolve::{cmd_evolve, evolve_with_walk, RunSummary};
use crate::config::{Angle, Backend, Format, RunConfig};
use crate::error::CliResult;
use crate::output::{fmt_f64, series_csv, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig2,
    Fig3,
    Fig4,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
        }
    }
}

pub const FIG2_THETAS: [(i64, i64); 3] = [(2, 5), (1, 3), (2, 7)];
/// Diabatic to adiabatic; the last point is 0.45π.
pub const FIG3_THETAS: [(i64, i64); 5] = [(1, 5), (1, 4), (1, 3), (2, 5), (9, 20)];
/// Ring size for the identity-proximity column of fig3.
pub const FIG3_RING: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Row {
    pub theta: Angle,
    pub tau: Option<usize>,
    pub variance: Vec<f64>,
    pub recurrence: Vec<f64>,
    pub dir: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig3Row {
    pub theta: Angle,
    /// P_4(0) for the q = 1, p = 4 walk and the zero-phase baseline.
    pub p4_origin: f64,
    pub p4_origin_standard: f64,
    pub variance_10: f64,
    pub variance_10_standard: f64,
    pub identity_proximity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig4Report {
    pub theta: Angle,
    pub variance_coherent: Vec<f64>,
    pub variance_decohered: Vec<f64>,
    pub normalized_coherent: Vec<f64>,
    pub normalized_decohered: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "lowercase", tag = "scenario")]
pub enum ReproduceReport {
    Fig2 { runs: Vec<Fig2Row> },
    Fig3 { rows: Vec<Fig3Row> },
    Fig4(Fig4Report),
}

fn slug(theta: &Angle) -> String {
    theta.text().replace('*', "").replace('/', "_")
}

fn base_config(theta: Angle, q: i64, p: i64, steps: usize, dir: PathBuf, format: Format) -> RunConfig {
    RunConfig {
        steps,
        theta,
        q,
        p,
        output: dir,
        format,
        ..RunConfig::default()
    }
}

fn variance_of(summary: &RunSummary) -> Vec<f64> {
    summary
        .series
        .variance
        .clone()
        .expect("preset runs are on a line")
}

pub fn cmd_reproduce(scenario: Scenario, output: &Path, format: Format) -> CliResult<ReproduceReport> {
    let root = output.join(scenario.name());
    let mut out = OutputDir::create(&root)?;
    let report = match scenario {
        Scenario::Fig2 => {
            let mut runs = Vec::new();
            for (a, b) in FIG2_THETAS {
                let theta = Angle::pi_fraction(a, b);
                let rel = format!("theta_{}", slug(&theta));
                let s = cmd_evolve(&base_config(theta.clone(), 1, 4, 10, root.join(&rel), format))?;
                runs.push(Fig2Row {
                    theta,
                    tau: s.analysis.tau,
                    variance: variance_of(&s),
                    recurrence: s.series.recurrence.clone(),
                    dir: rel,
                });
            }
            let mut table = String::from("theta,tau\n");
            for r in &runs {
                let tau = r.tau.map(|t| t.to_string()).unwrap_or_default();
                let _ = writeln!(table, "{},{tau}", r.theta);
            }
            out.write("tau.csv", table.as_bytes())?;
            ReproduceReport::Fig2 { runs }
        }
        Scenario::Fig3 => {
            let mut rows = Vec::new();
            let mut t4 = String::from("theta,phase,x,probability\n");
            for (a, b) in FIG3_THETAS {
                let theta = Angle::pi_fraction(a, b);
                let s = slug(&theta);
                let (qp, qp_walk) = evolve_with_walk(&base_config(
                    theta.clone(),
                    1,
                    4,
                    10,
                    root.join(format!("theta_{s}/harmonic")),
                    format,
                ))?;
                let (std, std_walk) = evolve_with_walk(&base_config(
                    theta.clone(),
                    0,
                    1,
                    10,
                    root.join(format!("theta_{s}/zero")),
                    format,
                ))?;
                for (label, walk) in [("harmonic", &qp_walk), ("zero", &std_walk)] {
                    for (x, p) in walk.distributions[4].iter() {
                        let _ = writeln!(t4, "{theta},{label},{x},{}", fmt_f64(p));
                    }
                }
                let params = WalkParams::new(
                    CoinBias::new(theta.radians())?,
                    PhaseProfile::harmonic(1, 4)?,
                    Topology::ring(FIG3_RING)?,
                )?;
                rows.push(Fig3Row {
                    p4_origin: qp.series.recurrence[4],
                    p4_origin_standard: std.series.recurrence[4],
                    variance_10: variance_of(&qp)[10],
                    variance_10_standard: variance_of(&std)[10],
                    identity_proximity: identity_proximity(&params, 4)?,
                    theta,
                });
            }
            out.write("t4_distributions.csv", t4.as_bytes())?;
            let mut table = String::from(
                "theta,p4_origin,p4_origin_standard,variance_10,variance_10_standard,identity_proximity\n",
            );
            for r in &rows {
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{}",
                    r.theta,
                    fmt_f64(r.p4_origin),
                    fmt_f64(r.p4_origin_standard),
                    fmt_f64(r.variance_10),
                    fmt_f64(r.variance_10_standard),
                    fmt_f64(r.identity_proximity)
                );
            }
            out.write("sweep.csv", table.as_bytes())?;
            ReproduceReport::Fig3 { rows }
        }
        Scenario::Fig4 => {
            let theta = Angle::pi_fraction(1, 4);
            let coherent = cmd_evolve(&base_config(theta.clone(), 1, 4, 4, root.join("coherent"), format))?;
            let decohered = cmd_evolve(&RunConfig {
                backend: Backend::Density,
                gamma: 1.0,
                ..base_config(theta.clone(), 1, 4, 4, root.join("decohered"), format)
            })?;
            let (vc, vd) = (variance_of(&coherent), variance_of(&decohered));
            let norm = |v: &[f64]| -> CliResult<Vec<f64>> {
                Ok(normalized_variance(&TimeSeries::new("variance", v.to_vec())?)?
                    .values()
                    .to_vec())
            };
            let (nc, nd) = (norm(&vc)?, norm(&vd)?);
            let col = |v: &[f64]| v.iter().copied().map(Some).collect::<Vec<_>>();
            out.write(
                "normalized_variance.csv",
                series_csv(&[("coherent", &col(&nc)), ("decohered", &col(&nd))]).as_bytes(),
            )?;
            ReproduceReport::Fig4(Fig4Report {
                theta,
                variance_coherent: vc,
                variance_decohered: vd,
                normalized_coherent: nc,
                normalized_decohered: nd,
            })
        }
    };
    out.write_json("summary.json", &report)?;
    Ok(report)
}
