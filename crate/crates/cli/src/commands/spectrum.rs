use std::fmt::Write as _;
use std::path::PathBuf;

use qwalk_core::spectral::{
    band_analysis, closed_form_residuals, quasi_energies, BandReport, BranchResidual, Spectrum,
    DEGENERACY_TOL,
};
use qwalk_core::{CoinBias, Topology, WalkParams};
use serde::Serialize;

use crate::config::{phase_profile, Angle, Format};
use crate::error::{invalid, CliResult};
use crate::output::{fmt_f64, OutputDir};

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRequest {
    pub theta: Angle,
    pub q: i64,
    pub p: i64,
    pub n_sites: usize,
    pub output: PathBuf,
    pub format: Format,
}

/// Closed-form comparison, or the reason it was skipped.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ClosedForm {
    Residuals {
        residuals: Vec<BranchResidual>,
        best_branch: usize,
    },
    Unavailable(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub request: SpectrumRequest,
    pub bands: BandReport,
    /// |E_000 − E_010| when the labels exist.
    pub ground_doublet_split: Option<f64>,
    pub closed_form: ClosedForm,
    pub files: Vec<String>,
}

pub fn compute(req: &SpectrumRequest) -> CliResult<(Spectrum, BandReport, ClosedForm)> {
    let coin = CoinBias::new(req.theta.radians()).map_err(invalid)?;
    let profile = phase_profile(req.q, req.p)?;
    let topology = Topology::ring(req.n_sites).map_err(invalid)?;
    let params = WalkParams::new(coin, profile, topology).map_err(invalid)?;
    let spectrum = quasi_energies(&params)?;
    let bands = band_analysis(&spectrum, spectrum.expected_bands(), DEGENERACY_TOL)?;
    let closed = if req.q == 0 {
        ClosedForm::Unavailable("unavailable: standard walk (q = 0)".into())
    } else if req.p % 2 != 0 {
        ClosedForm::Unavailable("unavailable: p odd".into())
    } else {
        let residuals = closed_form_residuals(&spectrum)?;
        let best_branch = residuals
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .map(|r| r.branch)
            .unwrap_or(0);
        ClosedForm::Residuals {
            residuals,
            best_branch,
        }
    };
    Ok((spectrum, bands, closed))
}

pub fn spectrum_csv(spectrum: &Spectrum, bands: &BandReport) -> String {
    let mut out = String::from("ell,block_index,quasi_energy,band\n");
    for (e, band) in spectrum.entries.iter().zip(&bands.assignments) {
        let _ = writeln!(
            out,
            "{},{},{},{band}",
            e.ell,
            e.block_index,
            fmt_f64(e.quasi_energy)
        );
    }
    out
}

pub fn cmd_spectrum(req: &SpectrumRequest) -> CliResult<SpectrumSummary> {
    let (spectrum, bands, closed_form) = compute(req)?;
    let mut out = OutputDir::create(&req.output)?;
    match req.format {
        Format::Csv => {
            out.write("spectrum.csv", spectrum_csv(&spectrum, &bands).as_bytes())?;
        }
        Format::Json => {
            out.write_json(
                "spectrum.json",
                &serde_json::json!({ "spectrum": spectrum, "band": bands.assignments }),
            )?;
        }
    }
    let ground_doublet_split = match (spectrum.labelled(0, 0, 0), spectrum.labelled(0, 1, 0)) {
        (Some(a), Some(b)) => Some((a.quasi_energy - b.quasi_energy).abs()),
        _ => None,
    };
    let mut files: Vec<String> = out
        .written()
        .iter()
        .map(|p| p.to_string_lossy().into_owned())
        .collect();
    files.push("summary.json".into());
    let summary = SpectrumSummary {
        request: req.clone(),
        bands,
        ground_doublet_split,
        closed_form,
        files,
    };
    out.write_json("summary.json", &summary)?;
    Ok(summary)
}
