//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export is a thin wrapper over a plain Rust function so the logic
//! can be unit-tested natively.

use qwalk_core::evolution::{evolve_density, evolve_pure};
use qwalk_core::metrics::{detect_quasi_period, recurrence, variance, TimeSeries};
use qwalk_core::spectral::{band_analysis, quasi_energies, DEGENERACY_TOL};
use qwalk_core::{
    distribution_of, make_symmetric_initial, CoinBias, DensityState, PhaseProfile,
    PositionDistribution, Topology, WalkError, WalkParams,
};
use wasm_bindgen::prelude::*;

/// Keeps density runs interactive in the browser.
pub const MAX_STEPS: usize = 120;

fn profile(q: i64, p: i64) -> Result<PhaseProfile, WalkError> {
    if q == 0 {
        Ok(PhaseProfile::Zero)
    } else {
        PhaseProfile::harmonic(q, p)
    }
}

/// Walk history from the symmetric start on a line.
#[wasm_bindgen]
pub struct WalkResult {
    steps: usize,
    n_sites: usize,
    probabilities: Vec<f64>,
    variance: Vec<f64>,
    recurrence: Vec<f64>,
    tau: Option<u32>,
}

#[wasm_bindgen]
impl WalkResult {
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Sites −steps..=steps.
    #[wasm_bindgen(getter, js_name = nSites)]
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Row-major `(steps + 1) × n_sites`.
    #[wasm_bindgen(getter)]
    pub fn probabilities(&self) -> Vec<f64> {
        self.probabilities.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn variance(&self) -> Vec<f64> {
        self.variance.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn recurrence(&self) -> Vec<f64> {
        self.recurrence.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn tau(&self) -> Option<u32> {
        self.tau
    }
}

pub fn run_walk(theta: f64, q: i64, p: i64, steps: usize, gamma: f64) -> Result<WalkResult, WalkError> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(WalkError::StepsExceedCapacity {
            steps,
            capacity: MAX_STEPS,
        });
    }
    let line = Topology::line(steps)?;
    let params = WalkParams::new(CoinBias::new(theta)?, profile(q, p)?, line)?;
    let init = make_symmetric_initial(line);
    let dists: Vec<PositionDistribution> = if gamma == 0.0 {
        evolve_pure(&init, &params, steps)?.iter().map(distribution_of).collect()
    } else {
        let rho = DensityState::from_pure(&init)?;
        evolve_density(&rho, &params, gamma, steps)?
            .iter()
            .map(distribution_of)
            .collect()
    };
    let rec: Vec<f64> = dists.iter().map(recurrence).collect();
    let tau = if steps >= 4 {
        let series = TimeSeries::new("recurrence", rec.clone())?;
        Some(detect_quasi_period(&series, steps / 2)?.tau as u32)
    } else {
        None
    };
    Ok(WalkResult {
        steps,
        n_sites: line.n_sites(),
        probabilities: dists.iter().flat_map(|d| d.probs().iter().copied()).collect(),
        variance: dists.iter().map(variance).collect::<Result<_, _>>()?,
        recurrence: rec,
        tau,
    })
}

/// Position distributions for every step; `gamma > 0` switches to the
/// dephased density-matrix evolution.
#[wasm_bindgen(js_name = simulateWalk)]
pub fn simulate_walk(theta: f64, q: i32, p: i32, steps: usize, gamma: f64) -> Result<WalkResult, JsError> {
    run_walk(theta, q as i64, p as i64, steps, gamma).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub struct SpectrumResult {
    energies: Vec<f64>,
    ell: Vec<u32>,
    band: Vec<u32>,
    n_bands: usize,
    flagged: bool,
}

#[wasm_bindgen]
impl SpectrumResult {
    #[wasm_bindgen(getter)]
    pub fn energies(&self) -> Vec<f64> {
        self.energies.clone()
    }

    /// Momentum sector of each level.
    #[wasm_bindgen(getter)]
    pub fn ell(&self) -> Vec<u32> {
        self.ell.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn band(&self) -> Vec<u32> {
        self.band.clone()
    }

    #[wasm_bindgen(getter, js_name = nBands)]
    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    /// True when no clear band gaps were found.
    #[wasm_bindgen(getter)]
    pub fn flagged(&self) -> bool {
        self.flagged
    }
}

pub fn run_spectrum(theta: f64, q: i64, p: i64, n_sites: usize) -> Result<SpectrumResult, WalkError> {
    let params = WalkParams::new(CoinBias::new(theta)?, profile(q, p)?, Topology::ring(n_sites)?)?;
    let spectrum = quasi_energies(&params)?;
    let report = band_analysis(&spectrum, spectrum.expected_bands(), DEGENERACY_TOL)?;
    Ok(SpectrumResult {
        energies: spectrum.energies(),
        ell: spectrum.entries.iter().map(|e| e.ell as u32).collect(),
        band: report.assignments.iter().map(|&b| b as u32).collect(),
        n_bands: report.n_bands,
        flagged: report.flagged,
    })
}

/// Quasi-energies on a ring of `n_sites`, grouped into bands.
#[wasm_bindgen(js_name = quasiEnergySpectrum)]
pub fn quasi_energy_spectrum(theta: f64, q: i32, p: i32, n_sites: usize) -> Result<SpectrumResult, JsError> {
    run_spectrum(theta, q as i64, p as i64, n_sites).map_err(|e| JsError::new(&e.to_string()))
}

/// P_p(0) on `points` evenly spaced coin angles in (0, π/2).
pub fn run_revival_sweep(q: i64, p: i64, points: usize) -> Result<Vec<f64>, WalkError> {
    let steps = p.max(1) as usize;
    let line = Topology::line(steps)?;
    let prof = profile(q, p)?;
    (1..=points)
        .map(|i| {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (points + 1) as f64;
            let params = WalkParams::new(CoinBias::new(theta)?, prof.clone(), line)?;
            let states = evolve_pure(&make_symmetric_initial(line), &params, steps)?;
            Ok(recurrence(&distribution_of(&states[steps])))
        })
        .collect()
}

/// Return probability at t = p across the coin angle.
#[wasm_bindgen(js_name = revivalSweep)]
pub fn revival_sweep(q: i32, p: i32, points: usize) -> Result<Vec<f64>, JsError> {
    run_revival_sweep(q as i64, p as i64, points).map_err(|e| JsError::new(&e.to_string()))
}
