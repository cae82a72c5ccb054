//! Density-operator evolution with a position-dephasing channel.
//!
//! Each step conjugates ρ by the walk unitary and then damps every
//! coherence between two *different* sites by `1 − gamma`. Coin
//! coherences at a single site are left alone. The order (unitary, then
//! dephasing) matters for transients.

use num_complex::Complex64;

use super::{check_capacity, StepKernel, WalkParams};
use crate::error::{Result, WalkError};
use crate::lattice::Topology;
use crate::state::{make_symmetric_initial, DensityState};

fn check_strength(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(WalkError::StrengthOutOfRange { name, value });
    }
    Ok(())
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    check_strength("gamma", gamma)
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    check_strength("eta", eta)
}

/// Projector onto the symmetric initial state.
pub fn symmetric_density_initial(topology: Topology) -> Result<DensityState> {
    DensityState::from_pure(&make_symmetric_initial(topology))
}

pub fn apply_position_dephasing(rho: &DensityState, gamma: f64) -> Result<DensityState> {
    check_gamma(gamma)?;
    let mut m = rho.matrix().to_vec();
    dephase_in_place(&mut m, rho.dim(), gamma);
    Ok(DensityState::from_parts(*rho.topology(), m))
}

fn dephase_in_place(m: &mut [Complex64], dim: usize, gamma: f64) {
    if gamma == 0.0 {
        return;
    }
    let keep = 1.0 - gamma;
    for r in 0..dim {
        let row = &mut m[r * dim..(r + 1) * dim];
        for (c, v) in row.iter_mut().enumerate() {
            if r / 2 != c / 2 {
                *v *= keep;
            }
        }
    }
}

/// Density states at t = 0, 1, …, `steps`.
pub fn evolve_density(
    initial: &DensityState,
    params: &WalkParams,
    gamma: f64,
    steps: usize,
) -> Result<Vec<DensityState>> {
    check_gamma(gamma)?;
    if initial.topology() != params.topology() {
        return Err(WalkError::TopologyMismatch);
    }
    check_capacity(params.topology(), steps)?;
    let kernel = StepKernel::new(params)?;
    let dim = initial.dim();
    let topo = *initial.topology();

    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial.clone());
    let mut rho = initial.matrix().to_vec();
    let mut work = vec![Complex64::new(0.0, 0.0); dim * dim];
    for _ in 0..steps {
        // U ρ U† = U (U ρ)† for Hermitian ρ
        kernel.apply_rows(&rho, &mut work)?;
        adjoint_into(&work, &mut rho, dim);
        kernel.apply_rows(&rho, &mut work)?;
        hermitize_into(&work, &mut rho, dim);
        dephase_in_place(&mut rho, dim, gamma);
        out.push(DensityState::from_parts(topo, rho.clone()));
    }
    Ok(out)
}

fn adjoint_into(src: &[Complex64], dst: &mut [Complex64], dim: usize) {
    for r in 0..dim {
        for c in 0..dim {
            dst[c * dim + r] = src[r * dim + c].conj();
        }
    }
}

/// (A + A†)/2, which also forces a real diagonal.
fn hermitize_into(src: &[Complex64], dst: &mut [Complex64], dim: usize) {
    for r in 0..dim {
        dst[r * dim + r] = Complex64::new(src[r * dim + r].re, 0.0);
        for c in r + 1..dim {
            let v = (src[r * dim + c] + src[c * dim + r].conj()) * 0.5;
            dst[r * dim + c] = v;
            dst[c * dim + r] = v.conj();
        }
    }
}
