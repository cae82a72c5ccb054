//! Quasi-energy spectrum of the one-step unitary on a ring.
//!
//! A harmonic phase of period p makes U commute with translation by p
//! sites, so U splits into N/p Bloch blocks of size 2p. The block spectra
//! are the production route; dense diagonalization of the full 2N × 2N
//! matrix is the independent check.

mod bands;
mod closed_form;
pub mod eig;
mod matrix;

pub use bands::{band_analysis, Band, BandReport};
pub use closed_form::{
    closed_form_lambda, closed_form_residuals, BranchResidual, ClosedFormLevel, RootBranch,
};
pub use matrix::CMatrix;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::evolution::{StepKernel, WalkParams};
use crate::lattice::Topology;

/// Eigenvalues must sit this close to the unit circle.
pub const UNIMODULAR_TOL: f64 = 1e-9;
/// Default absolute tolerance for calling two quasi-energies equal.
pub const DEGENERACY_TOL: f64 = 1e-9;

fn ring_size(params: &WalkParams) -> Result<usize> {
    match *params.topology() {
        Topology::Ring { n_sites } => Ok(n_sites),
        Topology::Line { .. } => Err(WalkError::RingRequired),
    }
}

/// (q, p) of a harmonic or zero profile.
fn harmonic_qp(params: &WalkParams) -> Result<(i64, i64)> {
    match (params.profile().numerator(), params.profile().period()) {
        (Some(q), Some(p)) => Ok((q, p)),
        _ => Err(WalkError::HarmonicRequired),
    }
}

/// Dense matrix of U = S·C in the (site, coin) basis.
pub fn build_step_unitary(params: &WalkParams) -> Result<CMatrix> {
    ring_size(params)?;
    let kernel = StepKernel::new(params)?;
    let dim = params.topology().dim();
    let mut u = CMatrix::zeros(dim);
    let mut basis = vec![Complex64::new(0.0, 0.0); dim];
    let mut column = basis.clone();
    for j in 0..dim {
        basis[j] = Complex64::new(1.0, 0.0);
        kernel.apply(&basis, &mut column)?;
        basis[j] = Complex64::new(0.0, 0.0);
        for (i, v) in column.iter().enumerate() {
            u[(i, j)] = *v;
        }
    }
    Ok(u)
}

/// The N/p Bloch blocks of U, one per quasi-momentum index ℓ.
///
/// Block ℓ acts on the amplitudes u(s, c) of one unit cell (s = 0..p) for
/// Bloch states ψ(s + jp) = e^{ikj} u(s) with k = 2πℓp/N. Hops that leave
/// the cell pick up e^{∓ik}.
pub fn bloch_blocks(params: &WalkParams) -> Result<Vec<CMatrix>> {
    let n_sites = ring_size(params)?;
    let (_, p) = harmonic_qp(params)?;
    let p = p as usize;
    if n_sites % p != 0 {
        return Err(WalkError::PeriodDoesNotDivide {
            p: p as i64,
            n_sites,
        });
    }
    let cells = n_sites / p;
    let (sin, cos) = params.coin().theta().sin_cos();
    let coin = [[cos, sin], [sin, -cos]];
    let phases = (0..p)
        .map(|s| {
            params
                .profile()
                .phase_at(s as i64)
                .map(|phi| Complex64::from_polar(1.0, phi))
        })
        .collect::<Result<Vec<_>>>()?;

    let blocks = (0..cells)
        .map(|ell| {
            let k = TAU * (ell * p) as f64 / n_sites as f64;
            let from_left = Complex64::from_polar(1.0, -k);
            let from_right = Complex64::from_polar(1.0, k);
            let mut b = CMatrix::zeros(2 * p);
            for s in 0..p {
                for c in 0..2 {
                    let col = 2 * s + c;
                    // coin 0 hops right
                    let (right, f_r) = if s + 1 == p {
                        (0, from_left)
                    } else {
                        (s + 1, Complex64::new(1.0, 0.0))
                    };
                    b[(2 * right, col)] += phases[s] * f_r * coin[0][c];
                    // coin 1 hops left
                    let (left, f_l) = if s == 0 {
                        (p - 1, from_right)
                    } else {
                        (s - 1, Complex64::new(1.0, 0.0))
                    };
                    b[(2 * left + 1, col)] += phases[s] * f_l * coin[1][c];
                }
            }
            b
        })
        .collect();
    Ok(blocks)
}

/// Principal argument mapped into (−π, π].
pub fn quasi_energy_of(lambda: Complex64) -> f64 {
    let e = lambda.arg();
    if e <= -PI {
        e + TAU
    } else {
        e
    }
}

fn checked_quasi_energies(matrix: &CMatrix) -> Result<Vec<f64>> {
    let values = eig::eigenvalues(matrix)?;
    values
        .iter()
        .enumerate()
        .map(|(index, z)| {
            let modulus = z.norm();
            if (modulus - 1.0).abs() > UNIMODULAR_TOL {
                Err(WalkError::NotUnimodular { index, modulus })
            } else {
                Ok(quasi_energy_of(*z))
            }
        })
        .collect()
}

/// Optional (m, n) labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLabels {
    pub m: u8,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub quasi_energy: f64,
    pub ell: usize,
    pub block_index: usize,
    pub labels: Option<LevelLabels>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub theta: f64,
    pub q: i64,
    pub p: i64,
    pub n_sites: usize,
}

impl Spectrum {
    /// Band count implied by the profile: two coin bands for the standard
    /// walk, p Bloch bands otherwise.
    pub fn expected_bands(&self) -> usize {
        if self.q == 0 {
            2
        } else {
            self.p as usize
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.quasi_energy).collect()
    }

    pub fn sector(&self, ell: usize) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(move |e| e.ell == ell)
    }

    pub fn labelled(&self, ell: usize, m: u8, n: usize) -> Option<&SpectrumEntry> {
        self.sector(ell)
            .find(|e| e.labels == Some(LevelLabels { m, n }))
    }
}

/// Quasi-energies of every Bloch block, sorted by (ℓ, energy).
///
/// In the ℓ = 0 sector, when the 2p levels pair up into p exactly
/// degenerate doublets, the doublets are labelled n = 0..p in ascending
/// energy and the two members m = 0, 1.
pub fn quasi_energies(params: &WalkParams) -> Result<Spectrum> {
    let n_sites = ring_size(params)?;
    let (q, p) = harmonic_qp(params)?;
    let blocks = bloch_blocks(params)?;

    #[cfg(feature = "parallel")]
    let per_block: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        blocks
            .par_iter()
            .map(checked_quasi_energies)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_block: Vec<Vec<f64>> = blocks
        .iter()
        .map(checked_quasi_energies)
        .collect::<Result<_>>()?;

    let mut entries = Vec::with_capacity(2 * n_sites);
    for (ell, mut energies) in per_block.into_iter().enumerate() {
        energies.sort_by(f64::total_cmp);
        let labels = if ell == 0 {
            doublet_labels(&energies)
        } else {
            None
        };
        for (block_index, quasi_energy) in energies.into_iter().enumerate() {
            entries.push(SpectrumEntry {
                quasi_energy,
                ell,
                block_index,
                labels: labels.as_ref().map(|l| l[block_index]),
            });
        }
    }
    Ok(Spectrum {
        entries,
        theta: params.coin().theta(),
        q,
        p,
        n_sites,
    })
}

fn doublet_labels(sorted: &[f64]) -> Option<Vec<LevelLabels>> {
    if sorted.len() % 2 != 0 {
        return None;
    }
    let mut labels = Vec::with_capacity(sorted.len());
    for (n, pair) in sorted.chunks_exact(2).enumerate() {
        if (pair[1] - pair[0]).abs() > DEGENERACY_TOL {
            return None;
        }
        labels.push(LevelLabels { m: 0, n });
        labels.push(LevelLabels { m: 1, n });
    }
    // doublets must also be separated from each other
    for w in sorted.chunks_exact(2).collect::<Vec<_>>().windows(2) {
        if (w[1][0] - w[0][1]).abs() <= DEGENERACY_TOL {
            return None;
        }
    }
    Some(labels)
}

/// Sorted quasi-energies from dense diagonalization of the full U.
pub fn dense_quasi_energies(params: &WalkParams) -> Result<Vec<f64>> {
    let u = build_step_unitary(params)?;
    let mut e = checked_quasi_energies(&u)?;
    e.sort_by(f64::total_cmp);
    Ok(e)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Bottleneck distance between two multisets of angles: the smallest, over
/// cyclic alignments of the sorted lists, of the largest circular gap.
pub fn max_angle_mismatch(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    (0..n.max(1))
        .map(|shift| {
            (0..n)
                .map(|i| circular_distance(a[i], b[(i + shift) % n]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// f = |tr(U^p)| / 2N; equals 1 iff U^p is a global phase times identity.
pub fn identity_proximity(params: &WalkParams, p: usize) -> Result<f64> {
    let n_sites = ring_size(params)?;
    let u = build_step_unitary(params)?;
    Ok(u.pow(p).trace().norm() / (2 * n_sites) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{CoinBias, PhaseProfile};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn ring_params(theta: f64, q: i64, p: i64, n: usize) -> WalkParams {
        let profile = if q == 0 {
            PhaseProfile::Zero
        } else {
            PhaseProfile::harmonic(q, p).unwrap()
        };
        WalkParams::new(CoinBias::new(theta).unwrap(), profile, Topology::ring(n).unwrap()).unwrap()
    }

    #[test]
    fn two_site_signed_permutation() {
        let u = build_step_unitary(&ring_params(0.0, 0, 1, 2)).unwrap();
        // coin diag(1, −1); on two sites ±1 both land on the other site
        let one = Complex64::new(1.0, 0.0);
        let mut want = CMatrix::zeros(4);
        want[(2, 0)] = one;
        want[(3, 1)] = -one;
        want[(0, 2)] = one;
        want[(1, 3)] = -one;
        assert_eq!(u, want);
    }

    #[test]
    fn unitary_and_unimodular() {
        for (theta, q, p, n) in [(FRAC_PI_3, 1, 4, 8), (0.3, 1, 2, 6), (FRAC_PI_2, 3, 4, 12)] {
            let u = build_step_unitary(&ring_params(theta, q, p, n)).unwrap();
            assert!(u.unitarity_defect() < 1e-12);
            for z in eig::eigenvalues(&u).unwrap() {
                assert!((z.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn block_shapes_and_unitarity() {
        let blocks = bloch_blocks(&ring_params(FRAC_PI_3, 1, 4, 16)).unwrap();
        assert_eq!(blocks.len(), 4);
        for b in &blocks {
            assert_eq!(b.size(), 8);
            assert!(b.unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn blocks_match_dense() {
        let params = ring_params(FRAC_PI_3, 1, 4, 16);
        let spec = quasi_energies(&params).unwrap();
        assert_eq!(spec.entries.len(), 32);
        let dense = dense_quasi_energies(&params).unwrap();
        assert!(max_angle_mismatch(&spec.energies(), &dense) < 1e-9);
    }

    #[test]
    fn spectrum_invariant_under_q_plus_p() {
        let a = quasi_energies(&ring_params(FRAC_PI_4, 1, 4, 16)).unwrap();
        let b = quasi_energies(&ring_params(FRAC_PI_4, 5, 4, 16)).unwrap();
        assert!(max_angle_mismatch(&a.energies(), &b.energies()) < 1e-12);
    }

    #[test]
    fn flat_bands_at_swap_coin() {
        let spec = quasi_energies(&ring_params(FRAC_PI_2, 1, 4, 16)).unwrap();
        let report = band_analysis(&spec, 4, DEGENERACY_TOL).unwrap();
        assert!(!report.flagged);
        assert!(report.bands.iter().all(|b| b.width < 1e-9));
    }

    #[test]
    fn ell_zero_doublets_labelled() {
        let spec = quasi_energies(&ring_params(FRAC_PI_3, 1, 4, 16)).unwrap();
        let e000 = spec.labelled(0, 0, 0).unwrap().quasi_energy;
        let e010 = spec.labelled(0, 1, 0).unwrap().quasi_energy;
        assert!((e000 - e010).abs() < 1e-9);
        assert!(spec.sector(1).all(|e| e.labels.is_none()));
    }

    #[test]
    fn proximity_limits() {
        let f = identity_proximity(&ring_params(FRAC_PI_2, 1, 4, 16), 4).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
        let f_std = identity_proximity(&ring_params(FRAC_PI_4, 0, 1, 16), 4).unwrap();
        assert!(f_std < 0.5, "f = {f_std}");
    }

    #[test]
    fn line_and_table_rejected() {
        let line = WalkParams::new(
            CoinBias::new(FRAC_PI_4).unwrap(),
            PhaseProfile::Zero,
            Topology::line(3).unwrap(),
        )
        .unwrap();
        assert_eq!(bloch_blocks(&line), Err(WalkError::RingRequired));
        let ring = Topology::ring(4).unwrap();
        let table = WalkParams::new(
            CoinBias::new(FRAC_PI_4).unwrap(),
            PhaseProfile::table(&ring, vec![0.0; 4]).unwrap(),
            ring,
        )
        .unwrap();
        assert_eq!(bloch_blocks(&table), Err(WalkError::HarmonicRequired));
        assert!(build_step_unitary(&table).is_ok());
    }

    #[test]
    fn mismatch_handles_wraparound() {
        let a = [PI - 1e-13, 0.0];
        let b = [-PI + 1e-13, 0.0];
        assert!(max_angle_mismatch(&a, &b) < 1e-12);
    }
}
