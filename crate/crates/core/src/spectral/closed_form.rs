//! Closed-form eigenvalue expression for even p, evaluated as written:
//!
//! ```text
//! λ_{ℓmn} = e^{2πin/p} ( 2i r_ℓ [ (−1)^m √(1 − r_ℓ²) − i r_ℓ ]^{1/p} − 1 ),
//! r_ℓ = d^{p/2} sin(π p ℓ / N),  d = cos θ
//! ```
//!
//! The branch of the p-th root is not pinned down, and for r_ℓ ≠ 0 the
//! values are generally not unimodular. Results are compared against the
//! diagonalization and the mismatch is reported, never asserted.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{max_angle_mismatch, quasi_energy_of, Spectrum};
use crate::error::{Result, WalkError};
use crate::lattice::{CoinBias, PhaseProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RootBranch {
    #[default]
    Principal,
    /// z^{1/p} = |z|^{1/p} e^{i(arg z + 2πk)/p}, k = 0..p.
    Index(usize),
}

impl RootBranch {
    fn index(self) -> usize {
        match self {
            RootBranch::Principal => 0,
            RootBranch::Index(k) => k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormLevel {
    pub ell: usize,
    pub m: u8,
    pub n: usize,
    pub lambda: Complex64,
}

pub fn closed_form_lambda(
    theta: f64,
    q: i64,
    p: i64,
    n_sites: usize,
    branch: RootBranch,
) -> Result<Vec<ClosedFormLevel>> {
    let coin = CoinBias::new(theta)?;
    if p < 2 || p % 2 != 0 {
        return Err(WalkError::OddPeriod(p));
    }
    PhaseProfile::harmonic(q, p)?;
    if n_sites % p as usize != 0 {
        return Err(WalkError::PeriodDoesNotDivide { p, n_sites });
    }
    let k = branch.index();
    if k >= p as usize {
        return Err(WalkError::InvalidBranch { index: k, p });
    }

    let d_eff = coin.tunneling().powi((p / 2) as i32);
    let i = Complex64::new(0.0, 1.0);
    let cells = n_sites / p as usize;
    let mut out = Vec::with_capacity(2 * n_sites);
    for ell in 0..cells {
        let r = d_eff * (PI * (p as usize * ell) as f64 / n_sites as f64).sin();
        let root_mod = (1.0 - r * r).max(0.0).sqrt();
        for m in 0..2u8 {
            let sign = if m == 0 { 1.0 } else { -1.0 };
            let z = Complex64::new(sign * root_mod, -r);
            let root = Complex64::from_polar(z.norm().powf(1.0 / p as f64), (z.arg() + TAU * k as f64) / p as f64);
            let core = i * 2.0 * r * root - 1.0;
            for n in 0..p as usize {
                let phase = Complex64::from_polar(1.0, TAU * n as f64 / p as f64);
                out.push(ClosedFormLevel {
                    ell,
                    m,
                    n,
                    lambda: phase * core,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchResidual {
    pub branch: usize,
    /// Bottleneck mismatch between closed-form and numerical quasi-energies.
    pub residual: f64,
    /// max | |λ| − 1 | over the closed-form values.
    pub modulus_defect: f64,
}

/// Residual of the closed form against `spectrum` for every root branch,
/// sorted by branch index. The best branch is the one with the smallest
/// residual.
pub fn closed_form_residuals(spectrum: &Spectrum) -> Result<Vec<BranchResidual>> {
    let numeric = spectrum.energies();
    (0..spectrum.p.max(0) as usize)
        .map(|k| {
            let levels = closed_form_lambda(
                spectrum.theta,
                spectrum.q,
                spectrum.p,
                spectrum.n_sites,
                RootBranch::Index(k),
            )?;
            let energies: Vec<f64> = levels.iter().map(|l| quasi_energy_of(l.lambda)).collect();
            let modulus_defect = levels
                .iter()
                .map(|l| (l.lambda.norm() - 1.0).abs())
                .fold(0.0, f64::max);
            Ok(BranchResidual {
                branch: k,
                residual: max_angle_mismatch(&energies, &numeric),
                modulus_defect,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn ell_zero_collapses() {
        let levels = closed_form_lambda(FRAC_PI_3, 1, 4, 16, RootBranch::Principal).unwrap();
        assert_eq!(levels.len(), 32);
        for l in levels.iter().filter(|l| l.ell == 0) {
            let want = -Complex64::from_polar(1.0, TAU * l.n as f64 / 4.0);
            assert!((l.lambda - want).norm() < 1e-15);
        }
        let e000 = levels.iter().find(|l| (l.ell, l.m, l.n) == (0, 0, 0)).unwrap();
        let e010 = levels.iter().find(|l| (l.ell, l.m, l.n) == (0, 1, 0)).unwrap();
        assert_eq!(e000.lambda, e010.lambda);
    }

    #[test]
    fn effective_tunneling_prefactor() {
        // p = 4, d = 1/2: r_ℓ = (1/4) sin(πℓ/4) for N = 16
        let levels = closed_form_lambda(FRAC_PI_3, 1, 4, 16, RootBranch::Principal).unwrap();
        let l = levels.iter().find(|l| (l.ell, l.m, l.n) == (2, 0, 0)).unwrap();
        let r: f64 = 0.25 * (PI / 2.0).sin();
        let z = Complex64::new((1.0 - r * r).sqrt(), -r);
        let root = z.powf(0.25);
        let want = Complex64::new(0.0, 2.0 * r) * root - 1.0;
        assert!((l.lambda - want).norm() < 1e-14);
    }

    #[test]
    fn argument_validation() {
        assert_eq!(
            closed_form_lambda(FRAC_PI_3, 1, 3, 12, RootBranch::Principal),
            Err(WalkError::OddPeriod(3))
        );
        assert_eq!(
            closed_form_lambda(FRAC_PI_3, 1, 4, 16, RootBranch::Index(4)),
            Err(WalkError::InvalidBranch { index: 4, p: 4 })
        );
        assert!(closed_form_lambda(FRAC_PI_3, 2, 4, 16, RootBranch::Principal).is_err());
        assert!(closed_form_lambda(FRAC_PI_3, 1, 4, 18, RootBranch::Principal).is_err());
    }
}
