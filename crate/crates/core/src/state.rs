//! Walker-coin states and position distributions.
//!
//! Amplitudes are stored site-major: index `2 * site_index + coin`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::Topology;

pub const NORM_TOL: f64 = 1e-10;
/// Probabilities with magnitude below this are treated as exact zeros.
pub const PROB_DUST: f64 = 1e-15;
pub const MAX_DENSITY_DIM: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    topology: Topology,
}

impl PureState {
    pub fn new(topology: Topology, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != topology.dim() {
            return Err(WalkError::DimensionMismatch {
                expected: topology.dim(),
                got: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(WalkError::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes,
            topology,
        })
    }

    /// Trusted constructor for unitary updates of an already valid state.
    pub(crate) fn from_parts(topology: Topology, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), topology.dim());
        Self {
            amplitudes,
            topology,
        }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude at (`site`, `coin`), zero outside the topology.
    pub fn amplitude(&self, site: i64, coin: usize) -> Complex64 {
        assert!(coin < 2, "coin index must be 0 or 1");
        self.topology
            .index_of(site)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[2 * i + coin])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// The walker at the origin with coin (|0⟩ + i|1⟩)/√2.
pub fn make_symmetric_initial(topology: Topology) -> PureState {
    make_initial(
        topology,
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(0.0, FRAC_1_SQRT_2),
        0,
    )
    .expect("symmetric coin state is normalized and the origin is always a site")
}

/// Walker localized at `site` with the given coin amplitudes.
pub fn make_initial(
    topology: Topology,
    coin_amp0: Complex64,
    coin_amp1: Complex64,
    site: i64,
) -> Result<PureState> {
    let norm = coin_amp0.norm_sqr() + coin_amp1.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(WalkError::NotNormalized(norm));
    }
    let idx = topology
        .index_of(site)
        .ok_or(WalkError::SiteOutOfRange { site })?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); topology.dim()];
    amplitudes[2 * idx] = coin_amp0;
    amplitudes[2 * idx + 1] = coin_amp1;
    Ok(PureState::from_parts(topology, amplitudes))
}

/// Dense density operator over the walker-coin basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: Vec<Complex64>,
    topology: Topology,
}

impl DensityState {
    pub fn new(topology: Topology, matrix: Vec<Complex64>) -> Result<Self> {
        let dim = check_density_dim(&topology)?;
        if matrix.len() != dim * dim {
            return Err(WalkError::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        let mut herm_dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (matrix[i * dim + j] - matrix[j * dim + i].conj()).norm();
                herm_dev = herm_dev.max(d);
            }
        }
        if herm_dev > NORM_TOL {
            return Err(WalkError::NotHermitian(herm_dev));
        }
        let mut trace = 0.0;
        for i in 0..dim {
            let d = matrix[i * dim + i];
            if d.re < -1e-12 || d.im.abs() > 1e-12 {
                return Err(WalkError::BadDiagonal(i));
            }
            trace += d.re;
        }
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(WalkError::TraceNotOne(trace));
        }
        Ok(Self { matrix, topology })
    }

    /// Projector |ψ⟩⟨ψ|.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        let dim = check_density_dim(state.topology())?;
        let a = state.amplitudes();
        let mut matrix = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                matrix.push(a[i] * a[j].conj());
            }
        }
        Ok(Self {
            matrix,
            topology: *state.topology(),
        })
    }

    pub(crate) fn from_parts(topology: Topology, matrix: Vec<Complex64>) -> Self {
        debug_assert_eq!(matrix.len(), topology.dim() * topology.dim());
        Self { matrix, topology }
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn dim(&self) -> usize {
        self.topology.dim()
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.matrix[i * dim + i]).sum()
    }
}

fn check_density_dim(topology: &Topology) -> Result<usize> {
    let dim = topology.dim();
    if dim > MAX_DENSITY_DIM {
        return Err(WalkError::DensityTooLarge {
            dim,
            limit: MAX_DENSITY_DIM,
        });
    }
    Ok(dim)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionDistribution {
    probs: Vec<f64>,
    topology: Topology,
}

impl PositionDistribution {
    /// Validates non-negativity and normalization after clamping dust to zero.
    pub fn new(topology: Topology, mut probs: Vec<f64>) -> Result<Self> {
        if probs.len() != topology.n_sites() {
            return Err(WalkError::DimensionMismatch {
                expected: topology.n_sites(),
                got: probs.len(),
            });
        }
        for (index, p) in probs.iter_mut().enumerate() {
            if p.abs() < PROB_DUST {
                *p = 0.0;
            }
            if !(*p >= 0.0) {
                return Err(WalkError::NegativeProbability { index, value: *p });
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(WalkError::ProbabilitiesNotNormalized(total));
        }
        Ok(Self { probs, topology })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability at `site`, zero outside the topology.
    pub fn prob(&self, site: i64) -> f64 {
        self.topology.index_of(site).map_or(0.0, |i| self.probs[i])
    }

    /// (site, probability) pairs in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.topology.site_at(i), p))
    }
}

/// Anything whose coin degree of freedom can be traced out.
pub trait TraceCoin {
    fn distribution(&self) -> PositionDistribution;
}

impl TraceCoin for PureState {
    fn distribution(&self) -> PositionDistribution {
        let probs = self
            .amplitudes
            .chunks_exact(2)
            .map(|c| c[0].norm_sqr() + c[1].norm_sqr())
            .collect();
        PositionDistribution::new(self.topology, probs)
            .expect("a normalized pure state yields a valid distribution")
    }
}

impl TraceCoin for DensityState {
    fn distribution(&self) -> PositionDistribution {
        let dim = self.dim();
        let probs = (0..self.topology.n_sites())
            .map(|s| {
                let a = 2 * s;
                self.matrix[a * dim + a].re + self.matrix[(a + 1) * dim + a + 1].re
            })
            .collect();
        PositionDistribution::new(self.topology, probs)
            .expect("a trace-one density state yields a valid distribution")
    }
}

/// Position distribution with the coin traced out.
pub fn distribution_of<S: TraceCoin + ?Sized>(state: &S) -> PositionDistribution {
    state.distribution()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetric_initial_amplitudes() {
        let s = make_symmetric_initial(Topology::line(10).unwrap());
        assert!((s.amplitude(0, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((s.amplitude(0, 1) - c(0.0, FRAC_1_SQRT_2)).norm() < 1e-16);
        assert_eq!(s.amplitude(1, 0), c(0.0, 0.0));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        let same = make_initial(
            *s.topology(),
            c(FRAC_1_SQRT_2, 0.0),
            c(0.0, FRAC_1_SQRT_2),
            0,
        )
        .unwrap();
        assert_eq!(s, same);
    }

    #[test]
    fn custom_initial() {
        let topo = Topology::line(5).unwrap();
        let s = make_initial(topo, c(0.6, 0.0), c(0.0, 0.8), 3).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        let d = distribution_of(&s);
        assert!((d.prob(3) - 1.0).abs() < 1e-15);
        assert!(d.iter().all(|(x, p)| x == 3 || p == 0.0));
        let coin0 = make_initial(topo, c(1.0, 0.0), c(0.0, 0.0), 0).unwrap();
        assert_eq!(coin0.amplitude(0, 0), c(1.0, 0.0));
        assert!(matches!(
            make_initial(topo, c(1.0, 0.0), c(0.1, 0.0), 0),
            Err(WalkError::NotNormalized(_))
        ));
        assert_eq!(
            make_initial(topo, c(1.0, 0.0), c(0.0, 0.0), 6),
            Err(WalkError::SiteOutOfRange { site: 6 })
        );
    }

    #[test]
    fn pure_distribution() {
        let topo = Topology::line(2).unwrap();
        let mut a = vec![c(0.0, 0.0); topo.dim()];
        a[2 * topo.index_of(1).unwrap()] = c(FRAC_1_SQRT_2, 0.0);
        a[2 * topo.index_of(-1).unwrap() + 1] = c(FRAC_1_SQRT_2, 0.0);
        let d = distribution_of(&PureState::new(topo, a).unwrap());
        assert!((d.prob(1) - 0.5).abs() < 1e-15);
        assert!((d.prob(-1) - 0.5).abs() < 1e-15);
        assert_eq!(d.prob(0), 0.0);
        let init = distribution_of(&make_symmetric_initial(topo));
        assert!((init.prob(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_distribution_reads_diagonal() {
        let topo = Topology::line(2).unwrap();
        let dim = topo.dim();
        let mut m = vec![c(0.0, 0.0); dim * dim];
        let a = 2 * topo.index_of(0).unwrap();
        let b = 2 * topo.index_of(2).unwrap() + 1;
        m[a * dim + a] = c(0.5, 0.0);
        m[b * dim + b] = c(0.5, 0.0);
        let rho = DensityState::new(topo, m).unwrap();
        let d = distribution_of(&rho);
        assert_eq!(d.prob(0), 0.5);
        assert_eq!(d.prob(2), 0.5);
        assert_eq!(d.prob(1), 0.0);
    }

    #[test]
    fn density_validation() {
        let topo = Topology::line(1).unwrap();
        let dim = topo.dim();
        let mut m = vec![c(0.0, 0.0); dim * dim];
        m[0] = c(1.0, 0.0);
        m[1] = c(0.1, 0.0);
        assert!(matches!(
            DensityState::new(topo, m.clone()),
            Err(WalkError::NotHermitian(_))
        ));
        m[dim] = c(0.1, 0.0);
        assert!(DensityState::new(topo, m.clone()).is_ok());
        m[0] = c(0.9, 0.0);
        assert!(matches!(
            DensityState::new(topo, m),
            Err(WalkError::TraceNotOne(_))
        ));
        let big = Topology::line(256).unwrap();
        assert!(matches!(
            DensityState::from_pure(&make_symmetric_initial(big)),
            Err(WalkError::DensityTooLarge { dim: 1026, .. })
        ));
        assert!(DensityState::from_pure(&make_symmetric_initial(Topology::line(255).unwrap())).is_ok());
    }

    #[test]
    fn dust_is_clamped() {
        let topo = Topology::line(1).unwrap();
        let d = PositionDistribution::new(topo, vec![-1e-17, 1.0, 1e-16]).unwrap();
        assert_eq!(d.probs(), &[0.0, 1.0, 0.0]);
        assert!(PositionDistribution::new(topo, vec![-1e-3, 1.001, 0.0]).is_err());
        assert!(PositionDistribution::new(topo, vec![0.5, 0.4, 0.0]).is_err());
    }
}
