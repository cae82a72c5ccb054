//! One walk step is a coin rotation at every site followed by the
//! coin-conditioned shift
//!
//! ```text
//! S = Σ_c Σ_x e^{iφ(x)} |x + (-1)^c⟩⟨x| ⊗ |c⟩⟨c|
//! ```
//!
//! with the phase taken at the source site. Coin 0 moves right, coin 1 left.

mod classical;
mod density;
mod trajectories;

pub use classical::classical_walk_oracle;
pub use density::{apply_position_dephasing, evolve_density, symmetric_density_initial};
pub use trajectories::{
    evolve_trajectories, gamma_for_eta, sinc, trajectory_rng, TrajectoryEnsemble, TRAJECTORY_CHUNK,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::lattice::{CoinBias, PhaseProfile, Topology};
use crate::state::PureState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    coin: CoinBias,
    profile: PhaseProfile,
    topology: Topology,
}

impl WalkParams {
    pub fn new(coin: CoinBias, profile: PhaseProfile, topology: Topology) -> Result<Self> {
        match (&profile, topology) {
            (PhaseProfile::Harmonic { p, .. }, Topology::Ring { n_sites }) => {
                if n_sites % (*p as usize) != 0 {
                    return Err(WalkError::PeriodDoesNotDivide { p: *p, n_sites });
                }
            }
            (PhaseProfile::Table { first_site, phases }, _) => {
                if phases.len() != topology.n_sites() || *first_site != topology.min_site() {
                    return Err(WalkError::TableLength {
                        expected: topology.n_sites(),
                        got: phases.len(),
                    });
                }
            }
            _ => {}
        }
        Ok(Self {
            coin,
            profile,
            topology,
        })
    }

    pub fn coin(&self) -> CoinBias {
        self.coin
    }

    pub fn profile(&self) -> &PhaseProfile {
        &self.profile
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }
}

/// [[cos θ, sin θ], [sin θ, −cos θ]] in the (|0⟩, |1⟩) basis.
pub fn coin_matrix(coin: CoinBias) -> [[Complex64; 2]; 2] {
    let [[a, b], [c, d]] = real_coin(coin);
    [
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
        [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
    ]
}

fn real_coin(coin: CoinBias) -> [[f64; 2]; 2] {
    let (s, c) = coin.theta().sin_cos();
    [[c, s], [s, -c]]
}

#[inline]
fn rotate(coin: &[[f64; 2]; 2], a0: Complex64, a1: Complex64) -> (Complex64, Complex64) {
    (
        a0 * coin[0][0] + a1 * coin[0][1],
        a0 * coin[1][0] + a1 * coin[1][1],
    )
}

pub fn apply_coin(state: &PureState, coin: CoinBias) -> PureState {
    let m = real_coin(coin);
    let mut out = state.amplitudes().to_vec();
    for pair in out.chunks_exact_mut(2) {
        let (b0, b1) = rotate(&m, pair[0], pair[1]);
        pair[0] = b0;
        pair[1] = b1;
    }
    PureState::from_parts(*state.topology(), out)
}

pub fn apply_shift(state: &PureState, params: &WalkParams) -> Result<PureState> {
    check_same_topology(state, params)?;
    let kernel = StepKernel::new(params)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
    kernel.shift(state.amplitudes(), &mut out)?;
    Ok(PureState::from_parts(*state.topology(), out))
}

/// Coin then phased shift.
pub fn step(state: &PureState, params: &WalkParams) -> Result<PureState> {
    check_same_topology(state, params)?;
    let kernel = StepKernel::new(params)?;
    let mut out = vec![Complex64::new(0.0, 0.0); state.amplitudes().len()];
    kernel.apply(state.amplitudes(), &mut out)?;
    Ok(PureState::from_parts(*state.topology(), out))
}

/// States at t = 0, 1, …, `steps`.
pub fn evolve_pure(initial: &PureState, params: &WalkParams, steps: usize) -> Result<Vec<PureState>> {
    check_same_topology(initial, params)?;
    check_capacity(params.topology(), steps)?;
    let kernel = StepKernel::new(params)?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut buf = vec![Complex64::new(0.0, 0.0); initial.amplitudes().len()];
    for _ in 0..steps {
        let prev = states.last().expect("non-empty");
        kernel.apply(prev.amplitudes(), &mut buf)?;
        states.push(PureState::from_parts(*initial.topology(), buf.clone()));
    }
    Ok(states)
}

fn check_same_topology(state: &PureState, params: &WalkParams) -> Result<()> {
    if state.topology() != params.topology() {
        return Err(WalkError::TopologyMismatch);
    }
    Ok(())
}

pub(crate) fn check_capacity(topology: &Topology, steps: usize) -> Result<()> {
    if let Topology::Line { t_max } = *topology {
        if steps > t_max {
            return Err(WalkError::StepsExceedCapacity {
                steps,
                capacity: t_max,
            });
        }
    }
    Ok(())
}

/// Precomputed coin entries and per-site phase factors for one step.
#[derive(Debug, Clone)]
pub(crate) struct StepKernel {
    coin: [[f64; 2]; 2],
    phases: Vec<Complex64>,
    wraps: bool,
}

impl StepKernel {
    pub(crate) fn new(params: &WalkParams) -> Result<Self> {
        let topo = params.topology();
        let phases = topo
            .sites()
            .map(|x| params.profile().phase_at(x).map(|phi| Complex64::from_polar(1.0, phi)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coin: real_coin(params.coin()),
            phases,
            wraps: topo.is_ring(),
        })
    }

    /// Phased shift of `src` into `dst` (overwritten).
    pub(crate) fn shift(&self, src: &[Complex64], dst: &mut [Complex64]) -> Result<()> {
        self.transport(src, dst, |_, a0, a1| (a0, a1))
    }

    /// Full step U = S·C of `src` into `dst` (overwritten).
    pub(crate) fn apply(&self, src: &[Complex64], dst: &mut [Complex64]) -> Result<()> {
        self.transport(src, dst, rotate)
    }

    #[inline]
    fn transport(
        &self,
        src: &[Complex64],
        dst: &mut [Complex64],
        local: impl Fn(&[[f64; 2]; 2], Complex64, Complex64) -> (Complex64, Complex64),
    ) -> Result<()> {
        let n = self.phases.len();
        debug_assert_eq!(src.len(), 2 * n);
        let zero = Complex64::new(0.0, 0.0);
        dst.fill(zero);
        for i in 0..n {
            let (a0, a1) = local(&self.coin, src[2 * i], src[2 * i + 1]);
            if a0 == zero && a1 == zero {
                continue;
            }
            let ph = self.phases[i];
            let (right, left) = if self.wraps {
                ((i + 1) % n, (i + n - 1) % n)
            } else {
                if i == 0 || i + 1 == n {
                    return Err(WalkError::BoundaryReached);
                }
                (i + 1, i - 1)
            };
            dst[2 * right] += ph * a0;
            dst[2 * left + 1] += ph * a1;
        }
        Ok(())
    }

    /// Left-multiplies a row-major `dim × dim` matrix by U: rows play the
    /// role of amplitudes.
    pub(crate) fn apply_rows(&self, src: &[Complex64], dst: &mut [Complex64]) -> Result<()> {
        let n = self.phases.len();
        let dim = 2 * n;
        debug_assert_eq!(src.len(), dim * dim);
        let zero = Complex64::new(0.0, 0.0);
        dst.fill(zero);
        let [[c00, c01], [c10, c11]] = self.coin;
        for i in 0..n {
            let row0 = &src[2 * i * dim..(2 * i + 1) * dim];
            let row1 = &src[(2 * i + 1) * dim..(2 * i + 2) * dim];
            if row0.iter().chain(row1).all(|&a| a == zero) {
                continue;
            }
            let ph = self.phases[i];
            let (right, left) = if self.wraps {
                ((i + 1) % n, (i + n - 1) % n)
            } else {
                if i == 0 || i + 1 == n {
                    return Err(WalkError::BoundaryReached);
                }
                (i + 1, i - 1)
            };
            let r = 2 * right * dim;
            for k in 0..dim {
                dst[r + k] += ph * (row0[k] * c00 + row1[k] * c01);
            }
            let l = (2 * left + 1) * dim;
            for k in 0..dim {
                dst[l + k] += ph * (row0[k] * c10 + row1[k] * c11);
            }
        }
        Ok(())
    }
}
