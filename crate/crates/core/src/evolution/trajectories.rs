//! Monte-Carlo unravelling of position dephasing by random site phases.
//!
//! After every unitary step each site x picks up e^{iδ(x)} with δ uniform
//! on [−πη, πη], independently per site and per step. Averaged over the
//! ensemble, a coherence between two distinct sites is damped by
//! |E e^{iδ}|² = sinc²(πη), so the ensemble mean reproduces the density
//! backend at gamma = 1 − sinc²(πη).
//!
//! Randomness: trajectory `i` owns a ChaCha8 stream seeded with `seed`
//! and stream id `i`. Trajectories are summed in fixed chunks of
//! [`TRAJECTORY_CHUNK`] and the chunk sums are combined in index order, so
//! the result is bitwise independent of the number of worker threads.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::density::check_eta;
use super::{check_capacity, StepKernel, WalkParams};
use crate::error::{Result, WalkError};
use crate::state::{PositionDistribution, PureState};

pub const TRAJECTORY_CHUNK: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryEnsemble {
    /// Ensemble-mean distribution for t = 0..=steps.
    pub distributions: Vec<PositionDistribution>,
    /// Per-site standard error of the mean, same shape as `distributions`.
    /// Zero when only one trajectory was run.
    pub std_errors: Vec<Vec<f64>>,
    pub n_traj: usize,
}

/// sinc(z) = sin z / z with sinc(0) = 1.
pub fn sinc(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.sin() / z
    }
}

/// Density-backend strength matching trajectory noise amplitude `eta`.
pub fn gamma_for_eta(eta: f64) -> f64 {
    let s = sinc(std::f64::consts::PI * eta);
    1.0 - s * s
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Moments {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn zeros(len: usize) -> Self {
        Self {
            sum: vec![0.0; len],
            sum_sq: vec![0.0; len],
        }
    }

    fn absorb(&mut self, other: &Moments) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
    }
}

struct Run<'a> {
    kernel: StepKernel,
    initial: &'a PureState,
    steps: usize,
    eta: f64,
    seed: u64,
    n_traj: usize,
}

impl Run<'_> {
    fn n_sites(&self) -> usize {
        self.initial.topology().n_sites()
    }

    fn chunk(&self, chunk: usize) -> Result<Moments> {
        let n = self.n_sites();
        let mut acc = Moments::zeros((self.steps + 1) * n);
        let start = chunk * TRAJECTORY_CHUNK;
        let end = (start + TRAJECTORY_CHUNK).min(self.n_traj);
        let mut psi = vec![Complex64::new(0.0, 0.0); 2 * n];
        let mut next = psi.clone();
        let half_width = std::f64::consts::PI * self.eta;
        for traj in start..end {
            let mut rng = trajectory_rng(self.seed, traj as u64);
            psi.copy_from_slice(self.initial.amplitudes());
            record(&psi, &mut acc, 0, n);
            for t in 1..=self.steps {
                self.kernel.apply(&psi, &mut next)?;
                for site in next.chunks_exact_mut(2) {
                    let delta = half_width * (2.0 * unit_f64(&mut rng) - 1.0);
                    let kick = Complex64::from_polar(1.0, delta);
                    site[0] *= kick;
                    site[1] *= kick;
                }
                std::mem::swap(&mut psi, &mut next);
                record(&psi, &mut acc, t, n);
            }
        }
        Ok(acc)
    }
}

fn record(psi: &[Complex64], acc: &mut Moments, t: usize, n: usize) {
    for (s, pair) in psi.chunks_exact(2).enumerate() {
        let p = pair[0].norm_sqr() + pair[1].norm_sqr();
        acc.sum[t * n + s] += p;
        acc.sum_sq[t * n + s] += p * p;
    }
}

pub fn evolve_trajectories(
    initial: &PureState,
    params: &WalkParams,
    eta: f64,
    n_traj: usize,
    seed: u64,
    steps: usize,
) -> Result<TrajectoryEnsemble> {
    check_eta(eta)?;
    if n_traj == 0 {
        return Err(WalkError::NoTrajectories);
    }
    if initial.topology() != params.topology() {
        return Err(WalkError::TopologyMismatch);
    }
    check_capacity(params.topology(), steps)?;
    let run = Run {
        kernel: StepKernel::new(params)?,
        initial,
        steps,
        eta,
        seed,
        n_traj,
    };
    let n_chunks = n_traj.div_ceil(TRAJECTORY_CHUNK);

    #[cfg(feature = "parallel")]
    let chunks: Vec<Moments> = {
        use rayon::prelude::*;
        (0..n_chunks)
            .into_par_iter()
            .map(|c| run.chunk(c))
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let chunks: Vec<Moments> = (0..n_chunks).map(|c| run.chunk(c)).collect::<Result<_>>()?;

    let n = run.n_sites();
    let mut total = Moments::zeros((steps + 1) * n);
    for c in &chunks {
        total.absorb(c);
    }

    let count = n_traj as f64;
    let topo = *initial.topology();
    let mut distributions = Vec::with_capacity(steps + 1);
    let mut std_errors = Vec::with_capacity(steps + 1);
    for t in 0..=steps {
        let range = t * n..(t + 1) * n;
        let mean: Vec<f64> = total.sum[range.clone()].iter().map(|s| s / count).collect();
        let se = total.sum[range.clone()]
            .iter()
            .zip(&total.sum_sq[range])
            .map(|(s, sq)| {
                if n_traj < 2 {
                    return 0.0;
                }
                let var = ((sq - s * s / count) / (count - 1.0)).max(0.0);
                (var / count).sqrt()
            })
            .collect();
        distributions.push(PositionDistribution::new(topo, mean)?);
        std_errors.push(se);
    }
    Ok(TrajectoryEnsemble {
        distributions,
        std_errors,
        n_traj,
    })
}
