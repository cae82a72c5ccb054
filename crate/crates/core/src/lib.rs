//! Discrete-time coined quantum walks on a line or ring with a
//! site-dependent phase φ(x) applied during the shift.
//!
//! - [`lattice`]: coin bias, phase profiles, topologies
//! - [`state`]: pure and density states, position distributions
//! - [`evolution`]: the step unitary, dephasing, trajectories, classical limit
//! - [`spectral`]: quasi-energies via Bloch blocks, band analysis
//! - [`metrics`]: variance, recurrence, distances, fits, quasi-periods

pub mod error;
pub mod evolution;
pub mod lattice;
pub mod metrics;
pub mod spectral;
pub mod state;

pub use error::{Result, WalkError};
pub use evolution::WalkParams;
pub use lattice::{CoinBias, PhaseProfile, Topology};
pub use state::{
    distribution_of, make_initial, make_symmetric_initial, DensityState, PositionDistribution,
    PureState,
};
