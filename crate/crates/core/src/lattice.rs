//! Lattice geometry, coin bias and site-dependent phase profiles.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

/// Coin rotation angle θ ∈ [0, π/2].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinBias {
    theta: f64,
}

impl CoinBias {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(WalkError::CoinBiasOutOfRange(theta));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Tunneling amplitude d = cos θ.
    pub fn tunneling(&self) -> f64 {
        self.theta.cos().max(0.0)
    }
}

/// Where the walker lives.
///
/// A line of half-width `t_max` holds sites `-t_max..=t_max`; a walker
/// started at the origin cannot leave it within `t_max` steps, so no
/// boundary treatment is ever needed. A ring wraps modulo `n_sites`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    Line { t_max: usize },
    Ring { n_sites: usize },
}

impl Topology {
    pub fn line(t_max: usize) -> Result<Self> {
        if t_max < 1 {
            return Err(WalkError::LineTooShort(t_max));
        }
        Ok(Topology::Line { t_max })
    }

    pub fn ring(n_sites: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(WalkError::RingTooSmall(n_sites));
        }
        Ok(Topology::Ring { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        match *self {
            Topology::Line { t_max } => 2 * t_max + 1,
            Topology::Ring { n_sites } => n_sites,
        }
    }

    /// Dimension of the walker-coin space.
    pub fn dim(&self) -> usize {
        2 * self.n_sites()
    }

    pub fn min_site(&self) -> i64 {
        match *self {
            Topology::Line { t_max } => -(t_max as i64),
            Topology::Ring { .. } => 0,
        }
    }

    /// Storage index of a site label, if the site belongs to the topology.
    pub fn index_of(&self, site: i64) -> Option<usize> {
        let idx = site - self.min_site();
        (0..self.n_sites() as i64)
            .contains(&idx)
            .then_some(idx as usize)
    }

    /// Site label stored at `index`.
    pub fn site_at(&self, index: usize) -> i64 {
        self.min_site() + index as i64
    }

    pub fn origin_index(&self) -> usize {
        self.index_of(0).expect("origin always belongs to the topology")
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.n_sites()).map(move |i| self.site_at(i))
    }

    pub fn is_ring(&self) -> bool {
        matches!(self, Topology::Ring { .. })
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Site-dependent phase φ(x) applied by the shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PhaseProfile {
    Zero,
    /// φ(x) = 2π q x / p with gcd(q, p) = 1.
    Harmonic { q: i64, p: i64 },
    /// Explicit phases, one per site, starting at `first_site`.
    Table { first_site: i64, phases: Vec<f64> },
}

impl PhaseProfile {
    pub fn harmonic(q: i64, p: i64) -> Result<Self> {
        if p < 1 {
            return Err(WalkError::PeriodNotPositive(p));
        }
        if q < 0 {
            return Err(WalkError::NegativeQ(q));
        }
        let g = gcd(q, p);
        if g != 1 {
            return Err(WalkError::NotCoprime { q, p, gcd: g });
        }
        Ok(PhaseProfile::Harmonic { q, p })
    }

    /// A table covering every site of `topology`, reduced to [0, 2π).
    pub fn table(topology: &Topology, phases: Vec<f64>) -> Result<Self> {
        if phases.len() != topology.n_sites() {
            return Err(WalkError::TableLength {
                expected: topology.n_sites(),
                got: phases.len(),
            });
        }
        Ok(PhaseProfile::Table {
            first_site: topology.min_site(),
            phases: phases.into_iter().map(reduce_angle).collect(),
        })
    }

    /// Phase at `site`, in [0, 2π).
    pub fn phase_at(&self, site: i64) -> Result<f64> {
        match self {
            PhaseProfile::Zero => Ok(0.0),
            PhaseProfile::Harmonic { q, p } => {
                // residue in exact integer arithmetic, scaled once
                let r = (*q as i128 * site as i128).rem_euclid(*p as i128);
                Ok(TAU * r as f64 / *p as f64)
            }
            PhaseProfile::Table { first_site, phases } => {
                let idx = site - first_site;
                usize::try_from(idx)
                    .ok()
                    .and_then(|i| phases.get(i).copied())
                    .ok_or(WalkError::SiteOutOfRange { site })
            }
        }
    }

    /// Spatial period of the profile; `None` for tables.
    pub fn period(&self) -> Option<i64> {
        match self {
            PhaseProfile::Zero => Some(1),
            PhaseProfile::Harmonic { p, .. } => Some(*p),
            PhaseProfile::Table { .. } => None,
        }
    }

    /// The numerator q (0 for the zero profile).
    pub fn numerator(&self) -> Option<i64> {
        match self {
            PhaseProfile::Zero => Some(0),
            PhaseProfile::Harmonic { q, .. } => Some(*q),
            PhaseProfile::Table { .. } => None,
        }
    }

    /// Same profile with a constant `offset` added to every phase, as a table over `topology`.
    pub fn offset_by(&self, topology: &Topology, offset: f64) -> Result<Self> {
        let phases = topology
            .sites()
            .map(|x| self.phase_at(x).map(|phi| phi + offset))
            .collect::<Result<Vec<_>>>()?;
        PhaseProfile::table(topology, phases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coin_bias_bounds() {
        assert!(CoinBias::new(0.0).is_ok());
        assert!(CoinBias::new(FRAC_PI_2).is_ok());
        assert!(CoinBias::new(-1e-9).is_err());
        assert!(CoinBias::new(FRAC_PI_2 + 1e-9).is_err());
        assert!(CoinBias::new(f64::NAN).is_err());
        assert!((CoinBias::new(PI / 3.0).unwrap().tunneling() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn harmonic_phase_values() {
        let h = PhaseProfile::harmonic(1, 4).unwrap();
        assert!((h.phase_at(1).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(h.phase_at(4).unwrap(), 0.0);
        assert!((h.phase_at(-1).unwrap() - 3.0 * PI / 2.0).abs() < 1e-15);
        let z = PhaseProfile::harmonic(0, 1).unwrap();
        assert_eq!(z.phase_at(12345).unwrap(), 0.0);
        // large sites stay exact
        assert_eq!(h.phase_at(4_000_000_000_000).unwrap(), 0.0);
        assert!((h.phase_at(4_000_000_000_001).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_validation() {
        assert!(matches!(
            PhaseProfile::harmonic(2, 4),
            Err(WalkError::NotCoprime { gcd: 2, .. })
        ));
        assert!(PhaseProfile::harmonic(0, 4).is_err());
        assert!(PhaseProfile::harmonic(1, 0).is_err());
        assert!(PhaseProfile::harmonic(-1, 4).is_err());
        assert!(PhaseProfile::harmonic(3, 4).is_ok());
    }

    #[test]
    fn table_lookup() {
        let topo = Topology::line(2).unwrap();
        let t = PhaseProfile::table(&topo, vec![0.0, 1.0, -1.0, 7.0, 2.0]).unwrap();
        assert_eq!(t.phase_at(-1).unwrap(), 1.0);
        assert!((t.phase_at(0).unwrap() - (TAU - 1.0)).abs() < 1e-15);
        assert!((t.phase_at(1).unwrap() - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(t.phase_at(3), Err(WalkError::SiteOutOfRange { site: 3 }));
        assert!(PhaseProfile::table(&topo, vec![0.0; 4]).is_err());
    }

    #[test]
    fn topology_indexing() {
        let line = Topology::line(3).unwrap();
        assert_eq!(line.n_sites(), 7);
        assert_eq!(line.index_of(-3), Some(0));
        assert_eq!(line.index_of(4), None);
        assert_eq!(line.origin_index(), 3);
        let ring = Topology::ring(5).unwrap();
        assert_eq!(ring.index_of(4), Some(4));
        assert_eq!(ring.index_of(-1), None);
        assert!(Topology::ring(1).is_err());
        assert!(Topology::line(0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn harmonic_is_period_p(q in 0i64..50, p in 1i64..50, x in -1_000_000i64..1_000_000) {
            if let Ok(h) = PhaseProfile::harmonic(q, p) {
                let a = h.phase_at(x).unwrap();
                let b = h.phase_at(x + p).unwrap();
                proptest::prop_assert_eq!(a, b);
                proptest::prop_assert!((0.0..TAU).contains(&a));
            }
        }
    }
}
