use crate::lattice::{CoinBias, Topology};
use crate::state::PositionDistribution;

/// Exact distribution of the fully decohered walk after `steps` steps.
///
/// Markov chain on (site, coin): the coin is kept with probability cos²θ
/// and flipped with probability sin²θ, then the walker moves +1 for coin 0
/// and −1 for coin 1. The walk starts at the origin with the coin mixed
/// (½, ½), which is what the symmetric coin state dephases to.
///
/// The result lives on `Line { t_max: max(steps, 1) }`.
pub fn classical_walk_oracle(coin: CoinBias, steps: usize) -> PositionDistribution {
    let t_max = steps.max(1);
    let topo = Topology::Line { t_max };
    let n = topo.n_sites();
    let (s, c) = coin.theta().sin_cos();
    let (keep, flip) = (c * c, s * s);

    // mass[site][coin]
    let mut mass = vec![[0.0f64; 2]; n];
    mass[topo.origin_index()] = [0.5, 0.5];
    for _ in 0..steps {
        let mut next = vec![[0.0f64; 2]; n];
        for (i, &[m0, m1]) in mass.iter().enumerate() {
            if m0 == 0.0 && m1 == 0.0 {
                continue;
            }
            let to0 = m0 * keep + m1 * flip;
            let to1 = m0 * flip + m1 * keep;
            next[i + 1][0] += to0;
            next[i - 1][1] += to1;
        }
        mass = next;
    }
    let probs = mass.iter().map(|[a, b]| a + b).collect();
    PositionDistribution::new(topo, probs).expect("stochastic evolution stays normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::variance;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    #[test]
    fn fair_coin() {
        let coin = CoinBias::new(FRAC_PI_4).unwrap();
        let d1 = classical_walk_oracle(coin, 1);
        assert!((d1.prob(1) - 0.5).abs() < 1e-15 && (d1.prob(-1) - 0.5).abs() < 1e-15);
        for t in [0, 1, 5, 30] {
            let v = variance(&classical_walk_oracle(coin, t)).unwrap();
            assert!((v - t as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn biased_two_steps_by_path_enumeration() {
        // Four two-step paths per starting coin. keep = cos² = 1/4, flip = 3/4.
        // Start coin 0 (½): first move uses new coin c1, second coin c2.
        let keep: f64 = 0.25;
        let flip: f64 = 0.75;
        let mut p = std::collections::BTreeMap::new();
        for c0 in 0..2 {
            for c1 in 0..2 {
                for c2 in 0..2 {
                    let w1 = if c1 == c0 { keep } else { flip };
                    let w2 = if c2 == c1 { keep } else { flip };
                    let dx = |c: i32| if c == 0 { 1 } else { -1 };
                    *p.entry(dx(c1) + dx(c2)).or_insert(0.0) += 0.5 * w1 * w2;
                }
            }
        }
        let d = classical_walk_oracle(CoinBias::new(FRAC_PI_3).unwrap(), 2);
        for (x, want) in p {
            assert!((d.prob(x as i64) - want).abs() < 1e-15, "x={x}");
        }
        // frozen: P(±2) = 1/8, P(0) = 3/4
        assert!((d.prob(2) - 0.125).abs() < 1e-15);
        assert!((d.prob(0) - 0.75).abs() < 1e-15);
    }
}
