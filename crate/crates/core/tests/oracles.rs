//! Cross-checks against routes that share no code with the library:
//! explicit dense matrix powers for the walk and nalgebra's Schur
//! decomposition for the spectrum.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, TAU};

use nalgebra::{Complex, DMatrix};
use qwalk_core::evolution::evolve_pure;
use qwalk_core::metrics::variance;
use qwalk_core::spectral::{build_step_unitary, quasi_energies, quasi_energy_of, bloch_blocks};
use qwalk_core::{
    distribution_of, make_symmetric_initial, CoinBias, PhaseProfile, Topology, WalkParams,
};

type C = Complex<f64>;

/// U = S·C on sites −w..=w written out element by element, with the phase
/// 2π q x / p evaluated directly in floating point.
fn line_unitary(theta: f64, q: i64, p: i64, w: i64) -> DMatrix<C> {
    let n = (2 * w + 1) as usize;
    let idx = |x: i64, c: usize| 2 * (x + w) as usize + c;
    let coin = [[theta.cos(), theta.sin()], [theta.sin(), -theta.cos()]];
    let mut u = DMatrix::<C>::zeros(2 * n, 2 * n);
    for x in -w..=w {
        let phase = C::from_polar(1.0, TAU * (q * x) as f64 / p as f64);
        for c_in in 0..2 {
            for c_out in 0..2 {
                let target = if c_out == 0 { x + 1 } else { x - 1 };
                if target.abs() > w {
                    continue;
                }
                u[(idx(target, c_out), idx(x, c_in))] += phase * coin[c_out][c_in];
            }
        }
    }
    u
}

fn oracle_distributions(theta: f64, q: i64, p: i64, steps: usize) -> Vec<Vec<f64>> {
    // pad the window so nothing ever touches the truncated edge
    let w = steps as i64 + 2;
    let u = line_unitary(theta, q, p, w);
    let mut psi = nalgebra::DVector::<C>::zeros(u.nrows());
    let o = 2 * w as usize;
    psi[o] = C::new(0.5f64.sqrt(), 0.0);
    psi[o + 1] = C::new(0.0, 0.5f64.sqrt());
    let mut out = Vec::new();
    for _ in 0..=steps {
        out.push(
            (-(steps as i64)..=steps as i64)
                .map(|x| {
                    let i = 2 * (x + w) as usize;
                    psi[i].norm_sqr() + psi[i + 1].norm_sqr()
                })
                .collect(),
        );
        psi = &u * psi;
    }
    out
}

fn library_distributions(theta: f64, profile: PhaseProfile, steps: usize) -> Vec<Vec<f64>> {
    let line = Topology::line(steps).unwrap();
    let params = WalkParams::new(CoinBias::new(theta).unwrap(), profile, line).unwrap();
    evolve_pure(&make_symmetric_initial(line), &params, steps)
        .unwrap()
        .iter()
        .map(|s| distribution_of(s).probs().to_vec())
        .collect()
}

#[test]
fn quasi_periodic_walk_matches_matrix_power() {
    let ours = library_distributions(FRAC_PI_3, PhaseProfile::harmonic(1, 4).unwrap(), 10);
    let oracle = oracle_distributions(FRAC_PI_3, 1, 4, 10);
    for (a, b) in ours.iter().zip(&oracle) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    // P_4 peaks at the origin; frozen from the matrix-power oracle
    let p4 = &oracle[4];
    let origin = 10;
    assert!(p4.iter().enumerate().all(|(i, &v)| i == origin || v < p4[origin]));
    assert!((p4[origin] - 57.0 / 64.0).abs() < 1e-12, "P_4(0) = {}", p4[origin]);
}

#[test]
fn standard_walk_matches_matrix_power_and_spreads() {
    let ours = library_distributions(FRAC_PI_3, PhaseProfile::Zero, 10);
    let oracle = oracle_distributions(FRAC_PI_3, 0, 1, 10);
    for (a, b) in ours.iter().zip(&oracle) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    let line = Topology::line(10).unwrap();
    let var = |t: usize| {
        variance(&qwalk_core::PositionDistribution::new(line, ours[t].clone()).unwrap()).unwrap()
    };
    assert!(var(10) > var(4));
    // ballistic trend: σ²/t² roughly settles instead of decaying like 1/t
    let r6 = var(6) / 36.0;
    let r10 = var(10) / 100.0;
    assert!(r10 > 0.7 * r6, "r6 = {r6}, r10 = {r10}");
}

#[test]
fn hadamard_two_steps_by_hand() {
    // step 1: (1+i)/2 |1,0⟩ + (1−i)/2 |−1,1⟩
    // step 2: (1+i)/(2√2) at (2,0) and (0,1); (1−i)/(2√2) at (0,0); −(1−i)/(2√2) at (−2,1)
    let d = library_distributions(FRAC_PI_4, PhaseProfile::Zero, 2);
    assert_eq!(d[2].len(), 5);
    let want = [0.25, 0.0, 0.5, 0.0, 0.25];
    for (a, b) in d[2].iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
}

fn nalgebra_quasi_energies(params: &WalkParams) -> Vec<f64> {
    let u = build_step_unitary(params).unwrap();
    let n = u.size();
    let m = DMatrix::<C>::from_row_slice(n, n, u.as_slice());
    let mut e: Vec<f64> = m
        .schur()
        .eigenvalues()
        .expect("complex Schur always yields eigenvalues")
        .iter()
        .map(|z| quasi_energy_of(*z))
        .collect();
    e.sort_by(f64::total_cmp);
    e
}

fn ring(theta: f64, q: i64, p: i64, n: usize) -> WalkParams {
    let profile = if q == 0 {
        PhaseProfile::Zero
    } else {
        PhaseProfile::harmonic(q, p).unwrap()
    };
    WalkParams::new(CoinBias::new(theta).unwrap(), profile, Topology::ring(n).unwrap()).unwrap()
}

#[test]
fn bloch_spectrum_matches_nalgebra() {
    for (theta, q, p, n) in [
        (FRAC_PI_3, 1, 4, 16),
        (FRAC_PI_4, 1, 2, 12),
        (2.0 * PI / 5.0, 3, 4, 8),
        (0.2, 0, 1, 10),
    ] {
        let params = ring(theta, q, p, n);
        let ours = quasi_energies(&params).unwrap().energies();
        let theirs = nalgebra_quasi_energies(&params);
        let mismatch = qwalk_core::spectral::max_angle_mismatch(&ours, &theirs);
        assert!(mismatch < 1e-9, "theta={theta} q={q} p={p} n={n}: {mismatch}");
    }
}

#[test]
fn standard_walk_dispersion_is_equally_spaced_in_momentum() {
    // For q = 0 each momentum k = 2πℓ/N carries a pair with sin E = ±d sin k,
    // the two members related by E ↔ π − E.
    let n = 8;
    let theta = FRAC_PI_4;
    let d = theta.cos();
    let params = ring(theta, 0, 1, n);
    let spec = quasi_energies(&params).unwrap();
    for ell in 0..n {
        let k = TAU * ell as f64 / n as f64;
        let levels: Vec<f64> = spec.sector(ell).map(|e| e.quasi_energy).collect();
        assert_eq!(levels.len(), 2);
        for e in &levels {
            assert!((e.sin().abs() - d * k.sin().abs()).abs() < 1e-12, "ell={ell}");
        }
        let sum = levels[0] + levels[1];
        let folded = (sum - PI).rem_euclid(TAU);
        assert!(folded < 1e-12 || TAU - folded < 1e-12, "ell={ell}: {levels:?}");
    }
}

#[test]
fn standard_spectrum_is_chiral() {
    for theta in [FRAC_PI_4, FRAC_PI_3, 1.0] {
        let e = quasi_energies(&ring(theta, 0, 1, 16)).unwrap().energies();
        let negated: Vec<f64> = e.iter().map(|v| -v).collect();
        assert!(qwalk_core::spectral::max_angle_mismatch(&e, &negated) < 1e-9);
    }
}

#[test]
fn swap_coin_gives_flat_bands() {
    for (q, p) in [(1, 4), (1, 2), (3, 4)] {
        let spec = quasi_energies(&ring(FRAC_PI_2, q, p, 16)).unwrap();
        // every block has the same spectrum when d = 0
        let first: Vec<f64> = spec.sector(0).map(|e| e.quasi_energy).collect();
        for ell in 1..(16 / p as usize) {
            let other: Vec<f64> = spec.sector(ell).map(|e| e.quasi_energy).collect();
            assert!(qwalk_core::spectral::max_angle_mismatch(&first, &other) < 1e-10);
        }
    }
}

#[test]
fn block_count() {
    let blocks = bloch_blocks(&ring(FRAC_PI_3, 1, 4, 16)).unwrap();
    assert_eq!(blocks.len(), 4);
    assert!(blocks.iter().all(|b| b.size() == 8));
}
