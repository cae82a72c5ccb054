//! Band clustering on the quasi-energy circle.
//!
//! The `n_bands` largest circular gaps between consecutive levels are the
//! band gaps. If the smallest of them is not clearly larger (factor
//! [`CLEAR_GAP_RATIO`]) than every remaining gap, the spectrum is not in
//! the banded regime and a single flagged band is reported.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Result, WalkError};

pub const CLEAR_GAP_RATIO: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    /// Lower edge, going counter-clockwise. May exceed `max_e` when the
    /// band straddles ±π.
    pub min_e: f64,
    pub max_e: f64,
    pub width: f64,
    pub member_count: usize,
    pub distinct_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub n_bands: usize,
    pub bands: Vec<Band>,
    /// Band index of every spectrum entry, aligned with `Spectrum::entries`.
    pub assignments: Vec<usize>,
    /// Largest number of levels sharing one quasi-energy.
    pub max_degeneracy: usize,
    /// Set when the requested number of clear gaps was not found.
    pub flagged: bool,
    pub tolerance: f64,
}

pub fn band_analysis(spectrum: &Spectrum, n_bands: usize, tol: f64) -> Result<BandReport> {
    if !(tol > 0.0) {
        return Err(WalkError::BadTolerance(tol));
    }
    let energies = spectrum.energies();
    let count = energies.len();
    if count == 0 {
        return Ok(BandReport {
            n_bands: 0,
            bands: Vec::new(),
            assignments: Vec::new(),
            max_degeneracy: 0,
            flagged: true,
            tolerance: tol,
        });
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));

    // gap i sits between order[i] and order[i + 1] (cyclically)
    let gaps: Vec<f64> = (0..count)
        .map(|i| {
            let a = energies[order[i]];
            let b = energies[order[(i + 1) % count]];
            if i + 1 == count {
                b + TAU - a
            } else {
                b - a
            }
        })
        .collect();

    let mut by_size: Vec<usize> = (0..count).collect();
    by_size.sort_by(|&a, &b| gaps[b].total_cmp(&gaps[a]).then(a.cmp(&b)));

    let wanted = n_bands.max(1);
    let clear = if wanted >= count {
        false
    } else {
        let smallest_chosen = gaps[by_size[wanted - 1]];
        let largest_rest = gaps[by_size[wanted]];
        smallest_chosen > CLEAR_GAP_RATIO * largest_rest
    };
    let (cut_points, flagged) = if clear {
        let mut cuts: Vec<usize> = by_size[..wanted].to_vec();
        cuts.sort_unstable();
        (cuts, false)
    } else {
        (vec![by_size[0]], count > 0 && wanted > 1)
    };

    // Walk the circle starting just after each cut.
    let mut assignments = vec![0; count];
    let mut bands = Vec::with_capacity(cut_points.len());
    let mut max_degeneracy = 0;
    for (band_id, &cut) in cut_points.iter().enumerate() {
        let next_cut = cut_points[(band_id + 1) % cut_points.len()];
        let mut members = Vec::new();
        let mut i = (cut + 1) % count;
        loop {
            members.push(order[i]);
            if i == next_cut {
                break;
            }
            i = (i + 1) % count;
        }
        // unwrap along the arc
        let start = energies[members[0]];
        let unwrapped: Vec<f64> = members
            .iter()
            .map(|&m| {
                let e = energies[m];
                if e < start {
                    e + TAU
                } else {
                    e
                }
            })
            .collect();
        let mut distinct = 1;
        let mut run = 1;
        for w in unwrapped.windows(2) {
            if w[1] - w[0] > tol {
                distinct += 1;
                run = 1;
            } else {
                run += 1;
            }
            max_degeneracy = max_degeneracy.max(run);
        }
        max_degeneracy = max_degeneracy.max(1);
        for &m in &members {
            assignments[m] = band_id;
        }
        bands.push(Band {
            min_e: start,
            max_e: energies[*members.last().expect("band is non-empty")],
            width: unwrapped.last().expect("non-empty") - unwrapped[0],
            member_count: members.len(),
            distinct_count: distinct,
        });
    }

    // report bands in ascending order of their lower edge
    let mut rank: Vec<usize> = (0..bands.len()).collect();
    rank.sort_by(|&a, &b| bands[a].min_e.total_cmp(&bands[b].min_e));
    let mut new_id = vec![0; bands.len()];
    for (new, &old) in rank.iter().enumerate() {
        new_id[old] = new;
    }
    let bands: Vec<Band> = rank.iter().map(|&i| bands[i].clone()).collect();
    for a in assignments.iter_mut() {
        *a = new_id[*a];
    }

    Ok(BandReport {
        n_bands: bands.len(),
        bands,
        assignments,
        max_degeneracy,
        flagged,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectrumEntry;
    use std::f64::consts::PI;

    fn spectrum_of(energies: &[f64]) -> Spectrum {
        Spectrum {
            entries: energies
                .iter()
                .enumerate()
                .map(|(i, &e)| SpectrumEntry {
                    quasi_energy: e,
                    ell: 0,
                    block_index: i,
                    labels: None,
                })
                .collect(),
            theta: 0.0,
            q: 1,
            p: 2,
            n_sites: energies.len() / 2,
        }
    }

    #[test]
    fn two_clusters_one_wrapping() {
        let s = spectrum_of(&[0.1, -0.1, 0.0, 0.0, PI - 0.05, -PI + 0.05, PI, PI - 0.02]);
        let r = band_analysis(&s, 2, 1e-9).unwrap();
        assert!(!r.flagged);
        assert_eq!(r.n_bands, 2);
        assert_eq!(r.bands.iter().map(|b| b.member_count).sum::<usize>(), 8);
        let wrap = r.bands.iter().find(|b| b.min_e > b.max_e).unwrap();
        assert!((wrap.width - 0.1).abs() < 1e-12);
        let centre = r.bands.iter().find(|b| b.min_e < b.max_e).unwrap();
        assert!((centre.width - 0.2).abs() < 1e-12);
        assert_eq!(centre.distinct_count, 3);
        assert_eq!(r.max_degeneracy, 2);
    }

    #[test]
    fn no_clear_gaps_is_flagged() {
        let even: Vec<f64> = (0..8).map(|i| -PI + 0.1 + i as f64 * TAU / 8.0).collect();
        let r = band_analysis(&spectrum_of(&even), 4, 1e-9).unwrap();
        assert!(r.flagged);
        assert_eq!(r.n_bands, 1);
        assert_eq!(r.bands[0].member_count, 8);
    }

    #[test]
    fn bad_tolerance() {
        assert!(band_analysis(&spectrum_of(&[0.0, 1.0]), 1, 0.0).is_err());
    }
}
