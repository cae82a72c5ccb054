//! Distribution statistics: variance, recurrence, 1-norm distance,
//! spreading-exponent fits and quasi-period detection.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};
use crate::state::PositionDistribution;

/// One value per step t = 0..=T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(t) = values.iter().position(|v| !v.is_finite()) {
            return Err(WalkError::NonFinite(t));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest step index, T.
    pub fn last_step(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

fn require_line(p: &PositionDistribution) -> Result<()> {
    if p.topology().is_ring() {
        return Err(WalkError::LineRequired);
    }
    Ok(())
}

/// Σ x² P(x) − (Σ x P(x))², clamped at zero.
pub fn variance(p: &PositionDistribution) -> Result<f64> {
    require_line(p)?;
    let (mut m1, mut m2) = (0.0, 0.0);
    for (x, px) in p.iter() {
        let x = x as f64;
        m1 += x * px;
        m2 += x * x * px;
    }
    Ok((m2 - m1 * m1).max(0.0))
}

pub fn std_dev(p: &PositionDistribution) -> Result<f64> {
    variance(p).map(f64::sqrt)
}

/// Probability of finding the walker at the origin.
pub fn recurrence(p: &PositionDistribution) -> f64 {
    p.prob(0)
}

/// ½ Σ |P(x) − Q(x)|.
pub fn l1_distance(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.topology() != q.topology() {
        return Err(WalkError::TopologyMismatch);
    }
    let sum: f64 = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((0.5 * sum).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares slope of log σ against log t over `t_min..=t_max`.
pub fn fit_spreading_exponent(sigma: &TimeSeries, t_min: usize, t_max: usize) -> Result<PowerLawFit> {
    let len = sigma.len();
    if t_min < 1 || t_min > t_max || t_max >= len {
        return Err(WalkError::BadWindow { t_min, t_max, len });
    }
    let count = t_max - t_min + 1;
    if count < 3 {
        return Err(WalkError::TooFewPoints(count));
    }
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for t in t_min..=t_max {
        let v = sigma.values()[t];
        if !(v > 0.0) {
            return Err(WalkError::NonPositive(t));
        }
        xs.push((t as f64).ln());
        ys.push(v.ln());
    }
    let n = count as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiPeriod {
    pub tau: usize,
    pub score: f64,
}

/// Period τ ∈ [2, tau_max] maximizing the mean of the series at t = τ, 2τ, ….
/// Ties go to the smaller τ.
pub fn detect_quasi_period(series: &TimeSeries, tau_max: usize) -> Result<QuasiPeriod> {
    if tau_max < 2 {
        return Err(WalkError::TauMaxTooSmall(tau_max));
    }
    let needed = 2 * tau_max + 1;
    if series.len() < needed {
        return Err(WalkError::SeriesTooShort {
            len: series.len(),
            tau_max,
            needed,
        });
    }
    let last = series.last_step();
    let mut best = QuasiPeriod {
        tau: 0,
        score: f64::NEG_INFINITY,
    };
    for tau in 2..=tau_max {
        let hits: Vec<f64> = (tau..=last)
            .step_by(tau)
            .map(|t| series.values()[t])
            .collect();
        let score = hits.iter().sum::<f64>() / hits.len() as f64;
        if score > best.score {
            best = QuasiPeriod { tau, score };
        }
    }
    Ok(best)
}

/// Divides by the series maximum.
pub fn normalized_variance(sigma: &TimeSeries) -> Result<TimeSeries> {
    let max = sigma.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if sigma.is_empty() || !(max > 0.0) {
        return Err(WalkError::AllZero);
    }
    TimeSeries::new(
        format!("{} (normalized)", sigma.label()),
        sigma.values().iter().map(|v| v / max).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Topology;

    fn line_dist(t_max: usize, entries: &[(i64, f64)]) -> PositionDistribution {
        let topo = Topology::line(t_max).unwrap();
        let mut probs = vec![0.0; topo.n_sites()];
        for &(x, p) in entries {
            probs[topo.index_of(x).unwrap()] = p;
        }
        PositionDistribution::new(topo, probs).unwrap()
    }

    #[test]
    fn variance_cases() {
        assert_eq!(variance(&line_dist(3, &[(0, 1.0)])).unwrap(), 0.0);
        assert_eq!(variance(&line_dist(3, &[(1, 0.5), (-1, 0.5)])).unwrap(), 1.0);
        let v = variance(&line_dist(3, &[(2, 0.25), (0, 0.5), (-2, 0.25)])).unwrap();
        assert_eq!(v, 2.0);
        let ring = PositionDistribution::new(Topology::ring(4).unwrap(), vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(variance(&ring), Err(WalkError::LineRequired));
        assert_eq!(recurrence(&ring), 1.0);
    }

    #[test]
    fn recurrence_cases() {
        assert_eq!(recurrence(&line_dist(2, &[(0, 1.0)])), 1.0);
        assert_eq!(recurrence(&line_dist(2, &[(1, 0.5), (-1, 0.5)])), 0.0);
    }

    #[test]
    fn l1_cases() {
        let p = line_dist(2, &[(0, 1.0)]);
        let q = line_dist(2, &[(0, 0.5), (1, 0.5)]);
        let r = line_dist(2, &[(2, 1.0)]);
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(l1_distance(&p, &r).unwrap(), 1.0);
        assert_eq!(l1_distance(&p, &q).unwrap(), 0.5);
        let other = line_dist(3, &[(0, 1.0)]);
        assert_eq!(l1_distance(&p, &other), Err(WalkError::TopologyMismatch));
    }

    #[test]
    fn exact_power_laws() {
        let sqrt = TimeSeries::new("sqrt", (0..30).map(|t| (t as f64).sqrt()).collect()).unwrap();
        let fit = fit_spreading_exponent(&sqrt, 1, 29).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let lin = TimeSeries::new("lin", (0..30).map(|t| 0.7 * t as f64).collect()).unwrap();
        let fit = fit_spreading_exponent(&lin, 2, 20).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-9);
        assert!((fit.prefactor - 0.7).abs() < 1e-9);
    }

    #[test]
    fn fit_errors() {
        let s = TimeSeries::new("s", vec![0.0, 1.0, 2.0, 0.0, 4.0]).unwrap();
        assert_eq!(fit_spreading_exponent(&s, 1, 2), Err(WalkError::TooFewPoints(2)));
        assert_eq!(fit_spreading_exponent(&s, 1, 3), Err(WalkError::NonPositive(3)));
        assert!(matches!(fit_spreading_exponent(&s, 0, 2), Err(WalkError::BadWindow { .. })));
        assert!(matches!(fit_spreading_exponent(&s, 1, 9), Err(WalkError::BadWindow { .. })));
        assert!(TimeSeries::new("bad", vec![f64::NAN]).is_err());
    }

    #[test]
    fn quasi_period_constructed() {
        let mut v = vec![0.0; 11];
        for t in [0, 4, 8] {
            v[t] = 1.0;
        }
        let s = TimeSeries::new("rec", v).unwrap();
        assert_eq!(detect_quasi_period(&s, 5).unwrap(), QuasiPeriod { tau: 4, score: 1.0 });
        assert!(matches!(
            detect_quasi_period(&s, 6),
            Err(WalkError::SeriesTooShort { needed: 13, .. })
        ));
        assert_eq!(detect_quasi_period(&s, 1), Err(WalkError::TauMaxTooSmall(1)));
    }

    #[test]
    fn quasi_period_ties_prefer_smaller() {
        let s = TimeSeries::new("flat", vec![1.0; 13]).unwrap();
        assert_eq!(detect_quasi_period(&s, 6).unwrap().tau, 2);
    }

    #[test]
    fn normalization() {
        let s = TimeSeries::new("v", vec![0.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(normalized_variance(&s).unwrap().values(), &[0.0, 0.5, 1.0, 0.5]);
        let c = TimeSeries::new("c", vec![3.0; 4]).unwrap();
        assert!(normalized_variance(&c).unwrap().values().iter().all(|&v| v == 1.0));
        let z = TimeSeries::new("z", vec![0.0; 4]).unwrap();
        assert_eq!(normalized_variance(&z), Err(WalkError::AllZero));
    }

    proptest::proptest! {
        #[test]
        fn variance_translation_covariant(
            weights in proptest::collection::vec(0.0f64..1.0, 5),
            shift in -3i64..=3,
        ) {
            let total: f64 = weights.iter().sum();
            proptest::prop_assume!(total > 1e-3);
            let entries: Vec<(i64, f64)> =
                weights.iter().enumerate().map(|(i, w)| (i as i64 - 2, w / total)).collect();
            let shifted: Vec<(i64, f64)> = entries.iter().map(|&(x, p)| (x + shift, p)).collect();
            let a = variance(&line_dist(6, &entries)).unwrap();
            let b = variance(&line_dist(6, &shifted)).unwrap();
            proptest::prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
