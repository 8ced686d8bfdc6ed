//! Empirical survival functions and sub-Gaussian fits.

use serde::Serialize;

use super::TestFunction;
use crate::error::{invalid, Result};

/// Thresholds with fewer exceedances than this are left out of the fit.
pub const MIN_EXCEEDANCES: u64 = 10;

/// Least-squares fit `ln S(t) ≈ a − b t²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    /// Smallest intercept with `S(t) <= exp(envelope_a − b t²)` at every
    /// fitted threshold.
    pub envelope_a: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub thresholds: Vec<f64>,
    /// `|{x : |T(x)| > t}|` estimated from the samples.
    pub survival: Vec<f64>,
    pub exceedances: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
    pub range_limit: Option<f64>,
    /// Whether each threshold entered the fit.
    pub fitted: Vec<bool>,
    /// Thresholds excluded because fewer than [`MIN_EXCEEDANCES`] samples
    /// exceed them.
    pub flagged: Vec<f64>,
    pub fit: Option<TailFit>,
}

impl TailReport {
    /// True when the envelope holds at every fitted threshold and `b > 0`.
    pub fn sub_gaussian(&self) -> bool {
        self.fit.as_ref().is_some_and(|f| f.b > 0.0)
    }
}

/// Upper end `n^{(1−2ε)/(4d−2)}` of the range of thresholds where the
/// exponential-squared bound for `Z` applies, taking `ε = 1/d` and the
/// unspecified constant as 1.
pub fn tail_range_limit(n: u32, dim: usize) -> f64 {
    let d = dim as f64;
    let eps = 1.0 / d;
    f64::from(n).powf((1.0 - 2.0 * eps) / (4.0 * d - 2.0))
}

/// Thresholds `0` and the midpoints between consecutive attainable values
/// of `|T|` up to `limit`, for the lattice-valued constructions. Midpoints
/// make the survival estimate insensitive to rounding at the levels.
pub fn lattice_thresholds(t: &TestFunction, limit: f64) -> Option<Vec<f64>> {
    let (unit, odd) = t.lattice_step()?;
    let mut out = vec![0.0];
    let mut k = if odd { 2.0 } else { 1.0 };
    while k * unit <= limit {
        if k * unit > 0.0 {
            out.push(k * unit);
        }
        k += 2.0;
    }
    Some(out)
}

/// Survival function of `|T|` on `samples` seeded uniform points and a fit
/// of `ln S(t) = a − b t²` over thresholds with at least
/// [`MIN_EXCEEDANCES`] exceedances and at most `range_limit`.
pub fn tail_distribution(
    t: &TestFunction,
    thresholds: &[f64],
    samples: usize,
    seed: u64,
    range_limit: Option<f64>,
) -> Result<TailReport> {
    if thresholds.is_empty() {
        return Err(invalid("tail estimate needs at least one threshold"));
    }
    if thresholds.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(invalid("thresholds must be finite and non-negative"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("thresholds must be strictly increasing"));
    }
    if samples == 0 {
        return Err(invalid("tail estimate needs samples"));
    }
    let mut abs: Vec<f64> = t.sample(samples, seed).into_iter().map(f64::abs).collect();
    abs.sort_by(f64::total_cmp);
    Ok(survival_report(&abs, thresholds, seed, range_limit))
}

pub(crate) fn survival_report(
    sorted_abs: &[f64],
    thresholds: &[f64],
    seed: u64,
    range_limit: Option<f64>,
) -> TailReport {
    let total = sorted_abs.len();
    let exceedances: Vec<u64> = thresholds
        .iter()
        .map(|&th| (total - sorted_abs.partition_point(|&v| v <= th)) as u64)
        .collect();
    let survival: Vec<f64> = exceedances
        .iter()
        .map(|&c| c as f64 / total as f64)
        .collect();
    let in_range = |th: f64| range_limit.is_none_or(|lim| th <= lim);
    let fitted: Vec<bool> = thresholds
        .iter()
        .zip(&exceedances)
        .map(|(&th, &c)| c >= MIN_EXCEEDANCES && in_range(th))
        .collect();
    let flagged = thresholds
        .iter()
        .zip(&exceedances)
        .filter(|&(&th, &c)| c < MIN_EXCEEDANCES && in_range(th))
        .map(|(&th, _)| th)
        .collect();
    let pts: Vec<(f64, f64)> = thresholds
        .iter()
        .zip(&survival)
        .zip(&fitted)
        .filter(|(_, &f)| f)
        .map(|((&th, &s), _)| (th * th, s.ln()))
        .collect();
    TailReport {
        thresholds: thresholds.to_vec(),
        survival,
        exceedances,
        samples: total as u64,
        seed,
        range_limit,
        fitted,
        flagged,
        fit: fit_line(&pts),
    }
}

/// Ordinary least squares `y = a − b u` with `R²`; `None` with fewer than
/// two distinct abscissae.
fn fit_line(pts: &[(f64, f64)]) -> Option<TailFit> {
    let m = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mu = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let suu: f64 = pts.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let suy: f64 = pts.iter().map(|p| (p.0 - mu) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if suu == 0.0 {
        return None;
    }
    let slope = suy / suu;
    let a = my - slope * mu;
    let b = -slope;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (a - b * p.0)).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let envelope_a = pts
        .iter()
        .map(|p| p.1 + b * p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    Some(TailFit {
        a,
        b,
        r_squared,
        envelope_a,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{generate_hammersley, generate_van_der_corput};

    #[test]
    fn survival_basics() {
        // 15 components: the sum is odd, so Z never vanishes
        let p = generate_hammersley(3, 8).unwrap();
        let z = TestFunction::build_z(&p, None).unwrap();
        assert_eq!(z.len(), 15);
        let th = lattice_thresholds(&z, 3.0).unwrap();
        let rep = tail_distribution(&z, &th, 20_000, 1, None).unwrap();
        assert_eq!(rep.thresholds[0], 0.0);
        assert_eq!(rep.survival[0], 1.0);
        assert!(rep.survival.windows(2).all(|w| w[0] >= w[1]));
        assert!(rep.survival.iter().all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn exact_gaussian_tail_is_recovered() {
        // log-survival exactly a - b t² gives a perfect fit
        let pts: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let u = i as f64 * 0.3;
                (u, 0.5 - 2.0 * u)
            })
            .collect();
        let fit = fit_line(&pts).unwrap();
        assert!((fit.a - 0.5).abs() < 1e-12);
        assert!((fit.b - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.envelope_a - 0.5).abs() < 1e-12);
        assert!(fit_line(&pts[..1]).is_none());
    }

    #[test]
    fn sparse_thresholds_are_flagged() {
        let sorted = [0.1, 0.2, 0.3, 0.4, 0.5];
        let rep = survival_report(&sorted, &[0.0, 0.25, 0.45], 0, None);
        assert_eq!(rep.exceedances, [5, 3, 1]);
        assert_eq!(rep.flagged, [0.0, 0.25, 0.45]);
        assert!(rep.fit.is_none());
    }

    #[test]
    fn range_limit_matches_formula() {
        assert!((tail_range_limit(13, 3) - 13f64.powf(1.0 / 30.0)).abs() < 1e-15);
        let p = generate_hammersley(3, 16).unwrap();
        let z = TestFunction::build_z(&p, None).unwrap();
        let th = lattice_thresholds(&z, 1.0).unwrap();
        assert!(th.windows(2).all(|w| w[0] < w[1]));
        assert!(*th.last().unwrap() <= 1.0);
    }

    #[test]
    fn rejects_bad_thresholds() {
        let p = generate_van_der_corput(8).unwrap();
        let z = TestFunction::build_z(&p, None).unwrap();
        assert!(tail_distribution(&z, &[0.5, 0.2], 100, 0, None).is_err());
        assert!(tail_distribution(&z, &[-1.0], 100, 0, None).is_err());
        assert!(tail_distribution(&z, &[], 100, 0, None).is_err());
    }
}
