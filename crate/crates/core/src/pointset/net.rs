//! Verification of `p`-adic nets.
//!
//! A set of `N = p^s` points is a `p`-adic net when every box
//! `∏_j [m_j p^{-a_j}, (m_j + 1) p^{-a_j})` with `a_1 + … + a_d = s` and
//! `0 <= m_j < p^{a_j}` contains exactly one point. (The bound on `m_j` is
//! `p^{a_j}`: those are exactly the boxes of volume `1/N`.)

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::PointSet;
use crate::combinatorics::compositions;
use crate::error::{invalid, Result};
use crate::mc::stream_rng;

/// Index of `x` on the grid of mesh `1/scale`, i.e. `floor(x * scale)`.
///
/// Products landing within a few ulps of an integer are snapped to it, so
/// `m / scale` stored as a rounded `f64` maps back to `m`. A coordinate of
/// exactly 1 maps to `scale`, outside every box.
pub fn net_address(x: f64, scale: u64) -> u64 {
    let v = x * scale as f64;
    let r = v.round();
    if (v - r).abs() <= 4.0 * f64::EPSILON * v.max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

/// Number of points in each elementary box of per-axis exponents `a`
/// (`∑ a_j <= s`), indexed in mixed radix with the first axis varying
/// fastest. Points outside `[0,1)^d` are not counted.
pub fn elementary_box_counts(points: &PointSet, base: u64, s: u32, a: &[u32]) -> Result<Vec<u32>> {
    if a.len() != points.dim() {
        return Err(invalid("exponent vector length differs from the dimension"));
    }
    let total: u32 = a.iter().sum();
    if total > s {
        return Err(invalid("box exponents exceed s"));
    }
    let scale = base.pow(s);
    let boxes = base.pow(total) as usize;
    let divisors: Vec<u64> = a.iter().map(|&aj| base.pow(s - aj)).collect();
    let radices: Vec<u64> = a.iter().map(|&aj| base.pow(aj)).collect();
    let mut counts = vec![0u32; boxes];
    'points: for p in points.points() {
        let mut index = 0u64;
        let mut stride = 1u64;
        for j in 0..p.len() {
            let addr = net_address(p[j], scale);
            if addr >= scale {
                continue 'points;
            }
            index += (addr / divisors[j]) * stride;
            stride *= radices[j];
        }
        counts[index as usize] += 1;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetViolation {
    /// Per-axis exponents `a_j` of the offending box.
    pub exponents: Vec<u32>,
    /// Per-axis positions `m_j`.
    pub position: Vec<u64>,
    /// Points found in the box (the definition requires exactly one).
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetVerdict {
    pub is_net: bool,
    pub boxes_checked: u64,
    pub violation: Option<NetViolation>,
}

/// Checks every elementary box of volume `p^{-s}`. Compositions of `s` are
/// scanned in lexicographic order and boxes in mixed-radix order; the first
/// violating box is reported.
pub fn verify_net(points: &PointSet, base: u64, s: u32) -> Result<NetVerdict> {
    let n = base
        .checked_pow(s)
        .ok_or_else(|| invalid("p^s overflows"))?;
    if points.len() as u64 != n {
        return Err(invalid(format!(
            "net verification needs N = p^s = {n}, got {}",
            points.len()
        )));
    }
    let comps = compositions(s, points.dim());
    let results: Vec<Result<Option<NetViolation>>> = comps
        .par_iter()
        .map(|a| {
            let counts = elementary_box_counts(points, base, s, a)?;
            Ok(counts.iter().position(|&c| c != 1).map(|idx| {
                let mut rest = idx as u64;
                let position = a
                    .iter()
                    .map(|&aj| {
                        let k = base.pow(aj);
                        let m = rest % k;
                        rest /= k;
                        m
                    })
                    .collect();
                NetViolation {
                    exponents: a.clone(),
                    position,
                    count: counts[idx],
                }
            }))
        })
        .collect();
    let mut violation = None;
    for r in results {
        if let Some(v) = r? {
            violation = Some(v);
            break;
        }
    }
    Ok(NetVerdict {
        is_net: violation.is_none(),
        boxes_checked: comps.len() as u64 * n,
        violation,
    })
}

/// `#(P ∩ [lo, hi)) - N·|[lo, hi)|` for an axis-parallel box.
pub fn rectangle_deviation(points: &PointSet, lo: &[f64], hi: &[f64]) -> f64 {
    let count = points
        .points()
        .filter(|p| {
            p.iter()
                .zip(lo.iter().zip(hi))
                .all(|(&v, (&a, &b))| a <= v && v < b)
        })
        .count();
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product();
    count as f64 - points.len() as f64 * volume
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingBoundReport {
    pub trials: usize,
    pub max_deviation: f64,
    /// The bound `s^{d-1}` for nets of `p^s` points.
    pub bound: f64,
    pub worst_lo: Vec<f64>,
    pub worst_hi: Vec<f64>,
}

impl CountingBoundReport {
    pub fn holds(&self) -> bool {
        self.max_deviation <= self.bound
    }
}

/// Largest `|#(P ∩ R) - N|R||` over `trials` seeded random boxes
/// `R = ∏ [u_j, v_j)` (endpoints drawn uniformly and sorted per axis).
pub fn check_counting_bound(
    points: &PointSet,
    s: u32,
    trials: usize,
    seed: u64,
) -> CountingBoundReport {
    let dim = points.dim();
    let mut rng = stream_rng(seed, 0);
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = (0..trials)
        .map(|_| {
            let mut lo = Vec::with_capacity(dim);
            let mut hi = Vec::with_capacity(dim);
            for _ in 0..dim {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                lo.push(u.min(v));
                hi.push(u.max(v));
            }
            (lo, hi)
        })
        .collect();
    let deviations: Vec<f64> = boxes
        .par_iter()
        .map(|(lo, hi)| rectangle_deviation(points, lo, hi).abs())
        .collect();
    let (worst, max_deviation) =
        deviations
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, 0.0f64),
                |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) },
            );
    let (worst_lo, worst_hi) = boxes.get(worst).cloned().unwrap_or_default();
    CountingBoundReport {
        trials,
        max_deviation,
        bound: (s as f64).powi(dim as i32 - 1),
        worst_lo,
        worst_hi,
    }
}
