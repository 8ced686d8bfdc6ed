//! Exact L² norm of the discrepancy function.
//!
//! Integrating `D_N(x)^2` over the unit cube term by term gives
//!
//! ```text
//! ‖D_N‖₂² = N²/3^d − (2N/2^d) Σ_p ∏_j (1 − p_j²) + Σ_{p,q} ∏_j (1 − max(p_j, q_j))
//! ```
//!
//! The pair sum dominates the cost. It is evaluated over `i <= j` only, in
//! rows of fixed-width chunks: four plain accumulators inside a chunk, then
//! Neumaier compensation across chunks and rows in index order.

use rayon::prelude::*;

use super::norms::{Method, NormKind, NormReport};
use crate::sum::Neumaier;
use crate::PointSet;

const CHUNK: usize = 256;

/// `‖D_N‖₂²`; may be a tiny negative number from rounding when the true
/// value is near zero.
pub fn l2_squared_exact(points: &PointSet) -> f64 {
    let dim = points.dim();
    let n = points.len() as f64;
    let linear: Neumaier = points
        .points()
        .map(|p| p.iter().map(|&v| 1.0 - v * v).product::<f64>())
        .collect();
    let mut total = Neumaier::new();
    total.add(n * n / 3f64.powi(dim as i32));
    total.add(-2.0 * n / 2f64.powi(dim as i32) * linear.value());
    total.add(pair_min_product_sum(dim, points.coords()));
    total.value()
}

pub fn l2_norm_exact(points: &PointSet) -> NormReport {
    NormReport {
        norm_kind: NormKind::L2,
        value: l2_squared_exact(points).max(0.0).sqrt(),
        method: Method::Exact,
        std_error: 0.0,
        samples: 0,
        seed: 0,
    }
}

/// `∫ #(S ∩ [0,x))² dx = Σ_{p,q ∈ S} ∏_j (1 − max(p_j, q_j))` for a
/// row-major point list `S` (possibly empty).
pub fn counting_l2_squared(dim: usize, coords: &[f64]) -> f64 {
    pair_min_product_sum(dim, coords)
}

/// `∫ #(S ∩ [0,x)) dx = Σ_{p ∈ S} ∏_j (1 − p_j)`.
pub fn counting_l1(dim: usize, coords: &[f64]) -> f64 {
    coords
        .chunks_exact(dim)
        .map(|p| p.iter().map(|&v| 1.0 - v).product::<f64>())
        .collect::<Neumaier>()
        .value()
}

/// `Σ_{i,j} ∏_k min(1 − p_ik, 1 − p_jk)` over all ordered pairs.
fn pair_min_product_sum(dim: usize, coords: &[f64]) -> f64 {
    if dim == 0 || coords.is_empty() {
        return 0.0;
    }
    let n = coords.len() / dim;
    let cols: Vec<Vec<f64>> = (0..dim)
        .map(|k| coords.chunks_exact(dim).map(|p| 1.0 - p[k]).collect())
        .collect();
    let rows: Vec<Neumaier> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Neumaier::new();
            let diag: f64 = cols.iter().map(|c| c[i]).product();
            acc.add(diag);
            let mut off = Neumaier::new();
            let mut start = i + 1;
            while start < n {
                let end = (start + CHUNK).min(n);
                off.add(chunk_sum(&cols, i, start, end));
                start = end;
            }
            acc.add(2.0 * off.value());
            acc
        })
        .collect();
    let mut total = Neumaier::new();
    for r in &rows {
        total.merge(r);
    }
    total.value()
}

#[inline]
fn chunk_sum(cols: &[Vec<f64>], i: usize, start: usize, end: usize) -> f64 {
    let mut lanes = [0.0f64; 4];
    match cols.len() {
        1 => {
            let (a, c0) = (cols[0][i], &cols[0][start..end]);
            for (k, &u) in c0.iter().enumerate() {
                lanes[k & 3] += a.min(u);
            }
        }
        2 => {
            let (a, b) = (cols[0][i], cols[1][i]);
            let (c0, c1) = (&cols[0][start..end], &cols[1][start..end]);
            for (k, (&u, &v)) in c0.iter().zip(c1).enumerate() {
                lanes[k & 3] += a.min(u) * b.min(v);
            }
        }
        3 => {
            let (a, b, c) = (cols[0][i], cols[1][i], cols[2][i]);
            let (c0, c1, c2) = (
                &cols[0][start..end],
                &cols[1][start..end],
                &cols[2][start..end],
            );
            for k in 0..c0.len() {
                lanes[k & 3] += a.min(c0[k]) * b.min(c1[k]) * c.min(c2[k]);
            }
        }
        _ => {
            for (k, j) in (start..end).enumerate() {
                lanes[k & 3] += cols.iter().map(|col| col[i].min(col[j])).product::<f64>();
            }
        }
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{generate_random, Generator};

    #[test]
    fn one_dimensional_closed_forms() {
        let half = PointSet::from_points(&[vec![0.5]], Generator::default()).unwrap();
        assert!((l2_squared_exact(&half) - 1.0 / 12.0).abs() < 1e-15);
        let zero = PointSet::from_points(&[vec![0.0]], Generator::default()).unwrap();
        assert!((l2_squared_exact(&zero) - 1.0 / 3.0).abs() < 1e-15);
        // a dead point: D(x) = -x, ∫ x² = 1/3
        let one = PointSet::from_points(&[vec![1.0]], Generator::default()).unwrap();
        assert!((l2_squared_exact(&one) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matches_naive_double_loop() {
        for dim in 1..=4 {
            let p = generate_random(dim, 700, 40 + dim as u64).unwrap();
            let mut naive = 0.0;
            for a in p.points() {
                for b in p.points() {
                    naive += a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| 1.0 - x.max(*y))
                        .product::<f64>();
                }
            }
            let got = pair_min_product_sum(dim, p.coords());
            assert!(
                (got - naive).abs() < 1e-9 * naive,
                "dim {dim}: {got} vs {naive}"
            );
        }
    }

    #[test]
    fn counting_norms_of_single_point() {
        // #(S ∩ [0,x)) = 1[x > p]; L1 = L2² = ∏ (1 - p_j)
        let c = [0.25, 0.5];
        assert_eq!(counting_l1(2, &c), 0.375);
        assert_eq!(counting_l2_squared(2, &c), 0.375);
        assert_eq!(counting_l1(2, &[]), 0.0);
        assert_eq!(counting_l2_squared(2, &[]), 0.0);
    }
}
