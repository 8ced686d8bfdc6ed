//! Exact Haar coefficients of the discrepancy function.
//!
//! For `I = [a, b)` with midpoint `m`,
//! `∫_p^1 h_I = tent_I(p)` where `tent_I(p) = p − a` on `[a, m)`,
//! `b − p` on `[m, b)` and 0 elsewhere, and `∫_0^1 x h_I(x) dx = |I|²/4`.
//! Hence
//!
//! ```text
//! ⟨D_N, h_R⟩ = Σ_{p ∈ P} ∏_j tent_{R_j}(p_j) − N ∏_j |R_j|²/4 .
//! ```
//!
//! Each point has a nonzero tent product only in the one rectangle of a
//! shape that contains it, which gives the `O(N·d + 2^{|r|})` bulk form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{side_length, DyadicRectangle, ShapeVector};
use crate::error::{Error, Result};
use crate::sum::Neumaier;
use crate::PointSet;

/// `tent_I(p)` for `I = [pos·2^{-level}, (pos+1)·2^{-level})`.
pub fn tent(level: u32, pos: u64, p: f64) -> f64 {
    let len = side_length(level);
    let a = pos as f64 * len;
    let b = a + len;
    if !(a <= p && p < b) {
        return 0.0;
    }
    if p < a + 0.5 * len {
        p - a
    } else {
        b - p
    }
}

/// Rectangle index of the cell of `shape` containing `p` and the tent
/// product of `p` there. Coordinates on a dyadic boundary go to the right
/// cell; a coordinate equal to 1 goes to the last cell, where its tent is 0.
#[inline]
pub fn locate(levels: &[u32], offsets: &[u32], p: &[f64]) -> (usize, f64) {
    let mut index = 0usize;
    let mut product = 1.0;
    for j in 0..p.len() {
        let r = levels[j];
        let halves = 1u64 << (r + 1);
        let k = ((p[j] * halves as f64) as u64).min(halves - 1);
        let pos = k >> 1;
        let len = side_length(r);
        let a = pos as f64 * len;
        product *= if k & 1 == 0 {
            p[j] - a
        } else {
            (a + len) - p[j]
        };
        index |= (pos as usize) << offsets[j];
    }
    (index, product)
}

fn linear_term(n: usize, shape: &ShapeVector) -> f64 {
    n as f64
        * shape
            .levels()
            .iter()
            .map(|&r| {
                let len = side_length(r);
                len * len / 4.0
            })
            .product::<f64>()
}

fn check_dim(points: &PointSet, dim: usize) -> Result<()> {
    if points.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            got: dim,
        });
    }
    Ok(())
}

/// `⟨D_N, h_R⟩` for a single rectangle.
pub fn haar_coefficient(points: &PointSet, rect: &DyadicRectangle) -> Result<f64> {
    let shape = rect.shape();
    check_dim(points, shape.dim())?;
    let offsets = shape.offsets();
    let target = rect.index();
    let mut acc = Neumaier::new();
    for p in points.points() {
        let (idx, t) = locate(shape.levels(), &offsets, p);
        if idx == target {
            acc.add(t);
        }
    }
    Ok(acc.value() - linear_term(points.len(), shape))
}

/// `⟨D_N, h_R⟩` for every `R` of `shape`, indexed as
/// [`DyadicRectangle::index`]. Bit-identical to [`haar_coefficient`].
pub fn all_coefficients(points: &PointSet, shape: &ShapeVector) -> Result<Vec<f64>> {
    check_dim(points, shape.dim())?;
    shape.check_cap()?;
    let offsets = shape.offsets();
    let located: Vec<(usize, f64)> = points
        .coords()
        .par_chunks_exact(points.dim())
        .map(|p| locate(shape.levels(), &offsets, p))
        .collect();
    let mut acc = vec![Neumaier::new(); shape.cells()];
    for (idx, t) in located {
        acc[idx].add(t);
    }
    let linear = linear_term(points.len(), shape);
    Ok(acc.par_iter().map(|a| a.value() - linear).collect())
}

/// `⟨D_N, h_R⟩` in exact rational arithmetic over the binary values of the
/// stored coordinates. Intended for cross-checks on small sets.
pub fn haar_coefficient_exact(points: &PointSet, rect: &DyadicRectangle) -> Result<BigRational> {
    let shape = rect.shape();
    check_dim(points, shape.dim())?;
    let two = BigRational::from_integer(BigInt::from(2));
    let mut total = BigRational::zero();
    'points: for p in points.points() {
        let mut product = BigRational::one();
        for (j, &v) in p.iter().enumerate() {
            let r = shape.levels()[j];
            let len = BigRational::new(BigInt::one(), BigInt::one() << r);
            let a = BigRational::from_integer(BigInt::from(rect.position()[j])) * &len;
            let b = &a + &len;
            let x = BigRational::from_float(v).expect("coordinates are finite");
            if x < a || x >= b {
                continue 'points;
            }
            let mid = &a + &len / &two;
            product *= if x < mid { x - a } else { b - x };
        }
        total += product;
    }
    let mut linear = BigRational::from_integer(BigInt::from(points.len()));
    for &r in shape.levels() {
        let len = BigRational::new(BigInt::one(), BigInt::one() << r);
        linear *= &len * &len / BigRational::from_integer(BigInt::from(4));
    }
    Ok(total - linear)
}
