//! The discrepancy function `D_N(x) = #(P ∩ [0,x)) - N·x_1⋯x_d` and its norms.
//!
//! Counting uses the half-open box: a point is counted when `p_j < x_j` for
//! every coordinate, so ties never count.

mod counter;
mod empirical;
mod norms;
mod orlicz;
mod warnock;

pub use counter::DominanceCounter;
pub use empirical::{EmpiricalMeasure, InterpolationCheck, INEQUALITY_SLACK};
pub use norms::{
    check_interpolation, lp_norm_mc, orlicz_norm_mc, DiscrepancySample, Method, NormKind,
    NormReport, Sampling,
};
pub use orlicz::{luxemburg_norm, OrliczSpec, DEFAULT_TOLERANCE};
pub use warnock::{counting_l1, counting_l2_squared, l2_norm_exact, l2_squared_exact};

use crate::error::{invalid, Error, Result};
use crate::PointSet;

/// `D_N(x)` evaluated directly from the definition.
pub fn eval_discrepancy(points: &PointSet, x: &[f64]) -> Result<f64> {
    if x.len() != points.dim() {
        return Err(Error::DimensionMismatch {
            expected: points.dim(),
            got: x.len(),
        });
    }
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(invalid("evaluation point must lie in [0,1]^d"));
    }
    let count = points
        .points()
        .filter(|p| p.iter().zip(x).all(|(a, b)| a < b))
        .count();
    Ok(count as f64 - points.len() as f64 * x.iter().product::<f64>())
}

/// `D_N` at every row of `queries` (row-major, `dim` columns).
pub fn discrepancy_at(points: &PointSet, counter: &DominanceCounter, queries: &[f64]) -> Vec<f64> {
    let n = points.len() as f64;
    let dim = points.dim();
    counter
        .count_batch(queries)
        .into_iter()
        .zip(queries.chunks_exact(dim))
        .map(|(c, x)| c as f64 - n * x.iter().product::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{generate_random, Generator};

    #[test]
    fn hand_evaluations() {
        let p = PointSet::from_points(&[vec![0.5, 0.5]], Generator::default()).unwrap();
        assert_eq!(eval_discrepancy(&p, &[0.75, 0.75]).unwrap(), 0.4375);
        assert_eq!(eval_discrepancy(&p, &[0.0, 0.0]).unwrap(), 0.0);
        // ties do not count
        assert_eq!(eval_discrepancy(&p, &[0.5, 1.0]).unwrap(), -0.5);

        let corner = PointSet::from_points(&[vec![1.0, 1.0, 1.0]], Generator::default()).unwrap();
        assert_eq!(eval_discrepancy(&corner, &[1.0, 1.0, 1.0]).unwrap(), -1.0);
        assert_eq!(eval_discrepancy(&corner, &[0.5, 0.5, 0.5]).unwrap(), -0.125);
    }

    #[test]
    fn errors() {
        let p = generate_random(2, 5, 0).unwrap();
        assert!(matches!(
            eval_discrepancy(&p, &[0.5]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(eval_discrepancy(&p, &[0.5, 1.5]).is_err());
    }

    #[test]
    fn counts_add_over_disjoint_unions() {
        let a = generate_random(3, 40, 1).unwrap();
        let b = generate_random(3, 25, 2).unwrap();
        let mut coords = a.coords().to_vec();
        coords.extend_from_slice(b.coords());
        let ab = PointSet::new(3, coords, Generator::default()).unwrap();
        let xs = crate::mc::uniform_points(3, 200, 9);
        for x in xs.chunks_exact(3) {
            let vol: f64 = x.iter().product();
            let count = |p: &PointSet, n: f64| eval_discrepancy(p, x).unwrap() + n * vol;
            let lhs = count(&ab, 65.0);
            let rhs = count(&a, 40.0) + count(&b, 25.0);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
