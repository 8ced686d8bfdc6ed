//! Luxemburg norms `‖f‖_Φ = inf{λ > 0 : ∫ Φ(|f|/λ) <= 1}` on a sample
//! measure, for the Young functions
//!
//! - `L(log L)^α`: `Φ(t) = t·log(e + t)^α`,
//! - `exp(L)`: `Φ(t) = e^t − 1`.

use std::f64::consts::E;

use super::empirical::EmpiricalMeasure;
use super::norms::NormKind;
use crate::error::{invalid, Result};
use crate::sum::det_mean;

/// Default relative bisection tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrliczSpec {
    LlogL { alpha: f64 },
    ExpL,
}

impl OrliczSpec {
    pub fn llogl(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(invalid(format!("L(log L)^α needs α >= 0, got {alpha}")));
        }
        Ok(OrliczSpec::LlogL { alpha })
    }

    pub fn norm_kind(&self) -> NormKind {
        match *self {
            OrliczSpec::LlogL { alpha } => NormKind::LlogL(alpha),
            OrliczSpec::ExpL => NormKind::ExpL,
        }
    }

    pub fn young(&self, t: f64) -> f64 {
        match *self {
            OrliczSpec::LlogL { alpha: 0.0 } => t,
            OrliczSpec::LlogL { alpha } => t * (E + t).ln().powf(alpha),
            OrliczSpec::ExpL => t.exp_m1(),
        }
    }

    pub fn young_derivative(&self, t: f64) -> f64 {
        match *self {
            OrliczSpec::LlogL { alpha: 0.0 } => 1.0,
            OrliczSpec::LlogL { alpha } => {
                let l = (E + t).ln();
                l.powf(alpha) + alpha * t * l.powf(alpha - 1.0) / (E + t)
            }
            OrliczSpec::ExpL => t.exp(),
        }
    }

    /// `Φ⁻¹(y)` for `y >= 0`.
    pub fn young_inverse(&self, y: f64) -> f64 {
        match *self {
            OrliczSpec::ExpL => y.ln_1p(),
            OrliczSpec::LlogL { alpha: 0.0 } => y,
            OrliczSpec::LlogL { .. } => {
                // Φ(t) >= t, so the root lies in [0, y].
                let (mut lo, mut hi) = (0.0, y.max(0.0));
                for _ in 0..MAX_BISECTIONS {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.young(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }
}

/// Luxemburg norm of the sampled function and a delta-method standard
/// error (from the implicit equation `∫Φ(|f|/λ) = 1`).
///
/// Bisection starts from `[max|f|/Φ⁻¹(n), max|f|]`; the lower end always
/// violates the constraint and the upper end is doubled until it satisfies
/// it. The returned value is the feasible end of the final bracket. A
/// vanishing sample gives 0. For `Φ(t) = t` the norm is the sample mean and
/// no bisection is done.
pub fn luxemburg_norm(
    measure: &EmpiricalMeasure,
    spec: OrliczSpec,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(invalid("bisection tolerance must be positive"));
    }
    if measure.len() < 2 {
        return Err(invalid("Luxemburg norm needs at least two samples"));
    }
    if let OrliczSpec::LlogL { alpha } = spec {
        if alpha == 0.0 {
            return Ok(measure.lp(1.0));
        }
    }
    let vmax = measure.max_abs();
    if vmax == 0.0 {
        return Ok((0.0, 0.0));
    }
    let values = measure.values();
    let n = values.len();
    let modular = |lambda: f64| det_mean(n, |i| spec.young(values[i].abs() / lambda));

    let mut lo = vmax / spec.young_inverse(n as f64);
    while modular(lo) <= 1.0 {
        lo *= 0.5;
    }
    let mut hi = vmax;
    while modular(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let lambda = hi;
    let (_, se_modular) = measure.mean_with_se(|v| spec.young(v.abs() / lambda));
    let slope = det_mean(n, |i| {
        let t = values[i].abs() / lambda;
        spec.young_derivative(t) * t / lambda
    });
    let se = if slope > 0.0 { se_modular / slope } else { 0.0 };
    Ok((lambda, se))
}
