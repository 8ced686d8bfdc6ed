//! Norms of a function known through its values on a fixed sample set.
//!
//! Every quantity is a functional of the empirical (possibly stratified)
//! measure, so inequalities such as Hölder's hold on it exactly; the only
//! slack allowed in checks is [`INEQUALITY_SLACK`] for floating rounding.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::sum::{det_mean, det_mean_var, det_sum, Neumaier};

/// Relative rounding allowance for inequalities that hold exactly on the
/// empirical measure.
pub const INEQUALITY_SLACK: f64 = 1e-12;

/// Sample values of a function with equal-weight strata of equal size
/// (one stratum for plain Monte Carlo).
#[derive(Clone, Copy, Debug)]
pub struct EmpiricalMeasure<'a> {
    values: &'a [f64],
    strata: usize,
}

impl<'a> EmpiricalMeasure<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self { values, strata: 1 }
    }

    pub fn stratified(values: &'a [f64], strata: usize) -> Result<Self> {
        if strata == 0 || !values.len().is_multiple_of(strata) || values.len() / strata < 2 {
            return Err(invalid(
                "stratified samples need >= 2 values in each of equally sized strata",
            ));
        }
        Ok(Self { values, strata })
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn strata(&self) -> usize {
        self.strata
    }

    /// Estimate of `∫ f(v)` and its standard error.
    pub fn mean_with_se<F>(&self, f: F) -> (f64, f64)
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let n = self.values.len();
        let v = self.values;
        if self.strata == 1 {
            let (mean, var) = det_mean_var(n, |i| f(v[i]));
            return (mean, (var / n as f64).sqrt());
        }
        let h = self.strata;
        let per = n / h;
        let means: Vec<f64> = (0..h)
            .into_par_iter()
            .map(|s| {
                let acc: Neumaier = v[s * per..(s + 1) * per].iter().map(|&x| f(x)).collect();
                acc.value() / per as f64
            })
            .collect();
        let mean = det_mean(h, |s| means[s]);
        let ss = det_sum(n, |i| {
            let d = f(v[i]) - means[i / per];
            d * d
        });
        let var = ss / ((per - 1) as f64 * per as f64 * (h * h) as f64);
        (mean, var.sqrt())
    }

    /// `(∫|f|^p)^{1/p}` with a delta-method standard error.
    pub fn lp(&self, p: f64) -> (f64, f64) {
        let (m, se_m) = if p == 1.0 {
            self.mean_with_se(f64::abs)
        } else if p == 2.0 {
            self.mean_with_se(|x| x * x)
        } else {
            self.mean_with_se(|x| x.abs().powf(p))
        };
        if p == 1.0 {
            return (m, se_m);
        }
        if m <= 0.0 {
            return (0.0, 0.0);
        }
        let value = m.powf(1.0 / p);
        (value, value / (p * m) * se_m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    /// Hölder interpolation `‖f‖_r <= ‖f‖₁^{1/2} ‖f‖_p^{1/2}`, `r = 2p/(p+1)`.
    pub fn interpolation(&self, p: f64) -> Result<InterpolationCheck> {
        if !(p > 1.0) {
            return Err(invalid(format!("interpolation needs p > 1, got {p}")));
        }
        let r = 2.0 * p / (p + 1.0);
        let l1 = self.lp(1.0).0;
        let lp = self.lp(p).0;
        let lr = self.lp(r).0;
        let rhs = (l1 * lp).sqrt();
        Ok(InterpolationCheck {
            p,
            r,
            l1,
            lp,
            lr,
            rhs,
            holds: lr <= rhs * (1.0 + INEQUALITY_SLACK),
        })
    }

    /// `‖f‖₁ <= ‖f‖₂` (Cauchy–Schwarz on the sample measure).
    pub fn l1_le_l2(&self) -> bool {
        self.lp(1.0).0 <= self.lp(2.0).0 * (1.0 + INEQUALITY_SLACK)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub p: f64,
    pub r: f64,
    pub l1: f64,
    pub lp: f64,
    pub lr: f64,
    pub rhs: f64,
    pub holds: bool,
}
