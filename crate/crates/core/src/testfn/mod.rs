//! Composite test functions built from greedy r-functions.
//!
//! - `Z = n^{-(d-1)/2} Σ_{|r| = n} f_r`
//! - dichotomy `Y = Z / q` with `q = n^ε`
//! - sine `Y = n^{-1/2} Σ_{j=1}^{⌊n/2⌋} sin(c n^{-1/2} Σ_{|r| = n, r_1 = j} f_r)`
//!
//! All component r-functions carry greedy signs `ε_R = sign⟨D_N, h_R⟩`.

mod tail;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::discrepancy::{discrepancy_at, DominanceCounter, Method};
use crate::error::{invalid, Error, Result};
use crate::haar::{inner_product_exact, log_level, RFunction, ShapeVector, ORDER_CAP};
use crate::mc::uniform_points;
use crate::sum::{det_mean_var, Neumaier};
use crate::PointSet;

pub use tail::{
    lattice_thresholds, tail_distribution, tail_range_limit, TailFit, TailReport, MIN_EXCEEDANCES,
};

/// Upper bound on the total number of sign bits held by one test function.
pub const SIGN_BIT_BUDGET: u128 = 1 << 33;

/// Default constant in the sine construction.
pub const DEFAULT_SINE_C: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestKind {
    Z,
    YDichotomy { epsilon: f64, q: f64 },
    YSine { c: f64 },
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestKind::Z => write!(f, "Z"),
            TestKind::YDichotomy { .. } => write!(f, "Y_dichotomy"),
            TestKind::YSine { .. } => write!(f, "Y_sine"),
        }
    }
}

/// Group of component r-functions sharing one key. `Z` and the dichotomy
/// `Y` have a single group with key 0; the sine `Y` has one group per
/// value `j` of the first level.
#[derive(Clone, Debug)]
pub struct Group {
    pub key: u32,
    pub members: Vec<RFunction>,
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    kind: TestKind,
    dim: usize,
    n: u32,
    groups: Vec<Group>,
}

/// How [`TestFunction::inner_product`] evaluates `⟨D_N, T⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerProductReport {
    pub function: String,
    pub value: f64,
    pub method: Method,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

fn greedy_components(points: &PointSet, shapes: &[ShapeVector]) -> Result<Vec<RFunction>> {
    shapes
        .par_iter()
        .map(|s| RFunction::greedy(points, s))
        .collect()
}

fn resolve_order(points: &PointSet, n_override: Option<u32>) -> Result<u32> {
    let n = n_override.unwrap_or_else(|| log_level(points.len()));
    if n == 0 {
        return Err(invalid("test functions need n >= 1"));
    }
    if n > ORDER_CAP {
        return Err(Error::CapExceeded {
            order: n,
            cap: ORDER_CAP,
        });
    }
    let bits = u128::from(binomial(
        u64::from(n) + points.dim() as u64 - 1,
        points.dim() as u64 - 1,
    )) << n;
    if bits > SIGN_BIT_BUDGET {
        return Err(invalid(format!(
            "{bits} sign bits for n = {n} in dimension {} exceed the budget",
            points.dim()
        )));
    }
    Ok(n)
}

impl TestFunction {
    /// `Z` with `n` defaulting to `⌈1 + log₂ N⌉`.
    pub fn build_z(points: &PointSet, n_override: Option<u32>) -> Result<Self> {
        let n = resolve_order(points, n_override)?;
        let shapes = ShapeVector::all_of_order(n, points.dim());
        Ok(Self {
            kind: TestKind::Z,
            dim: points.dim(),
            n,
            groups: vec![Group {
                key: 0,
                members: greedy_components(points, &shapes)?,
            }],
        })
    }

    /// `Z / n^ε` for `ε ∈ (0, 1/2]`.
    pub fn build_y_dichotomy(
        points: &PointSet,
        epsilon: f64,
        n_override: Option<u32>,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1/2], got {epsilon}"
            )));
        }
        Self::build_z(points, n_override)?.to_dichotomy(epsilon)
    }

    /// The sine construction for `0 < c < 1`. It is defined for `d = 3`;
    /// `allow_any_dim` admits the formal analogue in other dimensions `d >= 2`.
    pub fn build_y_sine(
        points: &PointSet,
        c: f64,
        n_override: Option<u32>,
        allow_any_dim: bool,
    ) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(invalid(format!(
                "sine constant must lie in (0, 1), got {c}"
            )));
        }
        let d = points.dim();
        if d != 3 && !(allow_any_dim && d >= 2) {
            return Err(invalid(format!(
                "the sine test function is three-dimensional (got d = {d})"
            )));
        }
        let n = resolve_order(points, n_override)?;
        let shapes = ShapeVector::all_of_order(n, d);
        let mut components = greedy_components(points, &shapes)?.into_iter();
        // shapes are lexicographic, so equal first levels are contiguous
        let mut groups: Vec<Group> = Vec::new();
        for shape in &shapes {
            let f = components.next().expect("one component per shape");
            let j = shape.levels()[0];
            if j == 0 || j > n / 2 {
                continue;
            }
            match groups.last_mut() {
                Some(g) if g.key == j => g.members.push(f),
                _ => groups.push(Group {
                    key: j,
                    members: vec![f],
                }),
            }
        }
        Ok(Self {
            kind: TestKind::YSine { c },
            dim: d,
            n,
            groups,
        })
    }

    /// The dichotomy `Y = Z/n^ε` sharing the components of this `Z`.
    pub fn to_dichotomy(&self, epsilon: f64) -> Result<Self> {
        if self.kind != TestKind::Z {
            return Err(invalid("the dichotomy function is built from Z"));
        }
        if !(epsilon > 0.0 && epsilon <= 0.5) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1/2], got {epsilon}"
            )));
        }
        let mut y = self.clone();
        y.kind = TestKind::YDichotomy {
            epsilon,
            q: f64::from(self.n).powf(epsilon),
        };
        Ok(y)
    }

    /// The same sine construction with another constant `c`.
    pub fn with_sine_c(&self, c: f64) -> Result<Self> {
        if !matches!(self.kind, TestKind::YSine { .. }) {
            return Err(invalid("not a sine test function"));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(invalid(format!(
                "sine constant must lie in (0, 1), got {c}"
            )));
        }
        let mut y = self.clone();
        y.kind = TestKind::YSine { c };
        Ok(y)
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total dyadic level `n` of the components.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn components(&self) -> impl Iterator<Item = &RFunction> {
        self.groups.iter().flat_map(|g| g.members.iter())
    }

    /// Number of component r-functions.
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `n^{-(d-1)/2}`, the normalisation of `Z`.
    pub fn z_scale(&self) -> f64 {
        f64::from(self.n).powf(-0.5 * (self.dim as f64 - 1.0))
    }

    /// The weight of each component in the linear constructions.
    fn linear_weight(&self) -> Option<f64> {
        match self.kind {
            TestKind::Z => Some(self.z_scale()),
            TestKind::YDichotomy { q, .. } => Some(self.z_scale() / q),
            TestKind::YSine { .. } => None,
        }
    }

    /// Spacing of the values taken by `Z` or the dichotomy `Y`: the
    /// component sum is an integer of the parity of the component count.
    pub fn lattice_step(&self) -> Option<(f64, bool)> {
        let unit = match self.kind {
            TestKind::Z => self.z_scale(),
            TestKind::YDichotomy { q, .. } => self.z_scale() / q,
            TestKind::YSine { .. } => return None,
        };
        Some((unit, self.len() % 2 == 1))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self.kind {
            TestKind::Z | TestKind::YDichotomy { .. } => {
                let sum: i64 = self.components().map(|f| f.eval(x) as i64).sum();
                let z = sum as f64 * self.z_scale();
                match self.kind {
                    TestKind::YDichotomy { q, .. } => z / q,
                    _ => z,
                }
            }
            TestKind::YSine { c } => {
                let root = f64::from(self.n).sqrt();
                let mut total = 0.0;
                for g in &self.groups {
                    let sum: i64 = g.members.iter().map(|f| f.eval(x) as i64).sum();
                    total += (c * sum as f64 / root).sin();
                }
                total / root
            }
        }
    }

    /// Values of `T` at `samples` uniform points drawn with `seed`; the
    /// points coincide with those used by the discrepancy sampler for the
    /// same seed.
    pub fn sample(&self, samples: usize, seed: u64) -> Vec<f64> {
        let xs = uniform_points(self.dim, samples, seed);
        xs.par_chunks_exact(self.dim)
            .map(|x| self.eval(x))
            .collect()
    }

    /// `⟨D_N, T⟩`, exactly from Haar coefficients for the linear
    /// constructions or by Monte Carlo with a standard error.
    pub fn inner_product(&self, points: &PointSet, mode: InnerMode) -> Result<InnerProductReport> {
        if points.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: points.dim(),
            });
        }
        match mode {
            InnerMode::Exact => {
                let w = self.linear_weight().ok_or(Error::ExactUnsupported(
                    "the sine test function (nonlinear in its components)",
                ))?;
                let terms: Vec<(f64, &RFunction)> = self.components().map(|f| (w, f)).collect();
                Ok(InnerProductReport {
                    function: self.kind.to_string(),
                    value: inner_product_exact(points, &terms)?,
                    method: Method::Exact,
                    std_error: 0.0,
                    samples: 0,
                    seed: 0,
                })
            }
            InnerMode::MonteCarlo { samples, seed } => {
                if samples < 2 {
                    return Err(invalid(
                        "Monte-Carlo inner products need at least two samples",
                    ));
                }
                let xs = uniform_points(self.dim, samples, seed);
                let counter = DominanceCounter::new(points);
                let d = discrepancy_at(points, &counter, &xs);
                let t: Vec<f64> = xs
                    .par_chunks_exact(self.dim)
                    .map(|x| self.eval(x))
                    .collect();
                let (mean, var) = det_mean_var(samples, |i| d[i] * t[i]);
                Ok(InnerProductReport {
                    function: self.kind.to_string(),
                    value: mean,
                    method: Method::MonteCarlo,
                    std_error: (var / samples as f64).sqrt(),
                    samples: samples as u64,
                    seed,
                })
            }
        }
    }

    /// `‖T‖₂²` from the exact pairwise inner products of the components
    /// (linear constructions only).
    pub fn l2_norm_squared_exact(&self) -> Result<f64> {
        let w = self.linear_weight().ok_or(Error::ExactUnsupported(
            "the sine test function (nonlinear in its components)",
        ))?;
        let fs: Vec<&RFunction> = self.components().collect();
        let rows: Vec<Neumaier> = fs
            .par_iter()
            .map(|f| {
                fs.iter()
                    .map(|g| f.inner(g))
                    .collect::<Result<Vec<f64>>>()
                    .map(|v| v.into_iter().collect())
            })
            .collect::<Result<_>>()?;
        let mut total = Neumaier::new();
        for r in &rows {
            total.merge(r);
        }
        Ok(w * w * total.value())
    }
}

/// `C(n+d-1, d-1) / n^{d-1}`, the squared L² norm of `Z`.
pub fn z_norm_squared_identity(n: u32, dim: usize) -> f64 {
    binomial(u64::from(n) + dim as u64 - 1, dim as u64 - 1) as f64
        / f64::from(n).powi(dim as i32 - 1)
}
