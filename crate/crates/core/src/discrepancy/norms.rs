use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::counter::DominanceCounter;
use super::discrepancy_at;
use super::empirical::{EmpiricalMeasure, InterpolationCheck};
use super::orlicz::{luxemburg_norm, OrliczSpec};
use crate::error::{invalid, Result};
use crate::mc::{stratified_points, uniform_points};
use crate::PointSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind {
    L1,
    L2,
    Lp(f64),
    LlogL(f64),
    ExpL,
}

impl NormKind {
    pub fn lp(p: f64) -> Self {
        if p == 1.0 {
            NormKind::L1
        } else if p == 2.0 {
            NormKind::L2
        } else {
            NormKind::Lp(p)
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L1 => f.write_str("L1"),
            NormKind::L2 => f.write_str("L2"),
            NormKind::Lp(p) => write!(f, "Lp({p})"),
            NormKind::LlogL(a) => write!(f, "LlogL({a})"),
            NormKind::ExpL => f.write_str("expL"),
        }
    }
}

impl FromStr for NormKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let arg = |prefix: &str| -> Option<f64> {
            s.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
        };
        match s {
            "L1" => Ok(NormKind::L1),
            "L2" => Ok(NormKind::L2),
            "expL" => Ok(NormKind::ExpL),
            _ => arg("Lp(")
                .map(NormKind::Lp)
                .or_else(|| arg("LlogL(").map(NormKind::LlogL))
                .ok_or_else(|| format!("unknown norm kind {s:?}")),
        }
    }
}

impl Serialize for NormKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
    BisectionMc,
}

/// A computed norm with its provenance. `std_error` is 0 for exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm_kind: NormKind,
    pub value: f64,
    pub method: Method,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Uniform {
        samples: usize,
    },
    /// `per_cell` jittered samples in every cell of a dyadic grid with
    /// `2^level` cells.
    Stratified {
        level: u32,
        per_cell: usize,
    },
}

/// Values of `D_N` on one seeded sample set. All norms computed from the
/// same `DiscrepancySample` refer to the same empirical measure.
#[derive(Clone, Debug)]
pub struct DiscrepancySample {
    values: Vec<f64>,
    strata: usize,
    seed: u64,
}

impl DiscrepancySample {
    pub fn draw(points: &PointSet, samples: usize, seed: u64) -> Result<Self> {
        Self::draw_with(points, Sampling::Uniform { samples }, seed)
    }

    pub fn draw_with(points: &PointSet, sampling: Sampling, seed: u64) -> Result<Self> {
        let dim = points.dim();
        let (queries, strata) = match sampling {
            Sampling::Uniform { samples } => {
                if samples < 2 {
                    return Err(invalid("Monte-Carlo norms need at least two samples"));
                }
                (uniform_points(dim, samples, seed), 1)
            }
            Sampling::Stratified { level, per_cell } => {
                if per_cell < 2 || level > 30 {
                    return Err(invalid(
                        "stratified sampling needs per_cell >= 2 and level <= 30",
                    ));
                }
                (
                    stratified_points(dim, level, per_cell, seed),
                    1usize << level,
                )
            }
        };
        let counter = DominanceCounter::new(points);
        Ok(Self {
            values: discrepancy_at(points, &counter, &queries),
            strata,
            seed,
        })
    }

    /// Signed values `D_N(U_i)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn measure(&self) -> EmpiricalMeasure<'_> {
        if self.strata == 1 {
            EmpiricalMeasure::new(&self.values)
        } else {
            EmpiricalMeasure::stratified(&self.values, self.strata)
                .expect("strata validated at draw time")
        }
    }

    pub fn lp_norm(&self, p: f64) -> Result<NormReport> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(invalid(format!("L^p norm needs finite p >= 1, got {p}")));
        }
        let (value, std_error) = self.measure().lp(p);
        Ok(NormReport {
            norm_kind: NormKind::lp(p),
            value,
            method: Method::MonteCarlo,
            std_error,
            samples: self.len() as u64,
            seed: self.seed,
        })
    }

    pub fn orlicz_norm(&self, spec: OrliczSpec, tol: f64) -> Result<NormReport> {
        let (value, std_error) = luxemburg_norm(&self.measure(), spec, tol)?;
        Ok(NormReport {
            norm_kind: spec.norm_kind(),
            value,
            method: Method::BisectionMc,
            std_error,
            samples: self.len() as u64,
            seed: self.seed,
        })
    }

    pub fn interpolation(&self, p: f64) -> Result<InterpolationCheck> {
        self.measure().interpolation(p)
    }
}

pub fn lp_norm_mc(points: &PointSet, p: f64, samples: usize, seed: u64) -> Result<NormReport> {
    DiscrepancySample::draw(points, samples, seed)?.lp_norm(p)
}

pub fn orlicz_norm_mc(
    points: &PointSet,
    spec: OrliczSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<NormReport> {
    DiscrepancySample::draw(points, samples, seed)?.orlicz_norm(spec, tol)
}

/// Checks `‖D_N‖_{2p/(p+1)} <= ‖D_N‖₁^{1/2} ‖D_N‖_p^{1/2}` on one sample set.
pub fn check_interpolation(
    points: &PointSet,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<InterpolationCheck> {
    DiscrepancySample::draw(points, samples, seed)?.interpolation(p)
}
