//! Point distributions `P_N ⊂ [0,1]^d`.
//!
//! A [`PointSet`] is immutable once built. Coordinates are stored row-major
//! as `f64`; the closed endpoint `1.0` is a legal coordinate. A point with
//! some coordinate equal to 1 lies in no anchored box `[0, x)` and so never
//! contributes to the counting part of the discrepancy function.

mod generators;
pub mod io;
mod net;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use generators::{
    corner_collapse, corner_cube_members, generate_faure_net, generate_hammersley, generate_random,
    generate_van_der_corput, radical_inverse, NetParams,
};
pub use net::{
    check_counting_bound, elementary_box_counts, net_address, rectangle_deviation, verify_net,
    CountingBoundReport, NetVerdict, NetViolation,
};

/// Where a point set came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl Generator {
    pub fn named(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: Vec::new(),
            seed: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    generator: Generator,
}

impl PointSet {
    /// Builds a point set from row-major coordinates, checking that
    /// `dim >= 1`, that there is at least one point and that every
    /// coordinate lies in `[0,1]`.
    pub fn new(dim: usize, coords: Vec<f64>, generator: Generator) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not form a nonempty list of {dim}-dimensional points",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::CoordinateOutOfRange {
                point: i / dim,
                value: coords[i],
            });
        }
        Ok(Self {
            dim,
            coords,
            generator,
        })
    }

    pub fn from_points(points: &[Vec<f64>], generator: Generator) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if let Some(bad) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::new(dim, points.concat(), generator)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `N`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; kept for the `len`/`is_empty` pairing.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }
}
