//! Dyadic machinery of Roth's orthogonal function method.
//!
//! Haar functions use the L^∞ normalization `h_I = −1_{I−} + 1_{I+}`; a
//! rectangle's Haar function is the tensor product over coordinates.
//! Rectangles of one [`ShapeVector`] `r` partition the unit cube; they are
//! indexed in mixed radix by concatenating the bits of the per-axis
//! positions, the first axis in the lowest bits.

mod coefficients;
mod rfunction;

use serde::Serialize;

use crate::combinatorics::compositions;
use crate::error::{invalid, Error, Result};

pub use coefficients::{all_coefficients, haar_coefficient, haar_coefficient_exact, locate, tent};
pub use rfunction::{
    build_r_function_greedy, eval_r_function, haar_1d_inner, inner_product_exact, RFunction,
};

/// Largest shape order `|r|` for which dense per-rectangle arrays are built.
pub const ORDER_CAP: u32 = 26;

/// `n = ⌈1 + log₂ N⌉`, the total dyadic level paired with `N` points.
pub fn log_level(n_points: usize) -> u32 {
    let ceil_log2 = if n_points <= 1 {
        0
    } else {
        usize::BITS - (n_points - 1).leading_zeros()
    };
    1 + ceil_log2
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShapeVector(Vec<u32>);

impl ShapeVector {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("shape vector needs at least one coordinate"));
        }
        if levels.iter().any(|&l| l > 52) {
            return Err(invalid("per-axis level above 52 is not representable"));
        }
        Ok(Self(levels))
    }

    /// Every shape of total order `order` in `dim` coordinates.
    pub fn all_of_order(order: u32, dim: usize) -> Vec<ShapeVector> {
        compositions(order, dim)
            .into_iter()
            .map(ShapeVector)
            .collect()
    }

    pub fn levels(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|r| = Σ r_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Number of rectangles of this shape, `2^{|r|}`.
    pub fn cells(&self) -> usize {
        1usize << self.order()
    }

    pub(crate) fn check_cap(&self) -> Result<()> {
        if self.order() > ORDER_CAP {
            return Err(Error::CapExceeded {
                order: self.order(),
                cap: ORDER_CAP,
            });
        }
        Ok(())
    }

    /// Bit offset of each axis in the mixed-radix rectangle index.
    pub(crate) fn offsets(&self) -> Vec<u32> {
        self.0
            .iter()
            .scan(0, |acc, &r| {
                let off = *acc;
                *acc += r;
                Some(off)
            })
            .collect()
    }
}

impl std::fmt::Display for ShapeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `R = ∏_j [pos_j 2^{-r_j}, (pos_j + 1) 2^{-r_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRectangle {
    shape: ShapeVector,
    pos: Vec<u64>,
}

impl DyadicRectangle {
    pub fn new(shape: ShapeVector, pos: Vec<u64>) -> Result<Self> {
        if pos.len() != shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: shape.dim(),
                got: pos.len(),
            });
        }
        if pos.iter().zip(shape.levels()).any(|(&p, &r)| p >> r != 0) {
            return Err(invalid("rectangle position outside its shape"));
        }
        Ok(Self { shape, pos })
    }

    pub fn from_index(shape: &ShapeVector, index: usize) -> Self {
        let pos = shape
            .levels()
            .iter()
            .zip(shape.offsets())
            .map(|(&r, off)| ((index >> off) & ((1usize << r) - 1)) as u64)
            .collect();
        Self {
            shape: shape.clone(),
            pos,
        }
    }

    pub fn shape(&self) -> &ShapeVector {
        &self.shape
    }

    pub fn position(&self) -> &[u64] {
        &self.pos
    }

    pub fn index(&self) -> usize {
        self.pos
            .iter()
            .zip(self.shape.offsets())
            .map(|(&p, off)| (p as usize) << off)
            .sum()
    }

    /// `[a, b)` along axis `j`.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        let len = side_length(self.shape.0[j]);
        let a = self.pos[j] as f64 * len;
        (a, a + len)
    }

    pub fn volume(&self) -> f64 {
        side_length(self.shape.order())
    }

    /// Value of the Haar function `h_R` at `x`.
    pub fn haar(&self, x: &[f64]) -> f64 {
        let mut h = 1.0;
        for (j, &xj) in x.iter().enumerate() {
            let (a, b) = self.interval(j);
            if !(a <= xj && xj < b) {
                return 0.0;
            }
            if xj < 0.5 * (a + b) {
                h = -h;
            }
        }
        h
    }
}

/// `2^{-level}`.
pub(crate) fn side_length(level: u32) -> f64 {
    f64::powi(2.0, -(level as i32))
}
