//! r-functions: `f_r = Σ_{R ∈ D_r} ε_R h_R` with `ε_R ∈ {−1, +1}`.

use std::io::{Read, Write};

use super::coefficients::all_coefficients;
use super::{side_length, ShapeVector, ORDER_CAP};
use crate::error::{invalid, Error, Result};
use crate::sum::Neumaier;
use crate::PointSet;

const MAGIC: &[u8; 4] = b"RFN1";

/// A shape together with one sign per rectangle, bit-packed (bit set
/// means `+1`) in rectangle-index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RFunction {
    shape: ShapeVector,
    bits: Vec<u64>,
}

impl RFunction {
    /// All signs `+1`.
    pub fn positive(shape: ShapeVector) -> Result<Self> {
        shape.check_cap()?;
        let cells = shape.cells();
        let mut bits = vec![u64::MAX; cells.div_ceil(64)];
        if !cells.is_multiple_of(64) {
            *bits.last_mut().unwrap() = (1u64 << (cells % 64)) - 1;
        }
        Ok(Self { shape, bits })
    }

    pub fn from_signs(shape: ShapeVector, signs: &[i8]) -> Result<Self> {
        shape.check_cap()?;
        if signs.len() != shape.cells() {
            return Err(invalid(format!(
                "shape {shape} needs {} signs, got {}",
                shape.cells(),
                signs.len()
            )));
        }
        let mut bits = vec![0u64; signs.len().div_ceil(64)];
        for (i, &s) in signs.iter().enumerate() {
            match s {
                1 => bits[i / 64] |= 1 << (i % 64),
                -1 => {}
                _ => return Err(invalid("signs must be ±1")),
            }
        }
        Ok(Self { shape, bits })
    }

    /// Signs `ε_R = sign⟨D_N, h_R⟩` (ties to `+1`), which maximise
    /// `⟨D_N, f_r⟩ = Σ_R ε_R ⟨D_N, h_R⟩` over all r-functions of the shape.
    pub fn greedy(points: &PointSet, shape: &ShapeVector) -> Result<Self> {
        let coefficients = all_coefficients(points, shape)?;
        Ok(Self::greedy_from_coefficients(shape.clone(), &coefficients))
    }

    pub fn greedy_from_coefficients(shape: ShapeVector, coefficients: &[f64]) -> Self {
        let mut bits = vec![0u64; coefficients.len().div_ceil(64)];
        for (i, &c) in coefficients.iter().enumerate() {
            if c >= 0.0 {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        Self { shape, bits }
    }

    pub fn shape(&self) -> &ShapeVector {
        &self.shape
    }

    pub fn sign(&self, index: usize) -> f64 {
        if self.bits[index / 64] >> (index % 64) & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Same function with the sign of one rectangle flipped.
    pub fn flipped(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.bits[index / 64] ^= 1 << (index % 64);
        out
    }

    /// `f_r(x) = ε_R h_R(x)` for the rectangle `R` containing `x`; points on
    /// a dyadic division take the value to their right, and a coordinate
    /// equal to 1 is treated as lying in the last cell.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut index = 0usize;
        let mut offset = 0u32;
        let mut negative = false;
        for (j, &r) in self.shape.levels().iter().enumerate() {
            let halves = 1u64 << (r + 1);
            let k = ((x[j] * halves as f64) as u64).min(halves - 1);
            index |= ((k >> 1) as usize) << offset;
            negative ^= k & 1 == 0;
            offset += r;
        }
        if negative {
            -self.sign(index)
        } else {
            self.sign(index)
        }
    }

    /// `Σ_R ε_R c_R`, summed in rectangle order.
    pub fn dot_coefficients(&self, coefficients: &[f64]) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(i, &c)| self.sign(i) * c)
            .collect::<Neumaier>()
            .value()
    }

    /// `⟨D_N, f_r⟩` computed exactly from the Haar coefficients.
    pub fn inner_product(&self, points: &PointSet) -> Result<f64> {
        Ok(self.dot_coefficients(&all_coefficients(points, &self.shape)?))
    }

    /// `∫ f_r f_{r'}` evaluated exactly.
    ///
    /// For equal shapes this is `2^{-|r|} Σ_R ε_R ε'_R`. For different
    /// shapes it is zero: on an axis where the levels differ, the finer
    /// Haar function integrates to zero against the coarser one, which is
    /// constant on each of its halves (see [`haar_1d_inner`]).
    pub fn inner(&self, other: &RFunction) -> Result<f64> {
        if self.shape.dim() != other.shape.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.shape.dim(),
                got: other.shape.dim(),
            });
        }
        if self.shape != other.shape {
            return Ok(0.0);
        }
        let agree: u64 = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| u64::from((!(a ^ b)).count_ones()))
            .sum::<u64>()
            - (64 * self.bits.len() - self.shape.cells()) as u64;
        let disagree = self.shape.cells() as u64 - agree;
        Ok((agree as f64 - disagree as f64) * side_length(self.shape.order()))
    }

    /// Serialized form: `RFN1`, `d` as little-endian `u32`, the `d` levels
    /// as `u32`, then the signs packed eight per byte, least significant
    /// bit first (bit set means `+1`).
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.shape.dim() as u32).to_le_bytes())?;
        for &r in self.shape.levels() {
            out.write_all(&r.to_le_bytes())?;
        }
        let nbytes = self.shape.cells().div_ceil(8);
        let bytes: Vec<u8> = self
            .bits
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect();
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad r-function magic".into()));
        }
        let mut word = [0u8; 4];
        input.read_exact(&mut word)?;
        let dim = u32::from_le_bytes(word) as usize;
        if dim == 0 || dim > 64 {
            return Err(Error::Format(format!("implausible dimension {dim}")));
        }
        let mut levels = Vec::with_capacity(dim);
        for _ in 0..dim {
            input.read_exact(&mut word)?;
            levels.push(u32::from_le_bytes(word));
        }
        let shape = ShapeVector::new(levels)?;
        if shape.order() > ORDER_CAP {
            return Err(Error::CapExceeded {
                order: shape.order(),
                cap: ORDER_CAP,
            });
        }
        let cells = shape.cells();
        let mut bytes = vec![0u8; cells.div_ceil(8)];
        input.read_exact(&mut bytes)?;
        let mut bits = vec![0u64; cells.div_ceil(64)];
        for (i, &byte) in bytes.iter().enumerate() {
            bits[i / 8] |= u64::from(byte) << (8 * (i % 8));
        }
        if cells % 64 != 0 {
            *bits.last_mut().unwrap() &= (1u64 << (cells % 64)) - 1;
        }
        Ok(Self { shape, bits })
    }
}

pub fn build_r_function_greedy(points: &PointSet, shape: &ShapeVector) -> Result<RFunction> {
    RFunction::greedy(points, shape)
}

pub fn eval_r_function(f: &RFunction, x: &[f64]) -> f64 {
    f.eval(x)
}

/// `Σ_k w_k ⟨D_N, f_k⟩` from exact Haar coefficients.
pub fn inner_product_exact(points: &PointSet, terms: &[(f64, &RFunction)]) -> Result<f64> {
    let mut acc = Neumaier::new();
    for (w, f) in terms {
        if *w != 0.0 {
            acc.add(w * f.inner_product(points)?);
        }
    }
    Ok(acc.value())
}

/// `∫ h_I h_J` for `I = [pa 2^{-la}, (pa+1) 2^{-la})` and `J` likewise,
/// computed from the overlaps of their halves.
pub fn haar_1d_inner(la: u32, pa: u64, lb: u32, pb: u64) -> f64 {
    let halves = |level: u32, pos: u64| {
        let len = side_length(level);
        let a = pos as f64 * len;
        let m = a + 0.5 * len;
        [(-1.0, a, m), (1.0, m, a + len)]
    };
    let mut total = 0.0;
    for (sa, a0, a1) in halves(la, pa) {
        for (sb, b0, b1) in halves(lb, pb) {
            let overlap = (a1.min(b1) - a0.max(b0)).max(0.0);
            total += sa * sb * overlap;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::{haar_coefficient, DyadicRectangle};
    use crate::mc::uniform_points;
    use crate::pointset::{generate_random, generate_van_der_corput};
    use proptest::prelude::*;

    fn shape(levels: &[u32]) -> ShapeVector {
        ShapeVector::new(levels.to_vec()).unwrap()
    }

    #[test]
    fn single_interval_values() {
        let f = RFunction::positive(shape(&[0])).unwrap();
        assert_eq!(f.eval(&[0.75]), 1.0);
        assert_eq!(f.eval(&[0.25]), -1.0);
        assert_eq!(f.eval(&[1.0]), 1.0);
        let g = RFunction::from_signs(shape(&[1]), &[1, -1]).unwrap();
        assert_eq!(g.eval(&[0.1]), -1.0);
        assert_eq!(g.eval(&[0.6]), 1.0);
        assert_eq!(g.eval(&[0.9]), -1.0);
    }

    #[test]
    fn eval_matches_rectangle_haar() {
        let s = shape(&[2, 1, 2]);
        let signs: Vec<i8> = (0..s.cells())
            .map(|i| if i % 3 == 0 { -1 } else { 1 })
            .collect();
        let f = RFunction::from_signs(s.clone(), &signs).unwrap();
        for x in uniform_points(3, 500, 4).chunks_exact(3) {
            let direct: f64 = (0..s.cells())
                .map(|i| signs[i] as f64 * DyadicRectangle::from_index(&s, i).haar(x))
                .sum();
            assert_eq!(f.eval(x), direct);
        }
    }

    #[test]
    fn mean_zero_by_midpoint_quadrature() {
        // each cell of the level-(r+1) grid sees a constant value
        let s = shape(&[3, 2]);
        let signs: Vec<i8> = (0..s.cells())
            .map(|i| if (i * 7) % 5 < 2 { -1 } else { 1 })
            .collect();
        let f = RFunction::from_signs(s, &signs).unwrap();
        let m = 1 << 12;
        let mut total = 0.0;
        for i in 0..m {
            for j in 0..(m >> 4) {
                let x = [
                    (i as f64 + 0.5) / m as f64,
                    (j as f64 + 0.5) / (m >> 4) as f64,
                ];
                total += f.eval(&x);
            }
        }
        assert!((total / (m * (m >> 4)) as f64).abs() < 1e-6);
    }

    #[test]
    fn greedy_value_is_sum_of_absolute_coefficients() {
        let p = generate_van_der_corput(64).unwrap();
        let s = shape(&[3, 4]);
        let coefs = all_coefficients(&p, &s).unwrap();
        let f = RFunction::greedy(&p, &s).unwrap();
        let abs_sum: f64 = coefs.iter().map(|c| c.abs()).collect::<Neumaier>().value();
        let value = f.inner_product(&p).unwrap();
        assert_eq!(value, abs_sum);
        assert!(value >= 0.0);
        for (i, &c) in coefs.iter().enumerate() {
            if c != 0.0 {
                assert!(f.flipped(i).inner_product(&p).unwrap() < value);
            }
        }
        // single-rectangle consistency
        let r = DyadicRectangle::from_index(&s, 5);
        assert_eq!(coefs[5], haar_coefficient(&p, &r).unwrap());
    }

    #[test]
    fn weighted_sums() {
        let p = generate_random(2, 40, 2).unwrap();
        let f = RFunction::greedy(&p, &shape(&[2, 3])).unwrap();
        let g = RFunction::greedy(&p, &shape(&[4, 1])).unwrap();
        assert_eq!(
            inner_product_exact(&p, &[(0.0, &f), (0.0, &g)]).unwrap(),
            0.0
        );
        let both = inner_product_exact(&p, &[(0.5, &f), (2.0, &g)]).unwrap();
        let parts = 0.5 * f.inner_product(&p).unwrap() + 2.0 * g.inner_product(&p).unwrap();
        assert!((both - parts).abs() < 1e-14);
    }

    #[test]
    fn orthogonality_and_unit_norm() {
        let p = generate_random(3, 60, 8).unwrap();
        let shapes = ShapeVector::all_of_order(4, 3);
        let fs: Vec<RFunction> = shapes
            .iter()
            .map(|s| RFunction::greedy(&p, s).unwrap())
            .collect();
        for (i, f) in fs.iter().enumerate() {
            for (j, g) in fs.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(f.inner(g).unwrap(), expect);
            }
        }
        // midpoint rule on the common refinement is exact for these step functions
        let a = RFunction::greedy(&p, &shape(&[1, 0, 2])).unwrap();
        let b = RFunction::greedy(&p, &shape(&[2, 1, 0])).unwrap();
        let c = RFunction::greedy(&p, &shape(&[0, 1, 4])).unwrap();
        for (f, g) in [(&a, &b), (&a, &a), (&a, &c), (&b, &c)] {
            assert_eq!(f.inner(g).unwrap(), refinement_inner(f, g));
        }
    }

    fn refinement_inner(f: &RFunction, g: &RFunction) -> f64 {
        let levels: Vec<u32> = f
            .shape()
            .levels()
            .iter()
            .zip(g.shape().levels())
            .map(|(&a, &b)| a.max(b) + 1)
            .collect();
        let grid = ShapeVector::new(levels).unwrap();
        let mut total = 0.0;
        for cell in 0..grid.cells() {
            let rect = DyadicRectangle::from_index(&grid, cell);
            let x: Vec<f64> = (0..grid.dim())
                .map(|j| {
                    let (a, b) = rect.interval(j);
                    0.5 * (a + b)
                })
                .collect();
            total += f.eval(&x) * g.eval(&x);
        }
        total / grid.cells() as f64
    }

    #[test]
    fn haar_1d_gram() {
        for la in 0..4 {
            for lb in 0..4 {
                for pa in 0..1u64 << la {
                    for pb in 0..1u64 << lb {
                        let v = haar_1d_inner(la, pa, lb, pb);
                        if la != lb || pa != pb {
                            assert_eq!(v, 0.0);
                        }
                    }
                }
            }
        }
        assert_eq!(haar_1d_inner(2, 1, 2, 1), 0.25);
        assert_eq!(haar_1d_inner(2, 1, 2, 2), 0.0);
        assert_eq!(haar_1d_inner(0, 0, 3, 5), 0.0);
        assert_eq!(haar_1d_inner(1, 0, 1, 0), 0.5);
    }

    #[test]
    fn from_signs_rejects_bad_input() {
        assert!(RFunction::from_signs(shape(&[1]), &[1]).is_err());
        assert!(RFunction::from_signs(shape(&[1]), &[1, 0]).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(levels in proptest::collection::vec(0u32..5, 1..4), seed in 0u64..1000) {
            let s = ShapeVector::new(levels).unwrap();
            let signs: Vec<i8> = (0..s.cells()).map(|i| if (i as u64 * 2654435761 + seed).is_multiple_of(3) { -1 } else { 1 }).collect();
            let f = RFunction::from_signs(s.clone(), &signs).unwrap();
            let mut buf = Vec::new();
            f.write_to(&mut buf).unwrap();
            prop_assert_eq!(buf.len(), 8 + 4 * s.dim() + s.cells().div_ceil(8));
            let g = RFunction::read_from(&buf[..]).unwrap();
            prop_assert_eq!(g, f);
        }
    }
}
