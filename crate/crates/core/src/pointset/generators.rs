use rand::Rng;
use rayon::prelude::*;

use super::{Generator, PointSet};
use crate::combinatorics::{binomial, first_primes, is_prime};
use crate::error::{invalid, Error, Result};
use crate::mc::stream_rng;

/// Largest admissible net size; keeps `p^s` exactly representable.
const NET_SIZE_LIMIT: u64 = 1 << 52;

/// `N` seeded uniform points of `[0,1)^dim`.
pub fn generate_random(dim: usize, n: usize, seed: u64) -> Result<PointSet> {
    if dim == 0 || n == 0 {
        return Err(invalid("random point set needs dim >= 1 and N >= 1"));
    }
    let mut rng = stream_rng(seed, 0);
    let coords = (0..dim * n).map(|_| rng.random::<f64>()).collect();
    PointSet::new(
        dim,
        coords,
        Generator::named("random")
            .with_param("dim", dim)
            .with_param("n", n)
            .with_seed(seed),
    )
}

/// Radical inverse of `k` in `base`: the digits of `k` mirrored about the
/// radix point. Computed as one integer division so the result is the
/// correctly rounded value of the exact rational.
pub fn radical_inverse(base: u64, mut k: u64) -> f64 {
    let mut num: u64 = 0;
    let mut den: u64 = 1;
    while k > 0 {
        num = num * base + k % base;
        den *= base;
        k /= base;
    }
    num as f64 / den as f64
}

/// Two-dimensional Hammersley set `(k/N, φ₂(k))`, `k = 0..N`.
///
/// For `N = 2^s` this is a 2-adic net.
pub fn generate_van_der_corput(n: usize) -> Result<PointSet> {
    generate_hammersley(2, n).map(|mut p| {
        p.generator = Generator::named("van-der-corput").with_param("n", n);
        p
    })
}

/// `dim`-dimensional Hammersley set `(k/N, φ₂(k), φ₃(k), φ₅(k), …)`.
pub fn generate_hammersley(dim: usize, n: usize) -> Result<PointSet> {
    if dim == 0 || n == 0 {
        return Err(invalid("Hammersley set needs dim >= 1 and N >= 1"));
    }
    let bases = first_primes(dim - 1);
    let mut coords = Vec::with_capacity(dim * n);
    for k in 0..n {
        coords.push(k as f64 / n as f64);
        coords.extend(bases.iter().map(|&b| radical_inverse(b, k as u64)));
    }
    PointSet::new(
        dim,
        coords,
        Generator::named("hammersley")
            .with_param("dim", dim)
            .with_param("n", n),
    )
}

/// Parameters of a `p`-adic net of `p^s` points in dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetParams {
    base: u64,
    exponent: u32,
    dim: usize,
}

impl NetParams {
    pub fn new(base: u64, exponent: u32, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("net dimension must be at least 1"));
        }
        if !is_prime(base) {
            return Err(Error::NotPrime(base));
        }
        if base < dim as u64 {
            return Err(Error::BaseTooSmall { base, dim });
        }
        if exponent == 0 {
            return Err(invalid("net exponent must be positive"));
        }
        match base.checked_pow(exponent) {
            Some(n) if n < NET_SIZE_LIMIT => {}
            _ => return Err(invalid(format!("{base}^{exponent} exceeds 2^52"))),
        }
        Ok(Self {
            base,
            exponent,
            dim,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N = p^s`.
    pub fn size(&self) -> u64 {
        self.base.pow(self.exponent)
    }
}

/// Faure-type net in Hammersley form: the first coordinate is `k/p^s` and
/// coordinate `j >= 1` applies the `(j-1)`-th power of the Pascal matrix
/// over `F_p` to the base-`p` digits of `k`.
///
/// The result has exactly one point in every elementary `p`-adic box of
/// volume `p^{-s}`; [`super::verify_net`] checks this independently.
pub fn generate_faure_net(base: u64, exponent: u32, dim: usize) -> Result<PointSet> {
    let params = NetParams::new(base, exponent, dim)?;
    if exponent < 2 {
        return Err(invalid("Faure nets are built for s >= 2"));
    }
    let p = params.base;
    let s = exponent as usize;
    let n = params.size();
    let nf = n as f64;

    // matrices[j][r][t] = C(t, r) * j^(t - r) mod p, upper triangular
    let matrices: Vec<Vec<Vec<u64>>> = (0..dim.saturating_sub(1) as u64)
        .map(|c| {
            (0..s)
                .map(|r| {
                    (0..s)
                        .map(|t| {
                            if t < r {
                                0
                            } else {
                                let b = binomial(t as u64, r as u64) % p;
                                b * pow_mod(c, (t - r) as u64, p) % p
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let coords: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut digits = vec![0u64; s];
            let mut rest = k;
            for d in digits.iter_mut() {
                *d = rest % p;
                rest /= p;
            }
            let mut point = Vec::with_capacity(dim);
            point.push(k as f64 / nf);
            for m in &matrices {
                let mut value: u64 = 0;
                for row in m {
                    let y = row
                        .iter()
                        .zip(&digits)
                        .fold(0u64, |acc, (c, a)| (acc + c * a) % p);
                    value = value * p + y;
                }
                point.push(value as f64 / nf);
            }
            point
        })
        .collect();

    PointSet::new(
        dim,
        coords,
        Generator::named("faure")
            .with_param("base", p)
            .with_param("s", exponent)
            .with_param("dim", dim),
    )
}

fn pow_mod(base: u64, exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn corner_threshold(n: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    Ok(1.0 - (n as f64).powf(-delta))
}

/// Indices of the points inside the corner cube `Q = [1 - N^{-δ}, 1]^d`.
pub fn corner_cube_members(points: &PointSet, delta: f64) -> Result<Vec<usize>> {
    let threshold = corner_threshold(points.len(), delta)?;
    Ok(points
        .points()
        .enumerate()
        .filter(|(_, p)| p.iter().all(|&v| v >= threshold))
        .map(|(i, _)| i)
        .collect())
}

/// Replaces every point of the corner cube `Q = [1 - N^{-δ}, 1]^d` by
/// `(1, …, 1)`. Those points stop contributing to any anchored box count.
pub fn corner_collapse(points: &PointSet, delta: f64) -> Result<PointSet> {
    let members = corner_cube_members(points, delta)?;
    let dim = points.dim();
    let mut coords = points.coords().to_vec();
    for i in members {
        coords[i * dim..(i + 1) * dim].fill(1.0);
    }
    let mut generator = points.generator().clone();
    generator.name = format!("{}+corner-collapse", generator.name);
    generator.params.push(("delta".into(), delta.to_string()));
    PointSet::new(dim, coords, generator)
}
