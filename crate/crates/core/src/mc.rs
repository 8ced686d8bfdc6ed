//! Seeded uniform sample generation.
//!
//! Samples are produced in blocks of [`SAMPLE_BLOCK`] points. Block `b` is
//! drawn from a ChaCha8 stream keyed by the seed with stream id `b + 1`, so
//! the sample set depends only on `(dim, count, seed)` and never on the
//! thread schedule. Stream 0 is reserved for random point-set generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const SAMPLE_BLOCK: usize = 4096;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` uniform points of `[0,1)^dim`, row-major.
pub fn uniform_points(dim: usize, count: usize, seed: u64) -> Vec<f64> {
    let mut out = vec![0.0; dim * count];
    if dim == 0 {
        return out;
    }
    out.par_chunks_mut(SAMPLE_BLOCK * dim)
        .enumerate()
        .for_each(|(b, chunk)| {
            let mut rng = stream_rng(seed, b as u64 + 1);
            for v in chunk.iter_mut() {
                *v = rng.random::<f64>();
            }
        });
    out
}

/// Per-axis dyadic levels used for stratification at total level `level`:
/// the levels are spread as evenly as possible, earlier axes first.
pub fn stratification_shape(dim: usize, level: u32) -> Vec<u32> {
    let base = level / dim as u32;
    let extra = (level % dim as u32) as usize;
    (0..dim).map(|j| base + u32::from(j < extra)).collect()
}

/// Jittered samples: `per_cell` uniform points in each of the `2^level`
/// cells of the dyadic grid with shape [`stratification_shape`]. Points of
/// the same cell are contiguous; cells appear in mixed-radix order with the
/// first axis varying fastest.
pub fn stratified_points(dim: usize, level: u32, per_cell: usize, seed: u64) -> Vec<f64> {
    let shape = stratification_shape(dim, level);
    let cells = 1usize << level;
    let mut out = vec![0.0; dim * per_cell * cells];
    out.par_chunks_mut(dim * per_cell)
        .enumerate()
        .for_each(|(cell, chunk)| {
            let mut rng = stream_rng(seed, cell as u64 + 1);
            let mut rest = cell;
            let mut lo = vec![0.0; dim];
            let mut width = vec![0.0; dim];
            for j in 0..dim {
                let k = 1usize << shape[j];
                let pos = rest % k;
                rest /= k;
                width[j] = 1.0 / k as f64;
                lo[j] = pos as f64 * width[j];
            }
            for pt in chunk.chunks_exact_mut(dim) {
                for j in 0..dim {
                    pt[j] = lo[j] + width[j] * rng.random::<f64>();
                }
            }
        });
    out
}
