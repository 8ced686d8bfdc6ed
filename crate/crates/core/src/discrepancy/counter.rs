//! Batched dominance counting: `#{p ∈ P : p < x coordinatewise}`.
//!
//! - `d = 1`: binary search in the sorted coordinates.
//! - `d = 2`: offline sweep. Queries of a chunk are sorted by their first
//!   coordinate, points are inserted in order of their first coordinate into
//!   a Fenwick tree over the ranks of their second coordinate.
//! - `d >= 3`: points sorted by the first coordinate are scanned up to the
//!   query's first coordinate, comparing the remaining columns.
//!
//! Counts are integers, so every strategy returns identical results.

use rayon::prelude::*;

use crate::PointSet;

const QUERY_CHUNK: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct DominanceCounter {
    dim: usize,
    /// Column-major coordinates with points sorted by the first coordinate.
    columns: Vec<Vec<f64>>,
    /// For `d = 2`: sorted second coordinates and each point's slot in it.
    plane: Option<(Vec<f64>, Vec<u32>)>,
}

impl DominanceCounter {
    pub fn new(points: &PointSet) -> Self {
        let dim = points.dim();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points.point(a)[0].total_cmp(&points.point(b)[0]));
        let columns: Vec<Vec<f64>> = (0..dim)
            .map(|j| order.iter().map(|&i| points.point(i)[j]).collect())
            .collect();
        let plane = (dim == 2).then(|| {
            let ys = &columns[1];
            let mut by_y: Vec<usize> = (0..ys.len()).collect();
            by_y.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]));
            let mut slots = vec![0u32; ys.len()];
            for (slot, &i) in by_y.iter().enumerate() {
                slots[i] = slot as u32;
            }
            let sorted = by_y.iter().map(|&i| ys[i]).collect();
            (sorted, slots)
        });
        Self {
            dim,
            columns,
            plane,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Count for a single query point.
    pub fn count(&self, x: &[f64]) -> u32 {
        debug_assert_eq!(x.len(), self.dim);
        let m = self.columns[0].partition_point(|&v| v < x[0]);
        match self.dim {
            1 => m as u32,
            2 => self.columns[1][..m].iter().filter(|&&v| v < x[1]).count() as u32,
            3 => {
                let (b, c) = (&self.columns[1][..m], &self.columns[2][..m]);
                b.iter()
                    .zip(c)
                    .map(|(&u, &v)| u32::from((u < x[1]) & (v < x[2])))
                    .sum()
            }
            _ => (0..m)
                .filter(|&i| (1..self.dim).all(|j| self.columns[j][i] < x[j]))
                .count() as u32,
        }
    }

    /// Counts for every row of `queries` (row-major).
    pub fn count_batch(&self, queries: &[f64]) -> Vec<u32> {
        let dim = self.dim;
        let mut out = vec![0u32; queries.len() / dim];
        match &self.plane {
            Some((ys, slots)) => {
                out.par_chunks_mut(QUERY_CHUNK)
                    .zip(queries.par_chunks(QUERY_CHUNK * dim))
                    .for_each(|(o, q)| self.sweep(ys, slots, q, o));
            }
            None => {
                out.par_iter_mut()
                    .zip(queries.par_chunks_exact(dim))
                    .for_each(|(o, x)| *o = self.count(x));
            }
        }
        out
    }

    fn sweep(&self, ys: &[f64], slots: &[u32], queries: &[f64], out: &mut [u32]) {
        let xs = &self.columns[0];
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by(|&a, &b| queries[2 * a].total_cmp(&queries[2 * b]));
        let mut tree = Fenwick::new(xs.len());
        let mut next = 0;
        for q in order {
            let (qx, qy) = (queries[2 * q], queries[2 * q + 1]);
            while next < xs.len() && xs[next] < qx {
                tree.add(slots[next] as usize);
                next += 1;
            }
            let k = ys.partition_point(|&v| v < qy);
            out[q] = tree.prefix(k);
        }
    }
}

struct Fenwick(Vec<u32>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    fn add(&mut self, slot: usize) {
        let mut i = slot + 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted slots `< k`.
    fn prefix(&self, k: usize) -> u32 {
        let mut i = k;
        let mut acc = 0;
        while i > 0 {
            acc += self.0[i];
            i &= i - 1;
        }
        acc
    }
}
