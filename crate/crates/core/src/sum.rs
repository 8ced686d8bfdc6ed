//! Compensated and schedule-independent summation.
//!
//! All reductions in the crate go through [`det_sum`] or [`Neumaier`]. The
//! index range is cut into blocks of [`BLOCK`] terms; each block is summed
//! sequentially with Neumaier compensation and the block results are
//! combined in block order. The result is therefore bit-identical for any
//! number of rayon worker threads.

use rayon::prelude::*;

/// Number of terms per reduction block.
pub const BLOCK: usize = 4096;

/// Neumaier (improved Kahan) running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            comp: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merge another partial sum into this one.
    #[inline]
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Deterministic sum of `term(i)` for `i in 0..len`.
pub fn det_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let blocks = len.div_ceil(BLOCK);
    let partial: Vec<Neumaier> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(len);
            (start..end).map(&term).collect()
        })
        .collect();
    let mut total = Neumaier::new();
    for p in &partial {
        total.merge(p);
    }
    total.value()
}

/// Deterministic mean of `term(i)` for `i in 0..len`; zero for `len == 0`.
pub fn det_mean<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if len == 0 {
        return 0.0;
    }
    det_sum(len, term) / len as f64
}

/// Mean and unbiased sample variance, both computed with [`det_sum`]
/// (two passes).
pub fn det_mean_var<F>(len: usize, term: F) -> (f64, f64)
where
    F: Fn(usize) -> f64 + Sync,
{
    let mean = det_mean(len, &term);
    if len < 2 {
        return (mean, 0.0);
    }
    let ss = det_sum(len, |i| {
        let d = term(i) - mean;
        d * d
    });
    (mean, ss / (len - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut acc = Neumaier::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn det_sum_is_thread_count_independent() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e-3 + 1.0 / (1.0 + i as f64);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| det_sum(100_003, f));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(5)
            .build()
            .unwrap()
            .install(|| det_sum(100_003, f));
        assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn mean_var_of_constant() {
        let (m, v) = det_mean_var(10, |_| 3.5);
        assert_eq!(m, 3.5);
        assert_eq!(v, 0.0);
    }

    proptest! {
        #[test]
        fn det_sum_close_to_exact_integer_sum(values in proptest::collection::vec(-1_000_000i64..1_000_000, 0..20_000)) {
            let exact: i64 = values.iter().sum();
            let got = det_sum(values.len(), |i| values[i] as f64);
            prop_assert_eq!(got, exact as f64);
        }
    }
}
