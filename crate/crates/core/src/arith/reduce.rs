//! Deterministic parallel summation.
//!
//! An index range is cut into fixed-size chunks. Each chunk is summed
//! sequentially with Neumaier compensation, and the chunk partials are then
//! combined by a fan-in-2 pairwise tree in chunk-index order. The chunking
//! never depends on the number of rayon workers, so the result is
//! bit-identical whether the caller runs under a 1, 2 or 8 thread pool.

use std::ops::{Add, Range};

use num_complex::Complex64;
use rayon::prelude::*;

pub const DEFAULT_CHUNK: u64 = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for Neumaier {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

/// Compensated complex accumulator (independent real and imaginary parts).
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierComplex {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierComplex {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Pairwise reduction tree with fan-in 2, split at the midpoint.
pub fn pairwise_reduce<T>(xs: &[T], zero: T) -> T
where
    T: Copy + Add<Output = T>,
{
    match xs.len() {
        0 => zero,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_reduce(&xs[..mid], zero) + pairwise_reduce(&xs[mid..], zero)
        }
    }
}

/// Fixed-chunk compensated reduction over an index range.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedAccumulator {
    chunk: u64,
}

impl Default for CompensatedAccumulator {
    fn default() -> Self {
        Self {
            chunk: DEFAULT_CHUNK,
        }
    }
}

impl CompensatedAccumulator {
    pub fn new(chunk: u64) -> Self {
        assert!(chunk > 0, "chunk size must be positive");
        Self { chunk }
    }

    pub fn chunk(&self) -> u64 {
        self.chunk
    }

    fn chunks(&self, range: &Range<u64>) -> u64 {
        let len = range.end.saturating_sub(range.start);
        len.div_ceil(self.chunk)
    }

    pub fn sum<F>(&self, range: Range<u64>, f: F) -> f64
    where
        F: Fn(u64) -> f64 + Sync,
    {
        let n_chunks = self.chunks(&range);
        let partials: Vec<f64> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = range.start + c * self.chunk;
                let hi = (lo + self.chunk).min(range.end);
                let mut acc = Neumaier::new();
                for i in lo..hi {
                    acc.add(f(i));
                }
                acc.value()
            })
            .collect();
        pairwise_reduce(&partials, 0.0)
    }

    pub fn sum_complex<F>(&self, range: Range<u64>, f: F) -> Complex64
    where
        F: Fn(u64) -> Complex64 + Sync,
    {
        let n_chunks = self.chunks(&range);
        let partials: Vec<Complex64> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = range.start + c * self.chunk;
                let hi = (lo + self.chunk).min(range.end);
                let mut acc = NeumaierComplex::default();
                for i in lo..hi {
                    acc.add(f(i));
                }
                acc.value()
            })
            .collect();
        pairwise_reduce(&partials, Complex64::new(0.0, 0.0))
    }

    pub fn sum_slice(&self, xs: &[f64]) -> f64 {
        self.sum(0..xs.len() as u64, |i| xs[i as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let mut acc = Neumaier::new();
        acc.extend([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn empty_range_is_zero() {
        let acc = CompensatedAccumulator::default();
        assert_eq!(acc.sum(5..5, |_| 1.0), 0.0);
        assert_eq!(acc.sum(7..3, |_| 1.0), 0.0);
    }

    #[test]
    fn integer_sum_is_exact() {
        let acc = CompensatedAccumulator::new(17);
        assert_eq!(acc.sum(1..1001, |i| i as f64), 500500.0);
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let acc = CompensatedAccumulator::new(100);
        let f = |i: u64| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let results: Vec<u64> = [1usize, 2, 8]
            .iter()
            .map(|&w| {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(w).build().unwrap();
                pool.install(|| acc.sum(0..100_003, f)).to_bits()
            })
            .collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn pairwise_tree_order() {
        assert_eq!(pairwise_reduce(&[1, 2, 3, 4, 5], 0), 15);
        assert_eq!(pairwise_reduce::<i32>(&[], 0), 0);
    }
}
