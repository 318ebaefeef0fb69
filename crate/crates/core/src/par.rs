//! Block-wise execution with a fixed work decomposition.
//!
//! Work is always split into the same blocks regardless of how it is
//! scheduled, and block results come back in block order. Reductions over
//! those results are therefore bit-identical between sequential and
//! parallel runs and across thread counts.

use std::ops::Range;

/// How block-decomposed work is scheduled.
///
/// Without the `parallel` feature, `Parallel` runs sequentially.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

fn block_ranges(len: usize, block: usize) -> impl Iterator<Item = Range<usize>> + Clone {
    let block = block.max(1);
    (0..len.div_ceil(block)).map(move |b| b * block..((b + 1) * block).min(len))
}

/// Applies `f` to consecutive blocks of `0..len` and returns the results in block order.
pub(crate) fn map_blocks<T, F>(len: usize, block: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let ranges: Vec<Range<usize>> = block_ranges(len, block).collect();
            ranges.into_par_iter().map(f).collect()
        }
        _ => block_ranges(len, block).map(f).collect(),
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_cover_range_in_order() {
        let blocks: Vec<_> = block_ranges(10, 4).collect();
        assert_eq!(blocks, vec![0..4, 4..8, 8..10]);
        assert_eq!(block_ranges(0, 4).count(), 0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let f = |r: Range<usize>| r.map(|i| (i as f64).sqrt()).sum::<f64>();
        let a = map_blocks(10_000, 97, Execution::Sequential, f);
        let b = map_blocks(10_000, 97, Execution::Parallel, f);
        assert_eq!(a, b);
    }

    #[test]
    fn compensation_recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
