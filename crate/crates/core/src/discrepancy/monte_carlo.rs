//! Monte Carlo estimates of `E L2²` and of differences between partitions.
//!
//! Replicate `r` uses substreams `(seed, r, ·)`. Replicates are processed in
//! fixed blocks whose running moments are merged in block order, so results
//! are bit-identical for any thread count.

use super::{l2_squared_unchecked, ExpectationResult, Method};
use crate::error::{Error, Result};
use crate::geometry::Partition;
use crate::par::{map_blocks, Execution};
use crate::sampling::{check_coupled, sample_partition_into, SeedSpec};

const REPLICATES_PER_BLOCK: usize = 1024;

/// Count, mean and centred sum of squares.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        Moments {
            n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
        }
    }

    /// Standard error of the mean from the unbiased sample variance.
    fn standard_error(&self) -> f64 {
        (self.m2 / (self.n - 1) as f64 / self.n as f64)
            .max(0.0)
            .sqrt()
    }
}

fn run<F>(replicates: u64, exec: Execution, score: F) -> Result<Moments>
where
    F: Fn(u64, &mut Vec<f64>, &mut Vec<f64>) -> f64 + Sync + Send,
{
    if replicates < 2 {
        return Err(Error::argument(format!(
            "need at least 2 replicates, got {replicates}"
        )));
    }
    let len = usize::try_from(replicates)
        .map_err(|_| Error::argument("replicate count exceeds address space"))?;
    let blocks = map_blocks(len, REPLICATES_PER_BLOCK, exec, |range| {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut m = Moments::default();
        for r in range {
            a.clear();
            b.clear();
            m.push(score(r as u64, &mut a, &mut b));
        }
        m
    });
    Ok(blocks.into_iter().fold(Moments::default(), Moments::merge))
}

/// Mean of `L2²` over `replicates` independent stratified samples.
pub fn expected_l2_squared_mc(
    partition: &Partition,
    replicates: u64,
    seed: u64,
) -> Result<ExpectationResult> {
    expected_l2_squared_mc_with(partition, replicates, seed, Execution::default())
}

pub fn expected_l2_squared_mc_with(
    partition: &Partition,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<ExpectationResult> {
    let d = partition.dim();
    let m = run(replicates, exec, |r, buf, _| {
        sample_partition_into(partition, SeedSpec::new(seed, r), buf);
        l2_squared_unchecked(buf, d)
    })?;
    Ok(ExpectationResult {
        value: m.mean,
        error: m.standard_error(),
        method: Method::MonteCarlo,
        spec: partition.spec().copied(),
        spec2: None,
        replicates: Some(replicates),
        grid: None,
    })
}

/// Mean of `L2²(sample_a) − L2²(sample_b)` over coupled replicates.
///
/// Both samples of a replicate share the substreams of every cell the two
/// partitions have in common.
pub fn expected_difference_mc(
    a: &Partition,
    b: &Partition,
    replicates: u64,
    seed: u64,
) -> Result<ExpectationResult> {
    expected_difference_mc_with(a, b, replicates, seed, Execution::default())
}

pub fn expected_difference_mc_with(
    a: &Partition,
    b: &Partition,
    replicates: u64,
    seed: u64,
    exec: Execution,
) -> Result<ExpectationResult> {
    match (a.spec(), b.spec()) {
        (Some(sa), Some(sb)) => check_coupled(sa, sb)?,
        _ if a.len() != b.len() || a.dim() != b.dim() => {
            return Err(Error::argument(
                "partitions must have the same number of cells and dimension",
            ))
        }
        _ => {}
    }
    let d = a.dim();
    let m = run(replicates, exec, |r, buf_a, buf_b| {
        let s = SeedSpec::new(seed, r);
        sample_partition_into(a, s, buf_a);
        sample_partition_into(b, s, buf_b);
        l2_squared_unchecked(buf_a, d) - l2_squared_unchecked(buf_b, d)
    })?;
    Ok(ExpectationResult {
        value: m.mean,
        error: m.standard_error(),
        method: Method::MonteCarlo,
        spec: a.spec().copied(),
        spec2: b.spec().copied(),
        replicates: Some(replicates),
        grid: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_partition, PartitionSpec, Theta};

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut whole = Moments::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (l, r) = xs.split_at(413);
        let mut a = Moments::default();
        let mut b = Moments::default();
        l.iter().for_each(|&x| a.push(x));
        r.iter().for_each(|&x| b.push(x));
        let merged = a.merge(b);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.m2 - whole.m2).abs() < 1e-9 * whole.m2);
    }

    #[test]
    fn rejects_too_few_replicates() {
        let p = Partition::trivial(1).unwrap();
        assert!(expected_l2_squared_mc(&p, 1, 0).is_err());
        assert!(expected_l2_squared_mc(&p, 0, 0).is_err());
    }

    #[test]
    fn identical_partitions_give_exact_zero() {
        let p = build_partition(&PartitionSpec::new(3, 2, Theta::QUARTER_PI).unwrap());
        let r = expected_difference_mc(&p, &p, 500, 3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error, 0.0);
        assert_eq!(r.replicates, Some(500));
    }

    #[test]
    fn mismatched_partitions_rejected() {
        let a = build_partition(&PartitionSpec::new(3, 2, Theta::ZERO).unwrap());
        let b = build_partition(&PartitionSpec::new(4, 2, Theta::ZERO).unwrap());
        assert!(expected_difference_mc(&a, &b, 10, 0).is_err());
    }

    #[test]
    fn bit_identical_across_schedules() {
        let p = build_partition(&PartitionSpec::new(3, 2, Theta::CRITICAL).unwrap());
        let a = expected_l2_squared_mc_with(&p, 5000, 42, Execution::Sequential).unwrap();
        let b = expected_l2_squared_mc_with(&p, 5000, 42, Execution::Parallel).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }
}
