//! Tensor-grid midpoint quadrature.
//!
//! The expected L2² of a stratified sample over an equivolume partition
//! `{Ω₁, …, Ω_N}` of a cuboid `K` is
//!
//! `E L2² = 1/(N² λ(K)) Σᵢ ∫_K qᵢ(x)(1 − qᵢ(x)) dx`,  `qᵢ(x) = λ(Ωᵢ ∩ [0,x]) / λ(Ωᵢ)`.
//!
//! The integrand is continuous but has kinks on cell boundaries, so every
//! estimate is paired with `|v(n) − v(n/2)|` from a half-resolution pass; with
//! `refine` the Richardson value `(4v(n) − v(n/2))/3` is returned.

use serde::Serialize;

use super::{ExpectationResult, Method, PointSet};
use crate::error::{Error, Result};
use crate::geometry::{building_block_q, Cell, Partition, Theta};
use crate::par::{compensated_sum, map_blocks, CompensatedSum, Execution};

/// Largest node count of one tensor pass.
const MAX_NODES: u64 = 1 << 30;
const MAX_EXPECTATION_DIM: usize = 4;
const MAX_L2_ORACLE_DIM: usize = 3;

/// Resolution and scheduling of a tensor midpoint rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    points_per_axis: usize,
    pub refine: bool,
    pub exec: Execution,
}

impl QuadratureSpec {
    /// `points_per_axis` must be a power of two, at least 2.
    pub fn new(points_per_axis: usize) -> Result<Self> {
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(Error::argument(format!(
                "points per axis must be a power of two >= 2, got {points_per_axis}"
            )));
        }
        Ok(QuadratureSpec {
            points_per_axis,
            refine: true,
            exec: Execution::default(),
        })
    }

    /// 1024 nodes per axis, for two-dimensional building-block integrals.
    pub fn building_block() -> Self {
        QuadratureSpec::new(1024).expect("valid")
    }

    /// 256 nodes per axis, for integrals over `[0,1]^d`.
    pub fn volume() -> Self {
        QuadratureSpec::new(256).expect("valid")
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec::volume()
    }
}

/// A quadrature value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Midpoint rule with `n` nodes per axis over the cuboid `domain`.
fn midpoint<F>(domain: &[[f64; 2]], n: usize, exec: Execution, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = domain.len();
    let h: Vec<f64> = domain.iter().map(|[a, b]| (b - a) / n as f64).collect();
    let node = |k: usize, i: usize| domain[k][0] + (i as f64 + 0.5) * h[k];
    let inner = n.pow(d as u32 - 1);
    let rows_per_block = (4096 / inner).max(1);
    let partial = map_blocks(n, rows_per_block, exec, |rows| {
        let mut x = vec![0.0; d];
        let mut idx = vec![0usize; d];
        let mut acc = CompensatedSum::default();
        for i0 in rows {
            x[0] = node(0, i0);
            idx[1..].iter_mut().for_each(|i| *i = 0);
            for (k, xk) in x.iter_mut().enumerate().skip(1) {
                *xk = node(k, 0);
            }
            for _ in 0..inner {
                acc.add(f(&x));
                for k in (1..d).rev() {
                    idx[k] += 1;
                    if idx[k] < n {
                        x[k] = node(k, idx[k]);
                        break;
                    }
                    idx[k] = 0;
                    x[k] = node(k, 0);
                }
            }
        }
        acc.value()
    });
    compensated_sum(partial) * h.iter().product::<f64>()
}

fn check_nodes(d: usize, n: usize) -> Result<()> {
    let nodes = (n as u64).checked_pow(d as u32);
    match nodes {
        Some(k) if k <= MAX_NODES => Ok(()),
        _ => Err(Error::argument(format!(
            "{n}^{d} quadrature nodes exceed the limit of {MAX_NODES}"
        ))),
    }
}

fn estimate<F>(domain: &[[f64; 2]], quad: &QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_nodes(domain.len(), quad.points_per_axis)?;
    let fine = midpoint(domain, quad.points_per_axis, quad.exec, &f);
    let coarse = midpoint(domain, quad.points_per_axis / 2, quad.exec, &f);
    let value = if quad.refine {
        (4.0 * fine - coarse) / 3.0
    } else {
        fine
    };
    Ok(Estimate {
        value,
        error: (fine - coarse).abs(),
    })
}

/// A cell prepared for repeated `qᵢ(x)` evaluation.
struct Stratum<'a> {
    cell: &'a Cell,
    lo: Vec<f64>,
    hi: Vec<f64>,
    inv_volume: f64,
}

impl<'a> Stratum<'a> {
    fn new(cell: &'a Cell) -> Self {
        let (lo, hi) = cell.bounds();
        Stratum {
            cell,
            lo,
            hi,
            inv_volume: 1.0 / cell.volume(),
        }
    }

    /// `q(1 − q)`, skipping the clipping work where `q ∈ {0, 1}`.
    #[inline]
    fn variance_term(&self, x: &[f64]) -> f64 {
        if x.iter().zip(&self.lo).any(|(xi, l)| xi <= l) {
            return 0.0;
        }
        if x.iter().zip(&self.hi).all(|(xi, h)| xi >= h) {
            return 0.0;
        }
        let q = self.cell.anchored_measure(x) * self.inv_volume;
        q * (1.0 - q)
    }
}

fn check_cells(cells: &[Cell]) -> Result<usize> {
    let d = cells
        .first()
        .map(Cell::dim)
        .ok_or_else(|| Error::argument("empty partition"))?;
    if cells.iter().any(|c| c.dim() != d) {
        return Err(Error::argument("cells of mixed dimension"));
    }
    if d > MAX_EXPECTATION_DIM {
        return Err(Error::argument(format!(
            "tensor quadrature supports d <= {MAX_EXPECTATION_DIM}, got d = {d}"
        )));
    }
    Ok(d)
}

/// `E L2²` for an equivolume partition `cells` of the cuboid `domain`.
pub fn expected_l2_squared_quadrature_on(
    cells: &[Cell],
    domain: &[[f64; 2]],
    quad: &QuadratureSpec,
) -> Result<Estimate> {
    let d = check_cells(cells)?;
    if domain.len() != d {
        return Err(Error::argument("domain dimension does not match cells"));
    }
    let strata: Vec<Stratum> = cells.iter().map(Stratum::new).collect();
    let n = cells.len() as f64;
    let volume: f64 = domain.iter().map(|[a, b]| b - a).product();
    let scale = 1.0 / (n * n * volume);
    let est = estimate(domain, quad, |x| {
        strata.iter().map(|s| s.variance_term(x)).sum::<f64>()
    })?;
    Ok(Estimate {
        value: est.value * scale,
        error: est.error * scale,
    })
}

/// `E L2²` of the stratified sample of `partition` over `[0,1]^d`.
pub fn expected_l2_squared_quadrature(
    partition: &Partition,
    quad: &QuadratureSpec,
) -> Result<ExpectationResult> {
    let domain = vec![[0.0, 1.0]; partition.dim()];
    let est = expected_l2_squared_quadrature_on(partition.cells(), &domain, quad)?;
    Ok(ExpectationResult {
        value: est.value,
        error: est.error,
        method: Method::Quadrature,
        spec: partition.spec().copied(),
        spec2: None,
        replicates: None,
        grid: Some(quad.points_per_axis),
    })
}

/// `E L2²(a) − E L2²(b)` as one integral of the difference integrand.
///
/// Cells identical in both partitions cancel exactly and are skipped.
pub fn expected_difference_quadrature(
    a: &Partition,
    b: &Partition,
    quad: &QuadratureSpec,
) -> Result<ExpectationResult> {
    let d = check_cells(a.cells())?;
    if a.len() != b.len() || b.dim() != d {
        return Err(Error::argument(
            "partitions must have the same number of cells and dimension",
        ));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (ca, cb) in a.cells().iter().zip(b.cells()) {
        if ca != cb {
            plus.push(Stratum::new(ca));
            minus.push(Stratum::new(cb));
        }
    }
    let n = a.len() as f64;
    let domain = vec![[0.0, 1.0]; d];
    let est = estimate(&domain, quad, |x| {
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| p.variance_term(x) - m.variance_term(x))
            .sum::<f64>()
    })?;
    Ok(ExpectationResult {
        value: est.value / (n * n),
        error: est.error / (n * n),
        method: Method::Quadrature,
        spec: a.spec().copied(),
        spec2: b.spec().copied(),
        replicates: None,
        grid: Some(quad.points_per_axis),
    })
}

/// `B₁ = ∫_I q₁²` and `B₂ = ∫_I q₂²` over `I = [0,2] × [0,1]`, with `qᵢ` from
/// the closed-form piecewise expressions of [`building_block_q`].
pub fn building_block_b(theta: Theta, quad: &QuadratureSpec) -> Result<(Estimate, Estimate)> {
    let domain = [[0.0, 2.0], [0.0, 1.0]];
    let b = |cell: usize| {
        estimate(&domain, quad, |x| {
            let q = building_block_q(theta, cell, [x[0], x[1]]);
            q * q
        })
    };
    Ok((b(0)?, b(1)?))
}

/// Direct midpoint quadrature of `∫ Δ(P, z)² dz`.
///
/// Each axis is split at the point coordinates and every piece of length `ℓ`
/// gets `2⌈nℓ/2⌉` midpoint nodes, so the integrand is polynomial inside every
/// tensor cell. Intended as an independent check of [`super::l2_squared_exact`].
pub fn l2_squared_quadrature(points: &PointSet, quad: &QuadratureSpec) -> Result<Estimate> {
    points.check_unit_cube()?;
    let d = points.dim();
    if d > MAX_L2_ORACLE_DIM {
        return Err(Error::argument(format!(
            "direct L2 quadrature supports d <= {MAX_L2_ORACLE_DIM}, got d = {d}"
        )));
    }
    let fine_axes = graded_axes(points, quad.points_per_axis);
    let coarse_axes = graded_axes(points, quad.points_per_axis / 2);
    let total: u64 = fine_axes.iter().map(|a| a.len() as u64).product();
    if total > MAX_NODES {
        return Err(Error::argument("direct L2 quadrature grid too large"));
    }
    let fine = graded_sum(points, &fine_axes, quad.exec);
    let coarse = graded_sum(points, &coarse_axes, quad.exec);
    let value = if quad.refine {
        (4.0 * fine - coarse) / 3.0
    } else {
        fine
    };
    Ok(Estimate {
        value,
        error: (fine - coarse).abs(),
    })
}

/// Per-axis `(node, weight)` lists of the graded midpoint rule.
fn graded_axes(points: &PointSet, n: usize) -> Vec<Vec<(f64, f64)>> {
    (0..points.dim())
        .map(|k| {
            let mut breaks: Vec<f64> = points.iter().map(|p| p[k]).collect();
            breaks.push(0.0);
            breaks.push(1.0);
            breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            breaks.dedup();
            let mut nodes = Vec::new();
            for w in breaks.windows(2) {
                let len = w[1] - w[0];
                let count = 2 * ((n as f64 * len / 2.0).ceil() as usize).max(1);
                let h = len / count as f64;
                nodes.extend((0..count).map(|i| (w[0] + (i as f64 + 0.5) * h, h)));
            }
            nodes
        })
        .collect()
}

fn graded_sum(points: &PointSet, axes: &[Vec<(f64, f64)>], exec: Execution) -> f64 {
    let d = axes.len();
    let npts = points.len() as f64;
    let integrand = |z: &[f64]| {
        let volume: f64 = z.iter().product();
        let count = points
            .iter()
            .filter(|p| p.iter().zip(z).all(|(x, zk)| x < zk))
            .count();
        let delta = volume - count as f64 / npts;
        delta * delta
    };
    let inner: usize = axes[1..].iter().map(Vec::len).product();
    let rows_per_block = (4096 / inner.max(1)).max(1);
    let partial = map_blocks(axes[0].len(), rows_per_block, exec, |rows| {
        let mut z = vec![0.0; d];
        let mut idx = vec![0usize; d];
        let mut acc = CompensatedSum::default();
        for i0 in rows {
            let (z0, w0) = axes[0][i0];
            z[0] = z0;
            idx[1..].iter_mut().for_each(|i| *i = 0);
            for _ in 0..inner {
                let mut w = w0;
                for k in 1..d {
                    let (zk, wk) = axes[k][idx[k]];
                    z[k] = zk;
                    w *= wk;
                }
                acc.add(w * integrand(&z));
                for k in (1..d).rev() {
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        acc.value()
    });
    compensated_sum(partial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn resolution_validation() {
        assert!(QuadratureSpec::new(0).is_err());
        assert!(QuadratureSpec::new(1).is_err());
        assert!(QuadratureSpec::new(100).is_err());
        assert!(QuadratureSpec::new(64).is_ok());
    }

    #[test]
    fn midpoint_integrates_polynomials() {
        let q = QuadratureSpec::new(64).unwrap();
        let e = estimate(&[[0.0, 1.0], [0.0, 2.0]], &q, |x| x[0] * x[0] * x[1]).unwrap();
        // ∫₀¹ x² dx · ∫₀² y dy = 2/3; Richardson removes the h² term exactly.
        assert_abs_diff_eq!(e.value, 2.0 / 3.0, epsilon = 1e-13);
        assert!(e.error > 0.0);
    }

    #[test]
    fn trivial_partition_in_one_dimension() {
        let p = Partition::trivial(1).unwrap();
        let q = QuadratureSpec::new(1024).unwrap();
        let r = expected_l2_squared_quadrature(&p, &q).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 6.0, epsilon = 1e-12);
        assert_eq!(r.method, Method::Quadrature);
        assert!(r.replicates.is_none());
    }

    #[test]
    fn dimension_limits() {
        let p = Partition::trivial(5).unwrap();
        assert!(expected_l2_squared_quadrature(&p, &QuadratureSpec::new(4).unwrap()).is_err());
        let p = Partition::trivial(4).unwrap();
        assert!(
            expected_l2_squared_quadrature(&p, &QuadratureSpec::new(1 << 10).unwrap()).is_err()
        );
        let pts = PointSet::new(4, vec![0.5; 4]).unwrap();
        assert!(l2_squared_quadrature(&pts, &QuadratureSpec::new(8).unwrap()).is_err());
    }

    #[test]
    fn l2_oracle_single_point() {
        let q = QuadratureSpec::new(1 << 14).unwrap();
        let e = l2_squared_quadrature(&PointSet::new(1, vec![0.0]).unwrap(), &q).unwrap();
        assert_abs_diff_eq!(e.value, 1.0 / 3.0, epsilon = 1e-6);
        let c = QuadratureSpec::new(64).unwrap();
        let e = l2_squared_quadrature(&PointSet::new(2, vec![0.5, 0.5]).unwrap(), &c).unwrap();
        assert_abs_diff_eq!(e.value, 23.0 / 288.0, epsilon = 1e-4);
    }

    #[test]
    fn sequential_matches_parallel_bitwise() {
        let part = crate::geometry::build_partition(
            &crate::geometry::PartitionSpec::new(3, 2, Theta::QUARTER_PI).unwrap(),
        );
        let q = QuadratureSpec::new(128).unwrap();
        let a = expected_l2_squared_quadrature(&part, &q.with_execution(Execution::Sequential))
            .unwrap();
        let b =
            expected_l2_squared_quadrature(&part, &q.with_execution(Execution::Parallel)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn building_block_half_pi() {
        let (b1, b2) =
            building_block_b(Theta::HALF_PI, &QuadratureSpec::new(256).unwrap()).unwrap();
        assert_abs_diff_eq!(b1.value, 4.0 / 9.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b2.value, 1.0 / 9.0, epsilon = 1e-9);
    }
}
