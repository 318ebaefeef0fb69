//! Stratified samples: one uniform point per cell.
//!
//! Variates come from counter-based substreams (see [`CellStream`]), so a
//! sample is a pure function of the partition and the [`SeedSpec`]. Grid
//! boxes shared by all members of the family draw from a substream keyed
//! only on `(seed, replicate, cell)`; the two θ-dependent cells also key on
//! `θ`. Two partitions with the same `m`, `d` therefore place identical
//! points in every shared box, which is the coupling used for low-variance
//! estimates of expectation differences.

mod stream;

use serde::{Deserialize, Serialize};

pub use stream::{CellStream, SHARED_TAG};

use crate::discrepancy::PointSet;
use crate::error::{Error, Result};
use crate::geometry::{build_partition, Cell, Partition, PartitionSpec};

/// Seed and replicate index addressing one family of substreams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub replicate: u64,
}

impl SeedSpec {
    pub fn new(seed: u64, replicate: u64) -> Self {
        SeedSpec { seed, replicate }
    }
}

/// `N` points, point `i` drawn uniformly from cell `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StratifiedSample {
    pub points: PointSet,
    pub spec: Option<PartitionSpec>,
    pub seed: SeedSpec,
}

/// Variates consumed per cell in dimension `d`.
pub fn variates_per_cell(d: usize) -> usize {
    d + 1
}

/// Draws one point uniformly from `cell`, consuming exactly `dim + 1` variates.
///
/// Boxes use one variate per axis and discard the last. Prisms use one
/// variate to pick a fan triangle with probability proportional to its area,
/// two for a reflected barycentric point in that triangle, and one per
/// extruded axis.
pub fn sample_uniform_in_cell(cell: &Cell, stream: &mut CellStream) -> Vec<f64> {
    let mut out = Vec::with_capacity(cell.dim());
    sample_into(cell, stream, &mut out);
    out
}

fn sample_into(cell: &Cell, stream: &mut CellStream, out: &mut Vec<f64>) {
    match cell {
        Cell::Box { lo, hi } => {
            for (l, h) in lo.iter().zip(hi) {
                out.push(l + (h - l) * stream.next_unit());
            }
            stream.next_unit();
        }
        Cell::Prism { polygon, extrusion } => {
            let pick = stream.next_unit() * polygon.area();
            let (mut u, mut v) = (stream.next_unit(), stream.next_unit());
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            let mut acc = 0.0;
            let mut chosen = None;
            for tri in polygon.fan() {
                chosen = Some(tri);
                acc += triangle_area(&tri);
                if pick < acc {
                    break;
                }
            }
            let [a, b, c] = chosen.expect("a polygon has at least one fan triangle");
            out.push(a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]));
            out.push(a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]));
            for [l, h] in extrusion {
                out.push(l + (h - l) * stream.next_unit());
            }
        }
    }
}

fn triangle_area([a, b, c]: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn modified_tag(spec: &PartitionSpec) -> u64 {
    spec.theta().radians().to_bits().wrapping_add(1)
}

/// Appends one point per cell of `partition` to `out` (row-major).
pub(crate) fn sample_partition_into(partition: &Partition, seed: SeedSpec, out: &mut Vec<f64>) {
    let d = partition.dim();
    let per = variates_per_cell(d);
    let split = partition.modified_cells();
    let cells = partition.cells();
    if let Some(spec) = partition.spec() {
        let mut s = CellStream::new(seed.seed, modified_tag(spec), seed.replicate, 0, per);
        for cell in &cells[..split] {
            sample_into(cell, &mut s, out);
        }
    }
    let mut s = CellStream::new(seed.seed, SHARED_TAG, seed.replicate, split, per);
    for cell in &cells[split..] {
        sample_into(cell, &mut s, out);
    }
}

/// Draws the stratified point set of a built partition.
pub fn sample_partition(partition: &Partition, seed: SeedSpec) -> StratifiedSample {
    let mut coords = Vec::with_capacity(partition.len() * partition.dim());
    sample_partition_into(partition, seed, &mut coords);
    StratifiedSample {
        points: PointSet::new(partition.dim(), coords).expect("one full point per cell"),
        spec: partition.spec().copied(),
        seed,
    }
}

/// Builds the partition for `spec` and draws its stratified point set.
pub fn generate_stratified(spec: &PartitionSpec, seed: SeedSpec) -> StratifiedSample {
    sample_partition(&build_partition(spec), seed)
}

/// Draws coupled samples for two partitions sharing `m` and `d`.
///
/// Shared grid boxes receive identical points; the θ-dependent cells are
/// independent unless the angles coincide. Each output equals
/// [`generate_stratified`] for its own spec.
pub fn generate_coupled(
    spec_a: &PartitionSpec,
    spec_b: &PartitionSpec,
    seed: SeedSpec,
) -> Result<(StratifiedSample, StratifiedSample)> {
    check_coupled(spec_a, spec_b)?;
    Ok((
        generate_stratified(spec_a, seed),
        generate_stratified(spec_b, seed),
    ))
}

pub(crate) fn check_coupled(a: &PartitionSpec, b: &PartitionSpec) -> Result<()> {
    if a.m() != b.m() || a.d() != b.d() {
        return Err(Error::argument(format!(
            "coupled partitions must share m and d: (m={}, d={}) vs (m={}, d={})",
            a.m(),
            a.d(),
            b.m(),
            b.d()
        )));
    }
    Ok(())
}
