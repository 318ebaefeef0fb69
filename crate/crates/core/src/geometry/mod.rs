//! The θ-family of convex equivolume partitions of `[0,1]^d`.
//!
//! A partition keeps the `m^d` grid of boxes of side `b = 1/m` except for two
//! adjacent boxes in the top row, which are merged into the cuboid
//! `[a₁, a₁+2b] × [a₂, a₂+b] × [a₃, a₃+b] × …` with `a₁ = (m−2)/m` and
//! `aᵢ = (m−1)/m` otherwise. The cuboid is then cut through its centre by a
//! hyperplane containing coordinates `3..d` whose trace in coordinates 1–2 is
//! a line at angle `θ` to the horizontal, falling to the right.
//!
//! Cells 0 and 1 of a [`Partition`] are the two halves of the cuboid (cell 0
//! contains its lower-left corner); cells `2..N` are the remaining grid boxes.
//!
//! Boundary conventions: anchored boxes used for cell measures are closed,
//! `[0, x]`; point-counting boxes used by the discrepancy are half-open,
//! `[0, z)`. Both differ from the other only on null sets.

mod block;
mod polygon;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use block::{building_block_cells, building_block_q, local_block_cells};
pub use polygon::{Polygon2, GEOMETRY_TOL};

/// Which analytic branch of the construction applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaRegime {
    /// `tan θ < ½`: the cut runs from the left face to the right face.
    Low,
    /// `tan θ = ½`: the cut joins opposite corners; cells are triangles.
    Critical,
    /// `tan θ > ½`: the cut runs from the bottom face to the top face.
    High,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Repr {
    Zero,
    Critical,
    QuarterPi,
    HalfPi,
    Radians(f64),
}

/// A cut angle in `[0, π/2]`.
///
/// The named angles `0`, `arctan ½`, `π/4` and `π/2` are held symbolically so
/// their tangents are exact; a radian value bit-equal to the `f64` nearest one
/// of them is normalised to the named angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theta(Repr);

impl Theta {
    pub const ZERO: Theta = Theta(Repr::Zero);
    /// `arctan ½`.
    pub const CRITICAL: Theta = Theta(Repr::Critical);
    pub const QUARTER_PI: Theta = Theta(Repr::QuarterPi);
    pub const HALF_PI: Theta = Theta(Repr::HalfPi);

    pub fn new(radians: f64) -> Result<Theta> {
        if !(0.0..=FRAC_PI_2).contains(&radians) {
            return Err(Error::ThetaDomain(radians));
        }
        let repr = if radians == 0.0 {
            Repr::Zero
        } else if radians == FRAC_PI_2 {
            Repr::HalfPi
        } else if radians == FRAC_PI_4 {
            Repr::QuarterPi
        } else if radians == 0.5f64.atan() {
            Repr::Critical
        } else {
            Repr::Radians(radians)
        };
        Ok(Theta(repr))
    }

    pub fn radians(self) -> f64 {
        match self.0 {
            Repr::Zero => 0.0,
            Repr::Critical => 0.5f64.atan(),
            Repr::QuarterPi => FRAC_PI_4,
            Repr::HalfPi => FRAC_PI_2,
            Repr::Radians(r) => r,
        }
    }

    /// `tan θ`; infinite at `π/2`.
    pub fn tan(self) -> f64 {
        match self.0 {
            Repr::Zero => 0.0,
            Repr::Critical => 0.5,
            Repr::QuarterPi => 1.0,
            Repr::HalfPi => f64::INFINITY,
            Repr::Radians(r) => r.tan(),
        }
    }

    /// `cot θ`, computed as `cos θ / sin θ`; infinite at `0`.
    pub fn cot(self) -> f64 {
        match self.0 {
            Repr::Zero => f64::INFINITY,
            Repr::Critical => 2.0,
            Repr::QuarterPi => 1.0,
            Repr::HalfPi => 0.0,
            Repr::Radians(r) => r.cos() / r.sin(),
        }
    }

    pub fn regime(self) -> ThetaRegime {
        match self.0 {
            Repr::Zero => ThetaRegime::Low,
            Repr::Critical => ThetaRegime::Critical,
            Repr::QuarterPi | Repr::HalfPi => ThetaRegime::High,
            Repr::Radians(r) => match r.tan().partial_cmp(&0.5) {
                Some(std::cmp::Ordering::Less) => ThetaRegime::Low,
                Some(std::cmp::Ordering::Equal) => ThetaRegime::Critical,
                _ => ThetaRegime::High,
            },
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == Repr::Zero
    }

    pub fn is_half_pi(self) -> bool {
        self.0 == Repr::HalfPi
    }

    /// Parses a radian literal or one of the tokens `zero`, `critical`,
    /// `quarter-pi`, `half-pi`.
    pub fn parse(s: &str) -> Result<Theta> {
        match s.trim() {
            "zero" => Ok(Theta::ZERO),
            "critical" => Ok(Theta::CRITICAL),
            "quarter-pi" => Ok(Theta::QUARTER_PI),
            "half-pi" => Ok(Theta::HALF_PI),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::argument(format!("cannot parse theta from {other:?}")))
                .and_then(Theta::new),
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::fmt_f64(self.radians()))
    }
}

impl Serialize for Theta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.radians())
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = f64::deserialize(d)?;
        Theta::new(r).map_err(serde::de::Error::custom)
    }
}

/// Classifies `θ` (radians) by exact comparison of `tan θ` against `½`.
pub fn regime_of(theta: f64) -> Result<ThetaRegime> {
    Ok(Theta::new(theta)?.regime())
}

/// Parameters `(m, d, θ)` naming one partition of the family; `N = m^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct PartitionSpec {
    m: usize,
    d: usize,
    theta: Theta,
}

#[derive(Deserialize)]
struct RawSpec {
    m: usize,
    d: usize,
    theta: Theta,
}

impl TryFrom<RawSpec> for PartitionSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        PartitionSpec::new(r.m, r.d, r.theta)
    }
}

impl PartitionSpec {
    /// Requires `m ≥ d ≥ 2` and `m^d` representable.
    pub fn new(m: usize, d: usize, theta: Theta) -> Result<Self> {
        if d < 2 || m < d {
            return Err(Error::InvalidSpec(format!(
                "need m >= d >= 2, got m = {m}, d = {d}"
            )));
        }
        let exp = u32::try_from(d).map_err(|_| Error::InvalidSpec("d too large".into()))?;
        m.checked_pow(exp)
            .ok_or_else(|| Error::InvalidSpec(format!("m^d overflows for m = {m}, d = {d}")))?;
        Ok(PartitionSpec { m, d, theta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }

    /// Number of cells, `m^d`.
    pub fn n(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    /// Same `m`, `d` with a different angle.
    pub fn with_theta(&self, theta: Theta) -> Self {
        PartitionSpec { theta, ..*self }
    }

    /// Lower corner of the merged cuboid.
    pub fn anchor(&self) -> Vec<f64> {
        let m = self.m as f64;
        let mut a = vec![(m - 1.0) / m; self.d];
        a[0] = (m - 2.0) / m;
        a
    }

    /// Grid side `1/m`.
    pub fn side(&self) -> f64 {
        1.0 / self.m as f64
    }
}

/// One stratum of a partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Cell {
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Convex polygon in coordinates 1–2 times a box in coordinates `3..d`.
    Prism {
        polygon: Polygon2,
        #[serde(rename = "box")]
        extrusion: Vec<[f64; 2]>,
    },
}

impl Cell {
    pub fn unit_box(d: usize) -> Cell {
        Cell::Box {
            lo: vec![0.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cell::Box { lo, .. } => lo.len(),
            Cell::Prism { extrusion, .. } => 2 + extrusion.len(),
        }
    }

    /// Lebesgue measure.
    pub fn volume(&self) -> f64 {
        match self {
            Cell::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
            Cell::Prism { polygon, extrusion } => {
                polygon.area() * extrusion.iter().map(|[l, h]| h - l).product::<f64>()
            }
        }
    }

    /// Bounding box `(lo, hi)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Cell::Box { lo, hi } => (lo.clone(), hi.clone()),
            Cell::Prism { polygon, extrusion } => {
                let (plo, phi) = polygon.bounds();
                let lo = plo.iter().copied().chain(extrusion.iter().map(|e| e[0]));
                let hi = phi.iter().copied().chain(extrusion.iter().map(|e| e[1]));
                (lo.collect(), hi.collect())
            }
        }
    }

    /// `λ(cell ∩ [0, x])`. Coordinates of `x` beyond the cell's extent are
    /// effectively clamped, so any `x` in `[0,1]^d` is accepted.
    pub fn anchored_measure(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            Cell::Box { lo, hi } => {
                let mut v = 1.0;
                for ((l, h), xi) in lo.iter().zip(hi).zip(x) {
                    if *xi <= *l {
                        return 0.0;
                    }
                    v *= xi.min(*h) - l;
                }
                v
            }
            Cell::Prism { polygon, extrusion } => {
                let mut v = 1.0;
                for ([l, h], xi) in extrusion.iter().zip(&x[2..]) {
                    if *xi <= *l {
                        return 0.0;
                    }
                    v *= xi.min(*h) - l;
                }
                v * polygon.clipped_lower_left_area(x[0], x[1])
            }
        }
    }

    /// Closed containment with absolute tolerance `tol`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        let inside = |(x, [l, h]): (&f64, [f64; 2])| *x >= l - tol && *x <= h + tol;
        match self {
            Cell::Box { lo, hi } => p
                .iter()
                .zip(lo.iter().zip(hi).map(|(l, h)| [*l, *h]))
                .all(inside),
            Cell::Prism { polygon, extrusion } => {
                polygon.contains([p[0], p[1]], tol)
                    && p[2..].iter().zip(extrusion.iter().copied()).all(inside)
            }
        }
    }
}

/// An equivolume partition of `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    spec: Option<PartitionSpec>,
    cells: Vec<Cell>,
}

impl Partition {
    /// The single-cell partition `{[0,1]^d}`.
    pub fn trivial(d: usize) -> Result<Partition> {
        if d == 0 {
            return Err(Error::argument("dimension must be positive"));
        }
        Ok(Partition {
            spec: None,
            cells: vec![Cell::unit_box(d)],
        })
    }

    pub fn spec(&self) -> Option<&PartitionSpec> {
        self.spec.as_ref()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cells[0].dim()
    }

    /// Cells whose geometry depends on `θ` (the two halves of the merged cuboid).
    pub fn modified_cells(&self) -> usize {
        if self.spec.is_some() {
            2
        } else {
            0
        }
    }

    /// Indices of cells containing `p` (closed, with tolerance).
    pub fn locate(&self, p: &[f64], tol: f64) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].contains(p, tol))
            .collect()
    }
}

/// Builds the partition named by `spec`.
///
/// Grid boxes are listed with coordinate 1 varying fastest.
pub fn build_partition(spec: &PartitionSpec) -> Partition {
    let (m, d) = (spec.m, spec.d);
    let mf = m as f64;
    let mut cells = Vec::with_capacity(spec.n());
    let corner: Vec<usize> = (0..d).map(|k| if k == 0 { m - 2 } else { m - 1 }).collect();
    let extrusion: Vec<[f64; 2]> = (2..d).map(|k| grid_interval(corner[k], mf)).collect();
    let [c0, c1] = block::corner_cells(spec.theta, m, &corner, &extrusion);
    cells.push(c0);
    cells.push(c1);

    let mut idx = vec![0usize; d];
    for _ in 0..spec.n() {
        let merged = idx[1..].iter().all(|&i| i == m - 1) && idx[0] >= m - 2;
        if !merged {
            let (lo, hi) = idx
                .iter()
                .map(|&i| grid_interval(i, mf))
                .map(|[l, h]| (l, h))
                .unzip();
            cells.push(Cell::Box { lo, hi });
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i < m {
                break;
            }
            *i = 0;
        }
    }
    debug_assert_eq!(cells.len(), spec.n());
    Partition {
        spec: Some(*spec),
        cells,
    }
}

fn grid_interval(i: usize, m: f64) -> [f64; 2] {
    [i as f64 / m, (i + 1) as f64 / m]
}
