//! L2-discrepancy of point sets and the expected L2² of stratified samples.
//!
//! For a point set `P` of size `N` in `[0,1]^d` the discrepancy function is
//! `Δ(P, z) = λ([0, z)) − #(P ∩ [0, z)) / N` and `L2²(P) = ∫ Δ(P, z)² dz`.

pub mod monte_carlo;
pub mod quadrature;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::PartitionSpec;
use crate::par::CompensatedSum;

pub use monte_carlo::{
    expected_difference_mc, expected_difference_mc_with, expected_l2_squared_mc,
    expected_l2_squared_mc_with,
};
pub use quadrature::{
    building_block_b, expected_difference_quadrature, expected_l2_squared_quadrature,
    expected_l2_squared_quadrature_on, l2_squared_quadrature, Estimate, QuadratureSpec,
};

/// `N` points of dimension `d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::argument("point dimension must be positive"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::argument(format!(
                "{} coordinates do not form {dim}-dimensional points",
                coords.len()
            )));
        }
        Ok(PointSet { dim, coords })
    }

    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.as_ref().len())
            .ok_or_else(|| Error::argument("empty point set"))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.as_ref().len() != dim {
                return Err(Error::argument("points of mixed dimension"));
            }
            coords.extend_from_slice(p.as_ref());
        }
        PointSet::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    fn check_unit_cube(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::argument("empty point set"));
        }
        if self.coords.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::argument("points must lie in [0,1]^d"));
        }
        Ok(())
    }
}

/// `Δ(P, z)` with half-open counting boxes `[0, z)`.
pub fn local_discrepancy(points: &PointSet, z: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::argument("empty point set"));
    }
    if z.len() != points.dim() {
        return Err(Error::argument("anchor dimension does not match points"));
    }
    let volume: f64 = z.iter().product();
    let count = points
        .iter()
        .filter(|p| p.iter().zip(z).all(|(x, zk)| x < zk))
        .count();
    Ok(volume - count as f64 / points.len() as f64)
}

/// Exact `L2²(P)` by expanding the square of the discrepancy function:
///
/// `3^{−d} − (2/N) Σᵢ ∏ₖ (1 − xᵢₖ²)/2 + (1/N²) Σᵢ Σⱼ ∏ₖ (1 − max(xᵢₖ, xⱼₖ))`.
///
/// The pair sum runs over `i ≤ j` with compensated accumulation; `O(N² d)`.
pub fn l2_squared_exact(points: &PointSet) -> Result<f64> {
    points.check_unit_cube()?;
    Ok(l2_squared_unchecked(points.coords(), points.dim()))
}

pub(crate) fn l2_squared_unchecked(coords: &[f64], dim: usize) -> f64 {
    let n = coords.len() / dim;
    let nf = n as f64;
    let rows: Vec<&[f64]> = coords.chunks_exact(dim).collect();

    let mut cross = CompensatedSum::default();
    for p in &rows {
        cross.add(p.iter().map(|x| 0.5 * (1.0 - x * x)).product());
    }

    let mut diag = CompensatedSum::default();
    let mut off = CompensatedSum::default();
    for (i, p) in rows.iter().enumerate() {
        diag.add(p.iter().map(|x| 1.0 - x).product());
        for q in &rows[i + 1..] {
            off.add(p.iter().zip(*q).map(|(a, b)| 1.0 - a.max(*b)).product());
        }
    }
    let pair = diag.value() + 2.0 * off.value();
    let value = 3f64.powi(-(dim as i32)) - 2.0 / nf * cross.value() + pair / (nf * nf);
    value.max(0.0)
}

/// How an [`ExpectationResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// A value of `E[L2²]`, or of a difference of two such expectations.
///
/// `error` is the quadrature error estimate or the Monte Carlo standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationResult {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    pub spec: Option<PartitionSpec>,
    /// Second partition when `value` is a difference `E(spec) − E(spec2)`.
    pub spec2: Option<PartitionSpec>,
    pub replicates: Option<u64>,
    pub grid: Option<usize>,
}

impl Serialize for ExpectationResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("method", &self.method)?;
        map.serialize_entry("value", &self.value)?;
        map.serialize_entry("error", &self.error)?;
        if let Some(spec) = &self.spec {
            map.serialize_entry("m", &spec.m())?;
            map.serialize_entry("d", &spec.d())?;
            map.serialize_entry("theta", &spec.theta())?;
        }
        if let Some(spec2) = &self.spec2 {
            map.serialize_entry("theta2", &spec2.theta())?;
        }
        if let Some(r) = self.replicates {
            map.serialize_entry("replicates", &r)?;
        }
        if let Some(g) = self.grid {
            map.serialize_entry("grid", &g)?;
        }
        map.end()
    }
}
