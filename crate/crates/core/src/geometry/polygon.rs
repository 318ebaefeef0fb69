//! Convex polygons and Sutherland–Hodgman clipping against axis-aligned
//! half-planes.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Absolute tolerance for vertex deduplication and degeneracy checks.
pub const GEOMETRY_TOL: f64 = 1e-12;

type Ring = SmallVec<[[f64; 2]; 8]>;

/// A convex polygon with counterclockwise vertices and positive area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polygon2 {
    vertices: Vec<[f64; 2]>,
}

impl Polygon2 {
    /// Builds a polygon from vertices given in either orientation.
    ///
    /// Consecutive vertices closer than [`GEOMETRY_TOL`] are merged, and the
    /// ring is reoriented counterclockwise.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let mut ring: Vec<[f64; 2]> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if ring.last().is_none_or(|&p| !close(p, v)) {
                ring.push(v);
            }
        }
        while ring.len() > 1 && close(ring[0], ring[ring.len() - 1]) {
            ring.pop();
        }
        if ring.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} distinct vertices, need at least 3",
                ring.len()
            )));
        }
        let signed = signed_area(&ring);
        if signed.abs() <= GEOMETRY_TOL {
            return Err(Error::InvalidPolygon("zero area".into()));
        }
        if signed < 0.0 {
            ring.reverse();
        }
        let n = ring.len();
        for i in 0..n {
            let (a, b, c) = (ring[i], ring[(i + 1) % n], ring[(i + 2) % n]);
            if cross(a, b, c) < -GEOMETRY_TOL {
                return Err(Error::InvalidPolygon("not convex".into()));
            }
        }
        Ok(Polygon2 { vertices: ring })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> [f64; 2] {
        let v = &self.vertices;
        let n = v.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            let w = p[0] * q[1] - q[0] * p[1];
            a2 += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (3.0 * a2), cy / (3.0 * a2)]
    }

    /// Axis-aligned bounding box as `(lo, hi)`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Point-in-polygon test with an absolute boundary tolerance.
    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        (0..n).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            cross(a, b, p) >= -tol * len
        })
    }

    /// Area of the intersection with the lower-left quadrant `{x ≤ x1, y ≤ x2}`.
    pub fn clipped_lower_left_area(&self, x1: f64, x2: f64) -> f64 {
        let ring: Ring = self.vertices.iter().copied().collect();
        let ring = clip_axis(&ring, 0, x1, true);
        let ring = clip_axis(&ring, 1, x2, true);
        ring_area(&ring)
    }

    /// Area of the intersection with the rectangle `[lo, hi]`.
    pub fn clipped_rect_area(&self, lo: [f64; 2], hi: [f64; 2]) -> f64 {
        let mut ring: Ring = self.vertices.iter().copied().collect();
        for k in 0..2 {
            ring = clip_axis(&ring, k, hi[k], true);
            ring = clip_axis(&ring, k, lo[k], false);
        }
        ring_area(&ring)
    }

    /// Fan triangulation from the first vertex.
    pub fn fan(&self) -> impl Iterator<Item = [[f64; 2]; 3]> + '_ {
        let v = &self.vertices;
        (1..v.len() - 1).map(move |k| [v[0], v[k], v[k + 1]])
    }
}

impl TryFrom<Vec<[f64; 2]>> for Polygon2 {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Polygon2::new(v)
    }
}

impl From<Polygon2> for Vec<[f64; 2]> {
    fn from(p: Polygon2) -> Self {
        p.vertices
    }
}

fn close(a: [f64; 2], b: [f64; 2]) -> bool {
    (a[0] - b[0]).abs() <= GEOMETRY_TOL && (a[1] - b[1]).abs() <= GEOMETRY_TOL
}

#[inline]
fn cross(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    0.5 * twice
}

fn ring_area(ring: &Ring) -> f64 {
    if ring.len() < 3 {
        0.0
    } else {
        signed_area(ring).max(0.0)
    }
}

/// Keeps the part of `ring` with `p[axis] <= bound` (or `>= bound` when
/// `keep_below` is false). Output may be degenerate; callers take its area.
fn clip_axis(ring: &Ring, axis: usize, bound: f64, keep_below: bool) -> Ring {
    let dist = |p: [f64; 2]| {
        if keep_below {
            p[axis] - bound
        } else {
            bound - p[axis]
        }
    };
    let mut out = Ring::new();
    let n = ring.len();
    if n == 0 {
        return out;
    }
    for i in 0..n {
        let s = ring[i];
        let e = ring[(i + 1) % n];
        let (ds, de) = (dist(s), dist(e));
        let s_in = ds <= 0.0;
        let e_in = de <= 0.0;
        if s_in != e_in {
            let t = ds / (ds - de);
            let mut p = [s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t];
            p[axis] = bound;
            out.push(p);
        }
        if e_in {
            out.push(e);
        }
    }
    out
}
