//! The two-cell building block `I = [0,2] × [0,1]` and its placement.
//!
//! In block coordinates the cut passes through the centre `(1, ½)` with slope
//! `−tan θ`. For `tan θ ≥ ½` it meets the bottom and top edges at
//! `1 ± cot θ / 2`; for `tan θ < ½` it meets the left and right edges at
//! heights `½ ± tan θ`.

use super::{Cell, Polygon2, Theta, ThetaRegime};

enum Shape {
    Rect([f64; 2], [f64; 2]),
    Poly(Vec<[f64; 2]>),
}

fn block_shapes(theta: Theta) -> [Shape; 2] {
    if theta.is_half_pi() {
        return [
            Shape::Rect([0.0, 0.0], [1.0, 1.0]),
            Shape::Rect([1.0, 0.0], [2.0, 1.0]),
        ];
    }
    if theta.is_zero() {
        return [
            Shape::Rect([0.0, 0.0], [2.0, 0.5]),
            Shape::Rect([0.0, 0.5], [2.0, 1.0]),
        ];
    }
    match theta.regime() {
        ThetaRegime::Low => {
            let t = theta.tan();
            [
                Shape::Poly(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 0.5 - t], [0.0, 0.5 + t]]),
                Shape::Poly(vec![[0.0, 0.5 + t], [2.0, 0.5 - t], [2.0, 1.0], [0.0, 1.0]]),
            ]
        }
        ThetaRegime::Critical | ThetaRegime::High => {
            let h = 0.5 * theta.cot();
            [
                Shape::Poly(vec![[0.0, 0.0], [1.0 + h, 0.0], [1.0 - h, 1.0], [0.0, 1.0]]),
                Shape::Poly(vec![[1.0 + h, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0 - h, 1.0]]),
            ]
        }
    }
}

fn place(
    theta: Theta,
    map_x: impl Fn(f64) -> f64,
    map_y: impl Fn(f64) -> f64,
    extrusion: &[[f64; 2]],
) -> [Cell; 2] {
    block_shapes(theta).map(|shape| match shape {
        Shape::Rect(lo, hi) => Cell::Box {
            lo: [map_x(lo[0]), map_y(lo[1])]
                .into_iter()
                .chain(extrusion.iter().map(|e| e[0]))
                .collect(),
            hi: [map_x(hi[0]), map_y(hi[1])]
                .into_iter()
                .chain(extrusion.iter().map(|e| e[1]))
                .collect(),
        },
        Shape::Poly(v) => Cell::Prism {
            polygon: Polygon2::new(v.into_iter().map(|[u, w]| [map_x(u), map_y(w)]).collect())
                .expect("building-block cells are convex with positive area"),
            extrusion: extrusion.to_vec(),
        },
    })
}

/// The two cells of the unit building block `[0,2] × [0,1]`.
pub fn building_block_cells(theta: Theta) -> [Cell; 2] {
    place(theta, |u| u, |v| v, &[])
}

/// The two cells splitting the cuboid `anchor + scale · ([0,2] × [0,1]^{d−1})`.
pub fn local_block_cells(theta: Theta, anchor: &[f64], scale: f64) -> [Cell; 2] {
    let extrusion: Vec<[f64; 2]> = anchor[2..].iter().map(|a| [*a, a + scale]).collect();
    place(
        theta,
        |u| anchor[0] + scale * u,
        |v| anchor[1] + scale * v,
        &extrusion,
    )
}

/// Merged corner cells of the `m`-grid whose lower grid index is `corner`.
pub(super) fn corner_cells(
    theta: Theta,
    m: usize,
    corner: &[usize],
    extrusion: &[[f64; 2]],
) -> [Cell; 2] {
    let mf = m as f64;
    let (i0, i1) = (corner[0] as f64, corner[1] as f64);
    place(theta, |u| (i0 + u) / mf, |v| (i1 + v) / mf, extrusion)
}

/// `λ(Ωᵢ ∩ [0, x])` for cell `i ∈ {0, 1}` of the unit building block, from
/// the piecewise closed forms.
///
/// With `s` the signed offset of `x` from the cut, cell 1 meets `[0, x]`
/// only when `x` lies beyond the cut, in a triangle (`F`, `H`) or, once the
/// triangle would leave the block, a trapezoid (`G`, `J`). Cell 0 receives
/// the remainder `x₁x₂ − q₁`. `x` is clamped to the block.
///
/// # Panics
///
/// If `cell > 1`.
pub fn building_block_q(theta: Theta, cell: usize, x: [f64; 2]) -> f64 {
    assert!(cell <= 1, "building block has cells 0 and 1");
    let x1 = x[0].clamp(0.0, 2.0);
    let x2 = x[1].clamp(0.0, 1.0);
    let upper = match theta.regime() {
        ThetaRegime::Critical | ThetaRegime::High => q_upper_high(theta, x1, x2),
        ThetaRegime::Low => q_upper_low(theta, x1, x2),
    };
    if cell == 1 {
        upper
    } else {
        x1 * x2 - upper
    }
}

fn q_upper_high(theta: Theta, x1: f64, x2: f64) -> f64 {
    let c = theta.cot();
    let s = (x1 - 1.0) + (x2 - 0.5) * c;
    if s <= 0.0 {
        0.0
    } else if x1 <= 1.0 + 0.5 * c {
        // c > 0 here: at c = 0 this branch needs x1 > 1 and x1 ≤ 1.
        let t = theta.tan();
        0.5 * ((x1 - 1.0) * t + x2 - 0.5) * s
    } else {
        x1 * x2 - x2 - 0.5 * c * x2 + 0.5 * x2 * x2 * c
    }
}

fn q_upper_low(theta: Theta, x1: f64, x2: f64) -> f64 {
    let t = theta.tan();
    let r = x2 - 0.5 - (1.0 - x1) * t;
    if r <= 0.0 {
        0.0
    } else if x2 <= 0.5 + t {
        // t > 0 here: at t = 0 this branch needs x2 > ½ and x2 ≤ ½.
        let c = theta.cot();
        0.5 * r * (c * x2 - 1.0 + x1 - 0.5 * c)
    } else {
        (x2 - t - 0.5) * x1 + 0.5 * x1 * x1 * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_pi_examples() {
        assert_abs_diff_eq!(building_block_q(Theta::HALF_PI, 0, [1.5, 1.0]), 1.0);
        assert_abs_diff_eq!(building_block_q(Theta::HALF_PI, 1, [1.5, 0.5]), 0.25);
    }

    #[test]
    fn critical_example_matches_clipping() {
        assert_abs_diff_eq!(
            building_block_q(Theta::CRITICAL, 0, [1.0, 1.0]),
            0.75,
            epsilon = 1e-15
        );
        let [c0, _] = building_block_cells(Theta::CRITICAL);
        assert_abs_diff_eq!(c0.anchored_measure(&[1.0, 1.0]), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn block_cells_have_unit_area() {
        for th in [
            0.0,
            0.1,
            0.5f64.atan(),
            0.7,
            1.2,
            std::f64::consts::FRAC_PI_2,
        ] {
            for c in building_block_cells(Theta::new(th).unwrap()) {
                assert_abs_diff_eq!(c.volume(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn saturation_at_block_corner() {
        for th in [0.0, 0.2, 0.5f64.atan(), 1.0, std::f64::consts::FRAC_PI_2] {
            let th = Theta::new(th).unwrap();
            assert_abs_diff_eq!(building_block_q(th, 0, [2.0, 1.0]), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(building_block_q(th, 1, [2.0, 1.0]), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn local_block_is_translated_and_scaled() {
        let cells = local_block_cells(Theta::QUARTER_PI, &[0.2, 0.3, 0.4], 0.25);
        for c in &cells {
            assert_abs_diff_eq!(c.volume(), 2.0 * 0.25f64.powi(3) / 2.0, epsilon = 1e-15);
            let (lo, hi) = c.bounds();
            assert!(lo.iter().zip([0.2, 0.3, 0.4]).all(|(l, a)| *l >= a - 1e-15));
            assert!(hi[0] <= 0.7 + 1e-15 && hi[2] <= 0.65 + 1e-15);
        }
    }

    #[test]
    fn branches_agree_at_critical_angle() {
        let th = Theta::CRITICAL;
        for i in 0..=40 {
            for j in 0..=20 {
                let (x1, x2) = (i as f64 / 20.0, j as f64 / 20.0);
                assert_abs_diff_eq!(
                    q_upper_high(th, x1, x2),
                    q_upper_low(th, x1, x2),
                    epsilon = 1e-10
                );
            }
        }
    }
}
