//! Closed forms for the θ-family.
//!
//! With `t = tan θ` and `c = cot θ`, the correction coefficient is
//!
//! ```text
//! P(θ) = (2/45)t³ + (2/15)t² − t/6            tan θ < ½
//!      = −2/45                                tan θ = ½
//!      = −c/24 + c²/120 + c³/1440             tan θ > ½
//! ```
//!
//! and `E L2²(θ) − E L2²(π/2) = P(θ) / (N³ · 3^{d−2})`. The low branch is
//! evaluated in `t` (exact at `θ = 0`), the high branch in `c` (exact at
//! `θ = π/2`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{PartitionSpec, Theta, ThetaRegime};

/// Low-angle branch of `P` as a function of `t = tan θ`.
pub fn p_low(t: f64) -> f64 {
    (2.0 / 45.0) * t * t * t + (2.0 / 15.0) * t * t - t / 6.0
}

/// High-angle branch of `P` as a function of `c = cot θ`.
pub fn p_high(c: f64) -> f64 {
    -c / 24.0 + c * c / 120.0 + c * c * c / 1440.0
}

pub fn p_theta(theta: Theta) -> f64 {
    match theta.regime() {
        ThetaRegime::Low => p_low(theta.tan()),
        ThetaRegime::Critical => -2.0 / 45.0,
        ThetaRegime::High => p_high(theta.cot()),
    }
}

/// `E L2²(Ω_θ) − E L2²(Ω_{π/2})` for the partition named by `spec`.
pub fn expected_difference_closed(spec: &PartitionSpec) -> f64 {
    p_theta(spec.theta()) * difference_scale(spec)
}

/// `1 / (N³ · 3^{d−2})`.
pub(crate) fn difference_scale(spec: &PartitionSpec) -> f64 {
    let n = spec.n() as f64;
    1.0 / (n * n * n * 3f64.powi(spec.d() as i32 - 2))
}

/// `(B₁, B₂) = (∫_I q₁², ∫_I q₂²)` over the building block `I = [0,2] × [0,1]`.
pub fn building_block_closed(theta: Theta) -> (f64, f64) {
    match theta.regime() {
        ThetaRegime::Low => {
            let t = theta.tan();
            let (t2, t3) = (t * t, t * t * t);
            (
                -(4.0 / 45.0) * t3 - (4.0 / 15.0) * t2 + t / 3.0 + 4.0 / 9.0,
                (2.0 / 45.0) * t3 + (2.0 / 15.0) * t2 - t / 6.0 + 1.0 / 9.0,
            )
        }
        ThetaRegime::Critical | ThetaRegime::High => {
            let c = theta.cot();
            let (c2, c3) = (c * c, c * c * c);
            (
                c / 12.0 - c2 / 60.0 - c3 / 720.0 + 4.0 / 9.0,
                1.0 / 9.0 - c / 24.0 + c2 / 120.0 + c3 / 1440.0,
            )
        }
    }
}

/// Upper bound on `E L2²` for the partition named by `spec`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub d: usize,
    pub theta: Theta,
    /// `d / N^{1 + 1/d}`.
    pub base_term: f64,
    /// `P(θ) / (N³ · 3^{d−2})`.
    pub correction: f64,
    pub total: f64,
    /// `d · N^{1 − 1/d}`, the bound on boxes met by a test-box boundary.
    pub cn_bound: f64,
}

pub fn upper_bound(spec: &PartitionSpec) -> Result<BoundReport> {
    let (m, d) = (spec.m(), spec.d());
    if m < d || d < 2 {
        return Err(Error::InvalidSpec(format!(
            "need m >= d >= 2, got m = {m}, d = {d}"
        )));
    }
    let n = spec.n() as f64;
    let df = d as f64;
    let base_term = df / n.powf(1.0 + 1.0 / df);
    let correction = expected_difference_closed(spec);
    Ok(BoundReport {
        m,
        d,
        theta: spec.theta(),
        base_term,
        correction,
        total: base_term + correction,
        cn_bound: df * n.powf(1.0 - 1.0 / df),
    })
}
