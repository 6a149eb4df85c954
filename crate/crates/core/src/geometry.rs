//! Balls, cones, and tents in the upper half-space.
//!
//! All predicates use strict inequalities: balls and tents are open sets.
//! The boundaries have measure zero, so quadrature does not care, but the
//! predicates themselves are kept deterministic and consistent across
//! modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{unit_ball_volume, Point, MAX_DIM};

fn dist(dim: usize, a: &Point, b: &Point) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        let d = a[i] - b[i];
        s += d * d;
    }
    s.sqrt()
}

/// Open Euclidean ball B(x, r) in ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub dim: usize,
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(dim: usize, center: Point, radius: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidParam(format!("ball dimension {dim}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParam(format!("ball radius {radius}")));
        }
        Ok(Self {
            dim,
            center,
            radius,
        })
    }

    /// Ball centered at the origin.
    pub fn centered(dim: usize, radius: f64) -> Result<Self> {
        Ball::new(dim, [0.0; MAX_DIM], radius)
    }

    pub fn contains(&self, p: &Point) -> bool {
        dist(self.dim, &self.center, p) < self.radius
    }

    /// Concentric ball with radius λ·r.
    pub fn dilate(&self, lambda: f64) -> Result<Ball> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParam(format!("dilation factor {lambda}")));
        }
        Ball::new(self.dim, self.center, lambda * self.radius)
    }

    /// Lebesgue measure ωₙ rⁿ.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim) * self.radius.powi(self.dim as i32)
    }
}

/// Membership in the open cone of aperture α over x: |y − x| < α t.
pub fn cone_contains(dim: usize, x: &Point, alpha: f64, t: f64, y: &Point) -> bool {
    debug_assert!(alpha > 0.0 && t > 0.0);
    dist(dim, x, y) < alpha * t
}

/// Tent of aperture α above an open ball: the set of (t, y) with
/// 0 < t < r/α and |y − x| < r − αt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tent {
    pub ball: Ball,
    pub aperture: f64,
}

impl Tent {
    pub fn new(ball: Ball, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0) || !aperture.is_finite() {
            return Err(Error::InvalidParam(format!("tent aperture {aperture}")));
        }
        Ok(Self { ball, aperture })
    }

    pub fn contains(&self, t: f64, y: &Point) -> bool {
        if !(t > 0.0 && t < self.ball.radius / self.aperture) {
            return false;
        }
        dist(self.ball.dim, &self.ball.center, y) < self.ball.radius - self.aperture * t
    }

    /// Height of the tent, r/α.
    pub fn height(&self) -> f64 {
        self.ball.radius / self.aperture
    }
}

/// Outcome of a sampled inclusion check: `None` means no counterexample.
pub type InclusionWitness = Option<(f64, Point)>;

/// Check the two tent inclusions used in the p = ∞ argument by random
/// sampling: T_αB ⊂ T₁B and T₁B ⊂ T_α(αB) for α ≥ 1. Returns the first
/// violating point, if any.
pub fn tent_inclusion_witness(
    ball: &Ball,
    alpha: f64,
    samples: &[(f64, Point)],
) -> Result<InclusionWitness> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "tent inclusions need aperture >= 1, got {alpha}"
        )));
    }
    let t1 = Tent::new(*ball, 1.0)?;
    let ta = Tent::new(*ball, alpha)?;
    let ta_dilated = Tent::new(ball.dilate(alpha)?, alpha)?;
    for &(t, y) in samples {
        if ta.contains(t, &y) && !t1.contains(t, &y) {
            return Ok(Some((t, y)));
        }
        if t1.contains(t, &y) && !ta_dilated.contains(t, &y) {
            return Ok(Some((t, y)));
        }
    }
    Ok(None)
}
