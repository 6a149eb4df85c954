//! Tent-space (quasi-)norms for 0 < p ≤ ∞ and the sharp-rate functions
//! h̲, h̄ controlling the change of aperture.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{carleson_norm, cone_square_function, SpatialField};
use crate::grid::GridFunction;

/// The integrability exponent p ∈ (0, ∞].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParam(format!("exponent p = {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// n/p, with the convention n/∞ = 0.
    pub fn dim_over_p(&self, dim: usize) -> f64 {
        match self {
            Exponent::Finite(p) => dim as f64 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParam(format!("exponent {other:?}")))?;
                Exponent::finite(p)
            }
        }
    }
}

/// Parameters of a tent space T^{p,2}_α over ℝⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TentSpaceParams {
    pub p: Exponent,
    pub alpha: f64,
    pub dim: usize,
}

impl TentSpaceParams {
    pub fn new(p: Exponent, alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParam(format!("aperture {alpha}")));
        }
        Ok(Self { p, alpha, dim })
    }

    /// τ = min(p, 2).
    pub fn tau(&self) -> f64 {
        match self.p {
            Exponent::Finite(p) => p.min(2.0),
            Exponent::Infinity => 2.0,
        }
    }

    /// σ = max(p, 2); ∞ for p = ∞.
    pub fn sigma(&self) -> f64 {
        match self.p {
            Exponent::Finite(p) => p.max(2.0),
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

/// L^p quasi-norm of a spatial field: (Σ |F(x)|^p w_y)^{1/p}.
pub fn lp_quasinorm(field: &SpatialField, p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParam(format!("exponent p = {p}")));
    }
    let w = field.w_y();
    let sum: f64 = field.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * w).powf(1.0 / p))
}

/// Tent-space (quasi-)norm: ‖A^(α)g‖_p for p < ∞, the Carleson norm for
/// p = ∞.
pub fn tent_norm(g: &GridFunction, params: &TentSpaceParams) -> Result<f64> {
    match params.p {
        Exponent::Finite(p) => {
            let field = cone_square_function(g, params.alpha)?;
            lp_quasinorm(&field, p)
        }
        Exponent::Infinity => carleson_norm(g, params.alpha),
    }
}

/// h̲(p, α) = min(α^{−n/2}, α^{−n/p}).
pub fn h_lower(p: &Exponent, alpha: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let a = alpha.powf(-n / 2.0);
    let b = alpha.powf(-p.dim_over_p(dim));
    a.min(b)
}

/// h̄(p, α) = max(α^{−n/2}, α^{−n/p}).
pub fn h_upper(p: &Exponent, alpha: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let a = alpha.powf(-n / 2.0);
    let b = alpha.powf(-p.dim_over_p(dim));
    a.max(b)
}

/// Map g to h with h(tᵢ, y) = α^{−n/2} g(α·tᵢ, y) by an exact index shift.
///
/// For α = ratioᵏ this satisfies tent_norm(h, (p, α)) = tent_norm(g, (p, 1))
/// up to roundoff, for every p including ∞. Apertures that are not
/// grid-ratio powers are rejected rather than interpolated.
pub fn rescale_isometry(g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let grid = g.grid();
    let k = grid.ratio_power_index(alpha)?;
    let factor = alpha.powf(-(grid.dim() as f64) / 2.0);
    g.shift_t(k, factor)
}
