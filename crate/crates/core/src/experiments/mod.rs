//! Aperture sweeps, log–log exponent fits, sandwich checks, the vertical
//! limit study, and the dyadic domination check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    cone_square_function, grand_square_function, vertical_square_function,
};
use crate::grid::{unit_ball_volume, GridFunction};
use crate::norms::{h_lower, h_upper, tent_norm, Exponent, TentSpaceParams};

pub mod runner;

pub use runner::{run_experiment, ExperimentKind, ExperimentReport, Preset, ResultRow, RunConfig};

/// Table of (α, tent norm) pairs for one input and one p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub label: String,
    pub p: Exponent,
    pub dim: usize,
    /// (α, ‖g‖_{T^{p,2}_α}) with strictly increasing α.
    pub rows: Vec<(f64, f64)>,
}

/// Least-squares fit of ln(norm) against ln(α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub alpha_range: (f64, f64),
}

/// Tent norms of one function over a list of apertures.
pub fn aperture_sweep(
    g: &GridFunction,
    p: Exponent,
    alphas: &[f64],
    label: &str,
) -> Result<SweepResult> {
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParam(
            "sweep apertures must be strictly increasing".into(),
        ));
    }
    let dim = g.grid().dim();
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let params = TentSpaceParams::new(p, alpha, dim)?;
        rows.push((alpha, tent_norm(g, &params)?));
    }
    Ok(SweepResult {
        label: label.to_string(),
        p,
        dim,
        rows,
    })
}

/// Ordinary least squares on (ln α, ln norm).
pub fn fit_exponent(sweep: &SweepResult) -> Result<ExponentFit> {
    if sweep.rows.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "exponent fit needs at least 3 rows, got {}",
            sweep.rows.len()
        )));
    }
    if let Some((alpha, _)) = sweep.rows.iter().find(|(_, n)| !(*n > 0.0)) {
        return Err(Error::InvalidParam(format!(
            "zero norm at alpha = {alpha}; cannot fit in log-log coordinates"
        )));
    }
    let pts: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .map(|&(a, n)| (a.ln(), n.ln()))
        .collect();
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let max_residual = pts
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0f64, f64::max);
    Ok(ExponentFit {
        slope,
        intercept,
        max_residual,
        alpha_range: (sweep.rows[0].0, sweep.rows.last().unwrap().0),
    })
}

/// Normalized change-of-aperture ratios for one (g, p, α).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub p: Exponent,
    pub alpha: f64,
    /// R = ‖g‖_{T^{p,2}_1} / ‖g‖_{T^{p,2}_α}.
    pub ratio: f64,
    /// R / h̲(p, α); bounded below when the lower bound holds.
    pub lower_normalized: f64,
    /// R / h̄(p, α); bounded above when the upper bound holds.
    pub upper_normalized: f64,
}

/// Compute the aperture ratio R and its h̲-, h̄-normalized forms.
pub fn sandwich_check(g: &GridFunction, p: Exponent, alpha: f64) -> Result<SandwichReport> {
    let dim = g.grid().dim();
    let n1 = tent_norm(g, &TentSpaceParams::new(p, 1.0, dim)?)?;
    let na = tent_norm(g, &TentSpaceParams::new(p, alpha, dim)?)?;
    if !(na > 0.0) {
        return Err(Error::InvalidParam(
            "sandwich check needs a nonzero function".into(),
        ));
    }
    let ratio = n1 / na;
    Ok(SandwichReport {
        p,
        alpha,
        ratio,
        lower_normalized: ratio / h_lower(&p, alpha, dim),
        upper_normalized: ratio / h_upper(&p, alpha, dim),
    })
}

/// Error sequence of α^{−n/2}A^(α)g against ωₙ^{1/2}·Vg as α shrinks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalLimitReport {
    /// (α, sup-norm error relative to the sup of ωₙ^{1/2}Vg).
    pub errors: Vec<(f64, f64)>,
    /// Entries where α·t falls under twice the spatial step somewhere on
    /// the support; flagged rather than asserted.
    pub resolution_limited: Vec<bool>,
}

/// Compare α^{−n/2}A^(α)g with ωₙ^{1/2}Vg over a decreasing α-list.
pub fn vertical_limit_study(g: &GridFunction, alphas: &[f64]) -> Result<VerticalLimitReport> {
    if alphas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParam(
            "vertical limit expects strictly decreasing apertures".into(),
        ));
    }
    let grid = g.grid();
    let n = grid.dim();
    let omega = unit_ball_volume(n);
    let v = vertical_square_function(g)?;
    let reference: Vec<f64> = v.values().iter().map(|x| omega.sqrt() * x).collect();
    let denom = reference.iter().cloned().fold(0.0f64, f64::max);
    if !(denom > 0.0) {
        return Ok(VerticalLimitReport {
            errors: alphas.iter().map(|&a| (a, 0.0)).collect(),
            resolution_limited: vec![false; alphas.len()],
        });
    }
    let t_lo_support = g
        .support()
        .iter()
        .map(|&(i, _)| grid.t(i))
        .fold(f64::MAX, f64::min);
    let mut errors = Vec::new();
    let mut flags = Vec::new();
    for &alpha in alphas {
        let field = cone_square_function(g, alpha)?;
        let scale = alpha.powf(-(n as f64) / 2.0);
        let err = field
            .values()
            .iter()
            .zip(&reference)
            .map(|(a, r)| (scale * a - r).abs())
            .fold(0.0f64, f64::max)
            / denom;
        errors.push((alpha, err));
        flags.push(alpha * t_lo_support < 2.0 * grid.dy());
    }
    Ok(VerticalLimitReport {
        errors,
        resolution_limited: flags,
    })
}

/// Result of the annulus-splitting domination check for G_λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDominationReport {
    pub lambda: f64,
    pub k_max: usize,
    /// The derived constant: on the annulus 2ᵏt ≤ |x−y| < 2^{k+1}t the
    /// weight is at most 2^{−knλ}, and the inner region has weight ≤ 1, so
    /// G_λ² ≤ Σ_k 2^{−knλ} (A^{(2^{k+1})})² and ℓ² ≤ ℓ¹ gives C = 1.
    pub constant: f64,
    /// Worst pointwise G_λg(x) / Σ_k 2^{−knλ/2} A^{(2^{k+1})}g(x).
    pub worst_ratio: f64,
}

/// Verify G_λg(x) ≤ C·Σ_{k=0}^{k_max} 2^{−knλ/2} A^{(2^{k+1})}g(x)
/// pointwise, with C = 1.
///
/// `k_max` defaults to the first k where 2^{k+1}·t exceeds the spatial
/// diameter for every support level t, beyond which annuli are empty.
pub fn dyadic_domination_check(
    g: &GridFunction,
    lambda: f64,
    k_max: Option<usize>,
) -> Result<DyadicDominationReport> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidParam(format!(
            "dyadic domination check needs lambda > 1, got {lambda}"
        )));
    }
    let grid = g.grid();
    let support = g.support();
    let t_lo = support
        .iter()
        .map(|&(i, _)| grid.t(i))
        .fold(f64::MAX, f64::min);
    let k_max = k_max.unwrap_or_else(|| {
        if support.is_empty() {
            0
        } else {
            (grid.spatial_diameter() / t_lo).log2().ceil().max(0.0) as usize
        }
    });
    let gsq = grand_square_function(g, lambda)?;
    let n_sp = grid.n_spatial();
    let mut bound = vec![0.0f64; n_sp];
    let nl = grid.dim() as f64 * lambda;
    for k in 0..=k_max {
        let aperture = 2f64.powi(k as i32 + 1);
        let field = cone_square_function(g, aperture)?;
        let weight = 2f64.powf(-(k as f64) * nl / 2.0);
        for (b, a) in bound.iter_mut().zip(field.values()) {
            *b += weight * a;
        }
    }
    let mut worst = 0.0f64;
    for (gv, bv) in gsq.values().iter().zip(&bound) {
        if *gv > 0.0 {
            worst = worst.max(gv / bv);
        }
    }
    Ok(DyadicDominationReport {
        lambda,
        k_max,
        constant: 1.0,
        worst_ratio: worst,
    })
}
