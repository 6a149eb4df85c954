//! Tent-space atoms: the size condition and the two aperture-transport
//! maps from the p ≤ 1 theory.
//!
//! A T^{p,2}_α atom is supported in a tent T_αB with
//! ∫ |a|² dy dt/t ≤ α^{−n} |B|^{−(2/p−1)}. The module certifies and
//! transports given atoms; it does not decompose arbitrary functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Ball, Tent};
use crate::grid::GridFunction;

/// Relative slack on the size inequality, absorbing quadrature roundoff.
/// The support condition is checked exactly.
pub const SIZE_TOLERANCE: f64 = 1e-9;

/// A grid function together with its claimed ball, aperture, and exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub func: GridFunction,
    pub ball: Ball,
    pub aperture: f64,
    pub exponent: f64,
}

/// Diagnostics from [`validate_atom`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCheck {
    pub valid: bool,
    pub support_ok: bool,
    pub size_ok: bool,
    /// Measured L²(dy dt/t) mass of the candidate.
    pub mass: f64,
    /// The size bound α^{−n}|B|^{−(2/p−1)}, with |B| = ωₙrⁿ analytic.
    pub bound: f64,
    /// First nonzero cell outside the tent, if any.
    pub bad_cell: Option<(usize, usize)>,
}

/// The size bound α^{−n}|B|^{−(2/p−1)}.
pub fn size_bound(ball: &Ball, aperture: f64, p: f64) -> f64 {
    aperture.powi(-(ball.dim as i32)) * ball.volume().powf(-(2.0 / p - 1.0))
}

/// Check the two atom invariants: support inside T_αB (every nonzero cell
/// passes the open-tent predicate) and the quadrature-form size bound.
pub fn validate_atom(func: &GridFunction, ball: &Ball, aperture: f64, p: f64) -> Result<AtomCheck> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParam(format!("atom exponent p = {p}")));
    }
    if !(aperture > 0.0) || !aperture.is_finite() {
        return Err(Error::InvalidParam(format!("atom aperture {aperture}")));
    }
    let grid = func.grid();
    if grid.dim() != ball.dim {
        return Err(Error::GridMismatch);
    }
    let tent = Tent::new(*ball, aperture)?;
    let ts = grid.t_levels();
    let mut bad_cell = None;
    for (i, flat) in func.support() {
        let y = grid.spatial_point(flat);
        if !tent.contains(ts[i], &y) {
            bad_cell = Some((i, flat));
            break;
        }
    }
    let support_ok = bad_cell.is_none();
    let mass = func.square_mass();
    let bound = size_bound(ball, aperture, p);
    let size_ok = mass <= bound * (1.0 + SIZE_TOLERANCE);
    Ok(AtomCheck {
        valid: support_ok && size_ok,
        support_ok,
        size_ok,
        mass,
        bound,
        bad_cell,
    })
}

impl Atom {
    /// Certify and wrap an atom.
    pub fn new(func: GridFunction, ball: Ball, aperture: f64, exponent: f64) -> Result<Self> {
        let check = validate_atom(&func, &ball, aperture, exponent)?;
        if !check.valid {
            return Err(Error::InvalidAtom(format!(
                "support_ok={}, mass={:.6e}, bound={:.6e}",
                check.support_ok, check.mass, check.bound
            )));
        }
        Ok(Self {
            func,
            ball,
            aperture,
            exponent,
        })
    }

    pub fn check(&self) -> Result<AtomCheck> {
        validate_atom(&self.func, &self.ball, self.aperture, self.exponent)
    }
}

/// Transport a T^{p,2}_1 atom to aperture α ≥ 1: α^{−n/p}·a over the
/// dilated ball αB. The size bound transforms as
/// |B|^{−(2/p−1)} = α^{2n/p}·(α^{−n}|αB|^{−(2/p−1)}), so saturation is
/// preserved exactly.
pub fn atom_to_wider_aperture(atom: &Atom, alpha: f64) -> Result<Atom> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "wider-aperture transport needs alpha >= 1, got {alpha}"
        )));
    }
    if atom.aperture != 1.0 {
        return Err(Error::InvalidAtom(format!(
            "input must have aperture 1, got {}",
            atom.aperture
        )));
    }
    let n = atom.ball.dim as f64;
    let scaled = atom.func.scaled(alpha.powf(-n / atom.exponent));
    Atom::new(scaled, atom.ball.dilate(alpha)?, alpha, atom.exponent)
}

/// Transport a T^{p,2}_α atom (α ≥ 1) to aperture 1: α^{n/2}·a over the
/// same ball, using T_αB ⊂ T₁B.
pub fn atom_to_narrower_aperture(atom: &Atom) -> Result<Atom> {
    let alpha = atom.aperture;
    if !(alpha >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "narrower-aperture transport needs alpha >= 1, got {alpha}"
        )));
    }
    let n = atom.ball.dim as f64;
    let scaled = atom.func.scaled(alpha.powf(n / 2.0));
    Atom::new(scaled, atom.ball, 1.0, atom.exponent)
}
