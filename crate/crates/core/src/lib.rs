//! Numerical tent spaces on a discretized upper half-space.
//!
//! The half-space ℝ^{n+1}_+ is sampled on a log-uniform grid in t and a
//! uniform grid in y. On top of that the crate provides:
//!
//! - cone, vertical, and grand square functions ([`functionals`]);
//! - tent-space quasi-norms for 0 < p ≤ ∞, including the Carleson-measure
//!   norm at p = ∞ ([`norms`]);
//! - tent geometry and sampled inclusion checks ([`geometry`]);
//! - atoms with the size condition and aperture-transport maps ([`atoms`]);
//! - reference inputs: tent indicators, their dilates, smooth bumps, and
//!   seeded random ensembles ([`extremals`]);
//! - aperture sweeps, exponent fits, and the named experiments behind the
//!   `tentspace` command line ([`experiments`]).
//!
//! Dilation t ↦ αt for α a power of the grid ratio is an exact index
//! shift, which is what makes the rescaling-isometry and matched-tent
//! identities hold to roundoff rather than to quadrature error.

pub mod atoms;
pub mod error;
pub mod experiments;
pub mod extremals;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod norms;

pub use error::{Error, Result};
pub use functionals::SpatialField;
pub use geometry::{Ball, Tent};
pub use grid::{GridFunction, HalfSpaceGrid, Point};
pub use norms::{Exponent, TentSpaceParams};
