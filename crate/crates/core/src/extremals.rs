//! Extremal inputs: the functions a₁, a₂ that saturate the aperture
//! scaling, plus smooth bumps and seeded random ensembles for property
//! checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Tent};
use crate::grid::{GridFunction, HalfSpaceGrid, Point};

/// Relative tolerance for matching interval endpoints to t-nodes.
const NODE_TOL: f64 = 1e-9;

/// a₁(t, y) = 1_{T₁B(0,1)}(t, y) · 1_{[1/2,1]}(t).
///
/// The t-interval is closed on nodes; with the grid ratio a power of 2 the
/// endpoints land exactly on nodes and the support is deterministic (the
/// tent predicate already excludes t = 1).
pub fn make_a1(grid: &HalfSpaceGrid) -> Result<GridFunction> {
    let ball = Ball::centered(grid.dim(), 1.0)?;
    let tent = Tent::new(ball, 1.0)?;
    if grid.t_min() > 0.5 * (1.0 + NODE_TOL) || grid.t_max() < 1.0 * (1.0 - NODE_TOL) {
        return Err(Error::InvalidGrid(format!(
            "t-range [{}, {}] does not cover the a1 support [1/2, 1]",
            grid.t_min(),
            grid.t_max()
        )));
    }
    let f = GridFunction::from_fn(grid, |t, y| {
        if t >= 0.5 * (1.0 - NODE_TOL) && t <= 1.0 * (1.0 + NODE_TOL) && tent.contains(t, y) {
            1.0
        } else {
            0.0
        }
    })?;
    if f.support().is_empty() {
        return Err(Error::InvalidGrid("grid too coarse for a1".into()));
    }
    Ok(f)
}

/// a₂(t, y) = a₁(αt, y) via an exact index shift; α must be a grid-ratio
/// power and the compressed support (t ∈ [1/(2α), 1/α]) must stay inside
/// the grid interior.
pub fn make_a2(grid: &HalfSpaceGrid, alpha: f64) -> Result<GridFunction> {
    let a1 = make_a1(grid)?;
    let k = grid.ratio_power_index(alpha)?;
    a1.shift_t(k, 1.0)
}

/// Smooth compactly supported bump: a polynomial bump (1−u²)³ in log-t
/// around the geometric center of the t-range (one octave half-width) times
/// a product of spatial bumps of the given scale around `center`.
pub fn make_smooth_bump(grid: &HalfSpaceGrid, center: &Point, scale: f64) -> Result<GridFunction> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParam(format!("bump scale {scale}")));
    }
    if scale < 2.0 * grid.dy() {
        return Err(Error::InvalidParam(format!(
            "bump scale {scale} below grid resolution dy = {}",
            grid.dy()
        )));
    }
    for a in 0..grid.dim() {
        if center[a] - scale < grid.y_lo() + grid.dy() || center[a] + scale > grid.y_hi() - grid.dy()
        {
            return Err(Error::InvalidParam(
                "bump support reaches the spatial margin".into(),
            ));
        }
    }
    let t_center = (grid.t_min() * grid.t_max()).sqrt();
    let bump = |u: f64| {
        if u.abs() < 1.0 {
            let w = 1.0 - u * u;
            w * w * w
        } else {
            0.0
        }
    };
    let dim = grid.dim();
    let c = *center;
    GridFunction::from_fn_interior(grid, move |t, y| {
        let ut = (t / t_center).log2(); // support: one octave each way
        let mut v = bump(ut);
        for a in 0..dim {
            v *= bump((y[a] - c[a]) / scale);
        }
        v
    })
}

/// Seeded ensemble of cell-wise random functions on random rectangular
/// supports in the central part of the grid. Deterministic given the seed.
pub fn make_random_ensemble(
    grid: &HalfSpaceGrid,
    seed: u64,
    count: usize,
) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_t = grid.n_t();
    let n_y = grid.n_y();
    let n_sp = grid.n_spatial();
    // central support windows: keep mass away from margins and from the
    // smallest t-levels where cone windows degenerate
    let t_lo = n_t / 4;
    let t_hi = 3 * n_t / 4;
    let y_lo = n_y / 4;
    let y_hi = 3 * n_y / 4;
    if t_hi <= t_lo + 1 || y_hi <= y_lo + 1 {
        return Err(Error::InvalidGrid("grid too small for an ensemble".into()));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let ta = rng.gen_range(t_lo..t_hi - 1);
        let tb = rng.gen_range(ta + 1..t_hi);
        let mut lo = [0usize; 3];
        let mut hi = [0usize; 3];
        for a in 0..grid.dim() {
            lo[a] = rng.gen_range(y_lo..y_hi - 1);
            hi[a] = rng.gen_range(lo[a] + 1..y_hi);
        }
        let mut values = vec![0.0; grid.n_cells()];
        for i_t in ta..=tb {
            for flat in 0..n_sp {
                let m = grid.spatial_multi(flat);
                let inside = (0..grid.dim()).all(|a| m[a] >= lo[a] && m[a] <= hi[a]);
                if inside {
                    values[i_t * n_sp + flat] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        out.push(GridFunction::new(grid, values)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::cone_square_function;
    use crate::norms::{tent_norm, Exponent, TentSpaceParams};
    use approx::assert_relative_eq;

    fn a1_grid() -> HalfSpaceGrid {
        // ratio 2^{1/8}; 0.5 and 1 are nodes
        HalfSpaceGrid::new(1, 2f64.powi(-3), 2f64.powi(2), 41, -8.0, 8.0, 257).unwrap()
    }

    #[test]
    fn a1_point_values() {
        let grid = a1_grid();
        let a1 = make_a1(&grid).unwrap();
        // (0.75, 0.1): 0.1 < 1 − 0.75
        let find_t = |target: f64| {
            (0..grid.n_t())
                .min_by(|&a, &b| {
                    (grid.t(a) - target)
                        .abs()
                        .partial_cmp(&(grid.t(b) - target).abs())
                        .unwrap()
                })
                .unwrap()
        };
        let find_y = |target: f64| {
            (0..grid.n_y())
                .min_by(|&a, &b| {
                    (grid.y_coord(a) - target)
                        .abs()
                        .partial_cmp(&(grid.y_coord(b) - target).abs())
                        .unwrap()
                })
                .unwrap()
        };
        let it_075 = find_t(0.75);
        // nearest node to 0.75 on the 2^{1/8} lattice is 2^{-3/8}
        assert!((grid.t(it_075) - 2f64.powf(-0.375)).abs() < 1e-12);
        assert_eq!(a1.value(it_075, find_y(0.1)), 1.0);
        // t < 1/2 is outside
        let it_04 = find_t(0.4);
        assert_eq!(a1.value(it_04, find_y(0.0)), 0.0);
    }

    #[test]
    fn a1_norm_stable_across_refinement_and_p() {
        let coarse = HalfSpaceGrid::new(1, 2f64.powi(-3), 2f64.powi(2), 21, -8.0, 8.0, 129).unwrap();
        let fine = a1_grid();
        for p in [0.5, 1.0, 2.0, 4.0] {
            let pc = TentSpaceParams::new(Exponent::finite(p).unwrap(), 1.0, 1).unwrap();
            let nc = tent_norm(&make_a1(&coarse).unwrap(), &pc).unwrap();
            let nf = tent_norm(&make_a1(&fine).unwrap(), &pc).unwrap();
            assert!(nc > 0.0 && nf > 0.0);
            let ratio = nc / nf;
            assert!(ratio < 2.0 && ratio > 0.5, "p={p}: ratio {ratio}");
        }
    }

    #[test]
    fn a2_reduces_to_a1_at_alpha_one() {
        let grid = a1_grid();
        assert_eq!(make_a2(&grid, 1.0).unwrap(), make_a1(&grid).unwrap());
    }

    #[test]
    fn a2_support_and_plateau() {
        let grid =
            HalfSpaceGrid::new(1, 2f64.powi(-6), 2f64.powi(2), 65, -2.0, 2.0, 513).unwrap();
        let alpha = 4.0;
        let a2 = make_a2(&grid, alpha).unwrap();
        // support now t ∈ [1/(2α), 1/α)
        for (i, _) in a2.support() {
            let t = grid.t(i);
            assert!(t >= 1.0 / (2.0 * alpha) * (1.0 - 1e-9) && t < 1.0 / alpha * (1.0 + 1e-9));
        }
        // A^(1)a₂ is supported in the closed unit ball, is even in x, and
        // at the origin matches the closed form
        //   A(0)² = 2 ln(2α/(α+1)) + 2(1 + α ln(α/(α+1)))
        // obtained from ∫ dt/t² · 2 min(t, 1 − αt) over t ∈ [1/(2α), 1/α].
        let field = cone_square_function(&a2, 1.0).unwrap();
        let n_y = grid.n_y();
        let mut max = 0.0f64;
        for c in 0..grid.n_spatial() {
            let x = grid.spatial_point(c)[0];
            if x.abs() > 1.0 + grid.dy() {
                assert_eq!(field.values()[c], 0.0, "support outside closed unit ball");
            }
            let mirror = n_y - 1 - c;
            assert_relative_eq!(
                field.values()[c],
                field.values()[mirror],
                max_relative = 1e-12,
                epsilon = 1e-15
            );
            max = max.max(field.values()[c]);
        }
        assert!(max > 0.0);
        let origin = (n_y - 1) / 2;
        let exact = (2.0 * (2.0 * alpha / (alpha + 1.0)).ln()
            + 2.0 * (1.0 + alpha * (alpha / (alpha + 1.0)).ln()))
        .sqrt();
        assert_relative_eq!(field.values()[origin], exact, max_relative = 0.05);
    }

    #[test]
    fn a2_rejects_support_exit() {
        // grid floor too high for α = 16
        let grid = HalfSpaceGrid::new(1, 2f64.powi(-3), 2f64.powi(2), 41, -2.0, 2.0, 129).unwrap();
        assert!(make_a2(&grid, 16.0).is_err());
    }

    #[test]
    fn bump_precondition_and_determinism() {
        let grid = HalfSpaceGrid::new(1, 2f64.powi(-4), 2f64.powi(4), 65, -2.0, 2.0, 257).unwrap();
        assert!(make_smooth_bump(&grid, &[0.0, 0.0, 0.0], 1e-6).is_err());
        let b = make_smooth_bump(&grid, &[0.0, 0.0, 0.0], 1.0).unwrap();
        assert!(!b.support().is_empty());

        let e1 = make_random_ensemble(&grid, 99, 3).unwrap();
        let e2 = make_random_ensemble(&grid, 99, 3).unwrap();
        assert_eq!(e1, e2);
        let e3 = make_random_ensemble(&grid, 100, 3).unwrap();
        assert_ne!(e1, e3);
    }

    #[test]
    fn ensemble_norm_monotone_in_aperture() {
        let grid = HalfSpaceGrid::new(1, 2f64.powi(-3), 2f64.powi(3), 49, -4.0, 4.0, 129).unwrap();
        for g in make_random_ensemble(&grid, 5, 3).unwrap() {
            for p in [Exponent::finite(1.0).unwrap(), Exponent::Infinity] {
                let n1 = tent_norm(&g, &TentSpaceParams::new(p, 1.0, 1).unwrap()).unwrap();
                let n4 = tent_norm(&g, &TentSpaceParams::new(p, 4.0, 1).unwrap()).unwrap();
                assert!(n1 <= n4 * (1.0 + 1e-12), "{n1} vs {n4}");
            }
        }
    }

    #[test]
    fn a2_scaling_identity_exact() {
        let grid =
            HalfSpaceGrid::new(1, 2f64.powi(-6), 2f64.powi(2), 65, -2.0, 2.0, 513).unwrap();
        let alpha = 4.0;
        let a1 = make_a1(&grid).unwrap();
        let a2 = make_a2(&grid, alpha).unwrap();
        for p in [0.5, 1.0, 2.0] {
            let pe = Exponent::finite(p).unwrap();
            let lhs = tent_norm(&a2, &TentSpaceParams::new(pe, alpha, 1).unwrap()).unwrap();
            let rhs = alpha.sqrt()
                * tent_norm(&a1, &TentSpaceParams::new(pe, 1.0, 1).unwrap()).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }
}
