//! The four square-function-type functionals: the cone square function
//! A^(α), the Carleson functional and norm, the vertical square function V,
//! and the grand square function G_λ.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::grid::{unit_ball_volume, GridFunction, HalfSpaceGrid, QUAD_GUARD, MAX_DIM};

/// Nonnegative values F(x) on the spatial slice of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialField {
    dim: usize,
    n_y: usize,
    y_lo: f64,
    dy: f64,
    values: Vec<f64>,
}

impl SpatialField {
    pub fn from_grid(grid: &HalfSpaceGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_spatial());
        Self {
            dim: grid.dim(),
            n_y: grid.n_y(),
            y_lo: grid.y_lo(),
            dy: grid.dy(),
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Spatial quadrature weight dyⁿ.
    pub fn w_y(&self) -> f64 {
        self.dy.powi(self.dim as i32)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// Coordinates of a flat node index.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let mut p = [0.0; MAX_DIM];
        let mut rest = flat;
        for a in 0..self.dim {
            p[a] = self.y_lo + (rest % self.n_y) as f64 * self.dy;
            rest /= self.n_y;
        }
        p
    }

    /// Plot-ready CSV: one row per node, coordinates then value.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        let axes: Vec<String> = (0..self.dim).map(|a| format!("x{a}")).collect();
        writeln!(w, "{},value", axes.join(","))?;
        for (flat, v) in self.values.iter().enumerate() {
            let p = self.point(flat);
            let coords: Vec<String> = (0..self.dim).map(|a| format!("{}", p[a])).collect();
            writeln!(w, "{},{}", coords.join(","), v)?;
        }
        Ok(())
    }
}

/// Integer half-width of the quadrature window for a radius: the largest k
/// with k·dy strictly below the (guard-inflated) radius, or -1 if empty.
fn window_halfwidth(radius: f64, dy: f64) -> i64 {
    if !(radius > 0.0) {
        return -1;
    }
    ((radius * (1.0 + QUAD_GUARD)) / dy).ceil() as i64 - 1
}

/// Integer offsets d with |d|·dy strictly inside the radius, for dim ≥ 2.
fn ball_offsets(dim: usize, radius: f64, dy: f64) -> Vec<[i64; MAX_DIM]> {
    let h = window_halfwidth(radius, dy);
    let mut out = Vec::new();
    if h < 0 {
        return out;
    }
    let r2 = {
        let q = radius * (1.0 + QUAD_GUARD) / dy;
        q * q
    };
    let range = -h..=h;
    match dim {
        2 => {
            for d0 in range.clone() {
                for d1 in range.clone() {
                    if ((d0 * d0 + d1 * d1) as f64) < r2 {
                        out.push([d0, d1, 0]);
                    }
                }
            }
        }
        3 => {
            for d0 in range.clone() {
                for d1 in range.clone() {
                    for d2 in range.clone() {
                        if ((d0 * d0 + d1 * d1 + d2 * d2) as f64) < r2 {
                            out.push([d0, d1, d2]);
                        }
                    }
                }
            }
        }
        _ => unreachable!("ball_offsets is for dim >= 2"),
    }
    out
}

fn check_finite(g: &GridFunction) -> Result<()> {
    if let Some(idx) = g.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(idx));
    }
    Ok(())
}

/// Per-slice integrand t⁻ⁿ|g|², without the quadrature weights.
fn cone_integrand(g: &GridFunction) -> Vec<Vec<f64>> {
    let grid = g.grid();
    let n_sp = grid.n_spatial();
    let ts = grid.t_levels();
    (0..grid.n_t())
        .map(|i| {
            let tn = ts[i].powi(grid.dim() as i32);
            (0..n_sp)
                .map(|flat| {
                    let v = g.value(i, flat);
                    v * v / tn
                })
                .collect()
        })
        .collect()
}

fn prefix_sums(slice: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(slice.len() + 1);
    let mut acc = 0.0;
    p.push(0.0);
    for &v in slice {
        acc += v;
        p.push(acc);
    }
    p
}

fn window_sum(prefix: &[f64], center: usize, half: i64) -> f64 {
    if half < 0 {
        return 0.0;
    }
    let n = prefix.len() - 1;
    let lo = (center as i64 - half).max(0) as usize;
    let hi = ((center as i64 + half).min(n as i64 - 1)) as usize;
    prefix[hi + 1] - prefix[lo]
}

/// Cone square function A^(α)g, evaluated at every spatial node.
///
/// Per time slice, |g(tᵢ,·)|²/tᵢⁿ is summed over the discrete ball of
/// radius αtᵢ around each node (a sliding window in 1-d, a precomputed
/// offset stencil otherwise). Agrees with [`cone_square_function_direct`]
/// to roundoff.
pub fn cone_square_function(g: &GridFunction, alpha: f64) -> Result<SpatialField> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("aperture {alpha}")));
    }
    check_finite(g)?;
    let grid = g.grid();
    let n_sp = grid.n_spatial();
    let ts = grid.t_levels();
    let sq = cone_integrand(g);
    let nonzero: Vec<bool> = sq.iter().map(|s| s.iter().any(|&v| v != 0.0)).collect();
    let w = grid.w_y() * grid.w_t();

    let mut acc = vec![0.0f64; n_sp];
    if grid.dim() == 1 {
        for i in 0..grid.n_t() {
            if !nonzero[i] {
                continue;
            }
            let p = prefix_sums(&sq[i]);
            let h = window_halfwidth(alpha * ts[i], grid.dy());
            for (c, a) in acc.iter_mut().enumerate() {
                *a += window_sum(&p, c, h);
            }
        }
    } else {
        let stencils: Vec<Option<Vec<[i64; MAX_DIM]>>> = (0..grid.n_t())
            .map(|i| {
                if nonzero[i] {
                    Some(ball_offsets(grid.dim(), alpha * ts[i], grid.dy()))
                } else {
                    None
                }
            })
            .collect();
        acc = (0..n_sp)
            .into_par_iter()
            .map(|c| {
                let m = grid.spatial_multi(c);
                let mut total = 0.0;
                for (i, stencil) in stencils.iter().enumerate() {
                    let Some(offs) = stencil else { continue };
                    let slice = &sq[i];
                    'offsets: for d in offs {
                        let mut node = [0usize; MAX_DIM];
                        for a in 0..grid.dim() {
                            let j = m[a] as i64 + d[a];
                            if j < 0 || j >= grid.n_y() as i64 {
                                continue 'offsets;
                            }
                            node[a] = j as usize;
                        }
                        total += slice[grid.spatial_flat(&node[..grid.dim()])];
                    }
                }
                total
            })
            .collect();
    }

    let values = acc.into_iter().map(|v| (v * w).sqrt()).collect();
    Ok(SpatialField::from_grid(grid, values))
}

/// Reference implementation of A^(α)g: direct summation over the support
/// with the cone indicator evaluated per cell.
pub fn cone_square_function_direct(g: &GridFunction, alpha: f64) -> Result<SpatialField> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("aperture {alpha}")));
    }
    check_finite(g)?;
    let grid = g.grid();
    let ts = grid.t_levels();
    let w = grid.w_y() * grid.w_t();
    let support: Vec<(usize, usize, f64)> = g
        .support()
        .into_iter()
        .map(|(i, flat)| {
            let v = g.value(i, flat);
            (i, flat, v * v / ts[i].powi(grid.dim() as i32))
        })
        .collect();
    let values: Vec<f64> = (0..grid.n_spatial())
        .into_par_iter()
        .map(|c| {
            let mut total = 0.0;
            for &(i, flat, sv) in &support {
                let radius = alpha * ts[i] * (1.0 + QUAD_GUARD);
                if grid.node_distance(c, flat) < radius {
                    total += sv;
                }
            }
            (total * w).sqrt()
        })
        .collect();
    Ok(SpatialField::from_grid(grid, values))
}

/// Normalized tent mass of one ball:
/// (αⁿ/|B| · ∫_{T_αB} |g|² dy dt/t)^{1/2}.
pub fn carleson_functional(g: &GridFunction, alpha: f64, ball: &Ball) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("aperture {alpha}")));
    }
    check_finite(g)?;
    let grid = g.grid();
    let ts = grid.t_levels();
    let height = ball.radius / alpha;
    let mut mass = 0.0;
    for (i, flat) in g.support() {
        if ts[i] >= height * (1.0 + QUAD_GUARD) {
            continue;
        }
        let radius = (ball.radius - alpha * ts[i]) * (1.0 + QUAD_GUARD);
        let p = grid.spatial_point(flat);
        let mut d2 = 0.0;
        for a in 0..grid.dim() {
            let d = p[a] - ball.center[a];
            d2 += d * d;
        }
        if d2.sqrt() < radius {
            let v = g.value(i, flat);
            mass += v * v;
        }
    }
    mass *= grid.w_y() * grid.w_t();
    let an = alpha.powi(grid.dim() as i32);
    Ok((an / ball.volume() * mass).sqrt())
}

/// Tent heights of the candidate ball family for one aperture.
///
/// Candidates are indexed by height h_j = t_min·ratioʲ, j ≥ 1, with ball
/// radius α·h_j, centered at every spatial node. The list stops at the
/// first height whose tents contain every grid cell regardless of center;
/// beyond that the functional is strictly decreasing in the height, so the
/// supremum over the infinite family is attained inside the list.
pub fn carleson_candidate_heights(grid: &HalfSpaceGrid, alpha: f64) -> Vec<f64> {
    let t_top = grid.t(grid.n_t() - 1);
    let diam = grid.spatial_diameter();
    let mut heights = Vec::new();
    let mut j = 1usize;
    loop {
        let h = grid.t(j);
        heights.push(h);
        if h > t_top && alpha * (h - t_top) > diam {
            break;
        }
        j += 1;
        if j > 100 * grid.n_t() {
            break; // safety cap; unreachable for sane grids
        }
    }
    heights
}

/// Carleson norm: the supremum of [`carleson_functional`] over the
/// candidate family described in [`carleson_candidate_heights`].
pub fn carleson_norm(g: &GridFunction, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParam(format!("aperture {alpha}")));
    }
    check_finite(g)?;
    let grid = g.grid();
    let n_sp = grid.n_spatial();
    let ts = grid.t_levels();
    let heights = carleson_candidate_heights(grid, alpha);
    let w = grid.w_y() * grid.w_t();
    let omega = unit_ball_volume(grid.dim());

    // per-slice |g|² and nonzero flags
    let sq: Vec<Vec<f64>> = (0..grid.n_t())
        .map(|i| {
            (0..n_sp)
                .map(|flat| {
                    let v = g.value(i, flat);
                    v * v
                })
                .collect()
        })
        .collect();
    let nonzero: Vec<bool> = sq.iter().map(|s| s.iter().any(|&v| v != 0.0)).collect();

    let mut best = 0.0f64;
    if grid.dim() == 1 {
        let prefixes: Vec<Vec<f64>> = sq.iter().map(|s| prefix_sums(s)).collect();
        for (j, &h) in heights.iter().enumerate() {
            let j_idx = j + 1; // heights[j] = t(j+1)
            let mut acc = vec![0.0f64; n_sp];
            for i in 0..grid.n_t().min(j_idx) {
                if !nonzero[i] {
                    continue;
                }
                let hw = window_halfwidth(alpha * (h - ts[i]), grid.dy());
                let p = &prefixes[i];
                for (c, a) in acc.iter_mut().enumerate() {
                    *a += window_sum(p, c, hw);
                }
            }
            // αⁿ/|B| with |B| = ωₙ(αh)ⁿ collapses to 1/(ωₙ hⁿ)
            let norm_factor = w / (omega * h.powi(grid.dim() as i32));
            for &a in &acc {
                best = best.max(a * norm_factor);
            }
        }
    } else {
        for (j, &h) in heights.iter().enumerate() {
            let j_idx = j + 1;
            let stencils: Vec<(usize, Vec<[i64; MAX_DIM]>)> = (0..grid.n_t().min(j_idx))
                .filter(|&i| nonzero[i])
                .map(|i| (i, ball_offsets(grid.dim(), alpha * (h - ts[i]), grid.dy())))
                .collect();
            if stencils.is_empty() {
                continue;
            }
            let norm_factor = w / (omega * h.powi(grid.dim() as i32));
            let local_best = (0..n_sp)
                .into_par_iter()
                .map(|c| {
                    let m = grid.spatial_multi(c);
                    let mut total = 0.0;
                    for (i, offs) in &stencils {
                        let slice = &sq[*i];
                        'offsets: for d in offs {
                            let mut node = [0usize; MAX_DIM];
                            for a in 0..grid.dim() {
                                let jj = m[a] as i64 + d[a];
                                if jj < 0 || jj >= grid.n_y() as i64 {
                                    continue 'offsets;
                                }
                                node[a] = jj as usize;
                            }
                            total += slice[grid.spatial_flat(&node[..grid.dim()])];
                        }
                    }
                    total * norm_factor
                })
                .reduce(|| 0.0, f64::max);
            best = best.max(local_best);
        }
    }
    Ok(best.sqrt())
}

/// Vertical square function Vg(x) = (Σᵢ |g(tᵢ, x)|² w_t)^{1/2}.
pub fn vertical_square_function(g: &GridFunction) -> Result<SpatialField> {
    check_finite(g)?;
    let grid = g.grid();
    let n_sp = grid.n_spatial();
    let w_t = grid.w_t();
    let values = (0..n_sp)
        .map(|flat| {
            let s: f64 = (0..grid.n_t())
                .map(|i| {
                    let v = g.value(i, flat);
                    v * v
                })
                .sum();
            (s * w_t).sqrt()
        })
        .collect();
    Ok(SpatialField::from_grid(grid, values))
}

/// Grand square function with weight (t/(|x−y|+t))^{nλ}, summed over the
/// whole half-space.
pub fn grand_square_function(g: &GridFunction, lambda: f64) -> Result<SpatialField> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParam(format!("lambda {lambda}")));
    }
    check_finite(g)?;
    let grid = g.grid();
    let ts = grid.t_levels();
    let w = grid.w_y() * grid.w_t();
    let nl = grid.dim() as f64 * lambda;
    let support: Vec<(usize, usize, f64)> = g
        .support()
        .into_iter()
        .map(|(i, flat)| {
            let v = g.value(i, flat);
            (i, flat, v * v / ts[i].powi(grid.dim() as i32))
        })
        .collect();
    let values: Vec<f64> = (0..grid.n_spatial())
        .into_par_iter()
        .map(|c| {
            let mut total = 0.0;
            for &(i, flat, sv) in &support {
                let t = ts[i];
                let weight = (t / (grid.node_distance(c, flat) + t)).powf(nl);
                total += weight * sv;
            }
            (total * w).sqrt()
        })
        .collect();
    Ok(SpatialField::from_grid(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn test_grid() -> HalfSpaceGrid {
        HalfSpaceGrid::new(1, 2f64.powi(-4), 2f64.powi(4), 65, -4.0, 4.0, 129).unwrap()
    }

    fn single_cell(grid: &HalfSpaceGrid, i_t: usize, flat: usize, v: f64) -> GridFunction {
        let mut values = vec![0.0; grid.n_cells()];
        values[i_t * grid.n_spatial() + flat] = v;
        GridFunction::new(grid, values).unwrap()
    }

    #[test]
    fn cone_square_of_zero_is_zero() {
        let grid = test_grid();
        let f = cone_square_function(&GridFunction::zeros(&grid), 2.0).unwrap();
        assert_eq!(f.max_value(), 0.0);
    }

    #[test]
    fn cone_square_single_cell_closed_form() {
        let grid = test_grid();
        let i_t = 32; // t = 1
        let flat = 64; // y = 0
        let v = 0.7;
        let g = single_cell(&grid, i_t, flat, v);
        let t0 = grid.t(i_t);
        let alpha = 2.0;
        let expected = v * (t0.powi(-1) * grid.w_y() * grid.w_t()).sqrt();
        let field = cone_square_function(&g, alpha).unwrap();
        // αt₀ sits on the lattice up to roundoff; the quadrature window is
        // guard-inflated there, so the reference predicate must be too
        for c in 0..grid.n_spatial() {
            let d = grid.node_distance(c, flat);
            if d < alpha * t0 * (1.0 + 1e-9) {
                assert_relative_eq!(field.values()[c], expected, max_relative = 1e-12);
            } else {
                assert_eq!(field.values()[c], 0.0);
            }
        }
    }

    fn random_function(grid: &HalfSpaceGrid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_sp = grid.n_spatial();
        let mut values = vec![0.0; grid.n_cells()];
        // stay an eighth away from the spatial edges so translated copies
        // remain on the grid
        let pad = grid.n_y() / 8;
        for i_t in grid.n_t() / 4..3 * grid.n_t() / 4 {
            for flat in 0..n_sp {
                let m = grid.spatial_multi(flat);
                let central = (0..grid.dim()).all(|a| m[a] >= pad && m[a] + pad < grid.n_y());
                if central && rng.gen_bool(0.3) {
                    values[i_t * n_sp + flat] = rng.gen_range(-1.0..1.0);
                }
            }
        }
        GridFunction::new(grid, values).unwrap()
    }

    #[test]
    fn fast_and_direct_paths_agree() {
        let grid = HalfSpaceGrid::new(1, 0.25, 4.0, 17, -2.0, 2.0, 65).unwrap();
        let g = random_function(&grid, 3);
        for alpha in [0.5, 1.0, 2.0, 3.7] {
            let a = cone_square_function(&g, alpha).unwrap();
            let b = cone_square_function_direct(&g, alpha).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_relative_eq!(x, y, max_relative = 1e-12, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn fast_and_direct_paths_agree_2d() {
        let grid = HalfSpaceGrid::new(2, 0.25, 4.0, 9, -2.0, 2.0, 17).unwrap();
        let g = random_function(&grid, 5);
        for alpha in [1.0, 2.5] {
            let a = cone_square_function(&g, alpha).unwrap();
            let b = cone_square_function_direct(&g, alpha).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_relative_eq!(x, y, max_relative = 1e-12, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn aperture_monotonicity() {
        let grid = test_grid();
        let g = random_function(&grid, 9);
        let a1 = cone_square_function(&g, 1.0).unwrap();
        let a2 = cone_square_function(&g, 2.5).unwrap();
        for (lo, hi) in a1.values().iter().zip(a2.values()) {
            assert!(lo <= &(hi * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn carleson_zero_and_single_cell() {
        let grid = test_grid();
        assert_eq!(
            carleson_norm(&GridFunction::zeros(&grid), 2.0).unwrap(),
            0.0
        );

        let ball = Ball::centered(1, 2.0).unwrap();
        let v = 1.3;
        let i_t = 8;
        let flat = 64;
        let g = single_cell(&grid, i_t, flat, v);
        let alpha = 2.0;
        // cell is inside T_αB: t = 2^{-3} < r/α = 1, |y| = 0 < r − αt
        let got = carleson_functional(&g, alpha, &ball).unwrap();
        let expected =
            (alpha / ball.volume()).sqrt() * v.abs() * (grid.w_y() * grid.w_t()).sqrt();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    /// The family sup must match a brute-force scan over the same candidate
    /// balls evaluated through the predicate-based functional.
    #[test]
    fn carleson_norm_matches_bruteforce_scan() {
        let grid = HalfSpaceGrid::new(1, 0.25, 4.0, 17, -2.0, 2.0, 33).unwrap();
        for seed in [1u64, 2] {
            let g = random_function(&grid, seed);
            for alpha in [1.0, 2.0] {
                let fast = carleson_norm(&g, alpha).unwrap();
                let mut brute = 0.0f64;
                for h in carleson_candidate_heights(&grid, alpha) {
                    for c in 0..grid.n_spatial() {
                        let ball =
                            Ball::new(1, grid.spatial_point(c), alpha * h).unwrap();
                        brute = brute.max(carleson_functional(&g, alpha, &ball).unwrap());
                    }
                }
                assert_relative_eq!(fast, brute, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn carleson_norm_matches_bruteforce_scan_2d() {
        let grid = HalfSpaceGrid::new(2, 0.25, 4.0, 9, -1.0, 1.0, 9).unwrap();
        let g = random_function(&grid, 4);
        let alpha = 2.0;
        let fast = carleson_norm(&g, alpha).unwrap();
        let mut brute = 0.0f64;
        for h in carleson_candidate_heights(&grid, alpha) {
            for c in 0..grid.n_spatial() {
                let ball = Ball::new(2, grid.spatial_point(c), alpha * h).unwrap();
                brute = brute.max(carleson_functional(&g, alpha, &ball).unwrap());
            }
        }
        assert_relative_eq!(fast, brute, max_relative = 1e-12);
    }

    #[test]
    fn vertical_square_function_column() {
        // column over y = 0 with g ≡ 1 for t ∈ [1, 2): the log-uniform grid
        // integrates dt/t exactly, giving (ln 2)^{1/2}.
        let grid = test_grid();
        let flat = 64;
        let mut values = vec![0.0; grid.n_cells()];
        for i in 0..grid.n_t() {
            let t = grid.t(i);
            if t >= 1.0 - 1e-9 && t < 2.0 * (1.0 - 1e-9) {
                values[i * grid.n_spatial() + flat] = 1.0;
            }
        }
        let g = GridFunction::new(&grid, values).unwrap();
        let v = vertical_square_function(&g).unwrap();
        assert_relative_eq!(v.values()[flat], 2f64.ln().sqrt(), max_relative = 1e-12);
        assert_eq!(v.values()[63], 0.0);
    }

    #[test]
    fn grand_square_single_cell_closed_form() {
        let grid = test_grid();
        let i_t = 32;
        let flat = 80;
        let v = -0.4;
        let g = single_cell(&grid, i_t, flat, v);
        let lambda = 1.5;
        let t0 = grid.t(i_t);
        let field = grand_square_function(&g, lambda).unwrap();
        for c in [0usize, 40, 64, 80, 100] {
            let d = grid.node_distance(c, flat);
            let expected = v.abs()
                * (t0 / (d + t0)).powf(lambda / 2.0)
                * (t0.powi(-1) * grid.w_y() * grid.w_t()).sqrt();
            assert_relative_eq!(field.values()[c], expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn pythagorean_additivity_disjoint_supports() {
        let grid = test_grid();
        let g1 = single_cell(&grid, 20, 30, 0.8);
        let g2 = single_cell(&grid, 40, 90, -1.1);
        let sum = g1.add(&g2).unwrap();
        let a1 = cone_square_function(&g1, 2.0).unwrap();
        let a2 = cone_square_function(&g2, 2.0).unwrap();
        let asum = cone_square_function(&sum, 2.0).unwrap();
        for c in 0..grid.n_spatial() {
            let lhs = asum.values()[c] * asum.values()[c];
            let rhs = a1.values()[c] * a1.values()[c] + a2.values()[c] * a2.values()[c];
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn translation_commutes_with_cone() {
        let grid = test_grid();
        let g = random_function(&grid, 12);
        let shifted = g.translate_y(&[5]).unwrap();
        let a = cone_square_function(&g, 2.0).unwrap();
        let b = cone_square_function(&shifted, 2.0).unwrap();
        for c in 0..grid.n_spatial() - 5 {
            assert_relative_eq!(
                a.values()[c],
                b.values()[c + 5],
                max_relative = 1e-12,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn non_finite_rejected_at_construction() {
        let grid = test_grid();
        let mut values = vec![0.0; grid.n_cells()];
        values[1000] = f64::NAN;
        assert!(matches!(
            GridFunction::new(&grid, values),
            Err(Error::NonFinite(1000))
        ));
    }

    #[test]
    fn bad_parameters_rejected() {
        let grid = test_grid();
        let g = GridFunction::zeros(&grid);
        assert!(cone_square_function(&g, 0.0).is_err());
        assert!(carleson_norm(&g, -1.0).is_err());
        assert!(grand_square_function(&g, 0.0).is_err());
    }
}
