//! Cubic tensor-product interpolation on structured grids.
//!
//! Off-node evaluation backs circle averages, blow-up rescaling and the
//! partial-cell geometry of ball-restricted integrals. Radial / x
//! stencils are Lagrange cubics on the (possibly non-uniform) coordinate
//! lines; periodic directions wrap.

use crate::grid::{GridLayout, ParamGrid};

fn lagrange4(xs: &[f64], t: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for k in 0..4 {
        let mut p = 1.0;
        for l in 0..4 {
            if l != k {
                p *= (t - xs[l]) / (xs[k] - xs[l]);
            }
        }
        w[k] = p;
    }
    w
}

/// Clamped cubic stencil on an ascending coordinate line: start index + weights.
pub fn stencil_clamped(coords: &[f64], t: f64) -> (usize, [f64; 4]) {
    let n = coords.len();
    assert!(n >= 4, "interpolation needs at least 4 nodes per line");
    let i = coords.partition_point(|&c| c < t);
    let i0 = i.saturating_sub(2).min(n - 4);
    (i0, lagrange4(&coords[i0..i0 + 4], t))
}

/// Cubic stencil on a uniform periodic line with first node `c0`,
/// spacing `h` and `n` nodes: wrapped indices + weights.
fn stencil_periodic(c0: f64, h: f64, n: usize, t: f64) -> ([usize; 4], [f64; 4]) {
    let s = ((t - c0) / h).floor();
    let base = s as i64;
    let mut ids = [0usize; 4];
    let mut xs = [0.0; 4];
    for (k, off) in (-1i64..=2).enumerate() {
        let j = base + off;
        ids[k] = j.rem_euclid(n as i64) as usize;
        xs[k] = c0 + j as f64 * h;
    }
    (ids, lagrange4(&xs, t))
}

/// Interpolator over one grid, evaluating node-major multi-component fields.
pub struct Interp<'a> {
    grid: &'a ParamGrid,
}

impl<'a> Interp<'a> {
    pub fn new(grid: &'a ParamGrid) -> Self {
        Interp { grid }
    }

    /// Evaluates `ncomp` components of a node-major field at chart point `p`.
    pub fn eval(&self, field: &[f64], ncomp: usize, p: [f64; 2], out: &mut [f64]) {
        out[..ncomp].fill(0.0);
        match &self.grid.layout {
            GridLayout::Polar { radii, n_theta, .. } => {
                let nt = *n_theta;
                let r = p[0].hypot(p[1]);
                let th = p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU);
                let (ir0, wr) = stencil_clamped(radii, r);
                let (tids, wt) = stencil_periodic(0.0, std::f64::consts::TAU / nt as f64, nt, th);
                for a in 0..4 {
                    for b in 0..4 {
                        let w = wr[a] * wt[b];
                        if w == 0.0 {
                            continue;
                        }
                        let node = (ir0 + a) * nt + tids[b];
                        for c in 0..ncomp {
                            out[c] += w * field[node * ncomp + c];
                        }
                    }
                }
            }
            GridLayout::Rect {
                xs,
                ys,
                period_x,
                period_y,
                ..
            } => {
                let (nx, ny) = (xs.len(), ys.len());
                let sx = match period_x {
                    Some(px) => {
                        let h = px / nx as f64;
                        let (ids, w) = stencil_periodic(xs[0], h, nx, p[0]);
                        (ids, w)
                    }
                    None => {
                        let (i0, w) = stencil_clamped(xs, p[0]);
                        ([i0, i0 + 1, i0 + 2, i0 + 3], w)
                    }
                };
                let sy = match period_y {
                    Some(py) => {
                        let h = py / ny as f64;
                        stencil_periodic(ys[0], h, ny, p[1])
                    }
                    None => {
                        let (j0, w) = stencil_clamped(ys, p[1]);
                        ([j0, j0 + 1, j0 + 2, j0 + 3], w)
                    }
                };
                for a in 0..4 {
                    for b in 0..4 {
                        let w = sx.1[a] * sy.1[b];
                        if w == 0.0 {
                            continue;
                        }
                        let node = sx.0[a] * ny + sy.0[b];
                        for c in 0..ncomp {
                            out[c] += w * field[node * ncomp + c];
                        }
                    }
                }
            }
        }
    }

    pub fn eval_scalar(&self, field: &[f64], p: [f64; 2]) -> f64 {
        let mut v = [0.0];
        self.eval(field, 1, p, &mut v);
        v[0]
    }

    /// Mean of a scalar field over the circle of radius `rho` around `center`.
    pub fn circle_mean(&self, field: &[f64], center: [f64; 2], rho: f64, samples: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..samples {
            let phi = std::f64::consts::TAU * k as f64 / samples as f64;
            acc += self.eval_scalar(
                field,
                [center[0] + rho * phi.cos(), center[1] + rho * phi.sin()],
            );
        }
        acc / samples as f64
    }
}

/// Angular means of a scalar field at every grid radius (polar grids):
/// exact trapezoid over the periodic angle.
pub fn angular_means(grid: &ParamGrid, field: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    match &grid.layout {
        GridLayout::Polar { radii, n_theta, .. } => {
            let nt = *n_theta;
            let means = (0..radii.len())
                .map(|ir| field[ir * nt..(ir + 1) * nt].iter().sum::<f64>() / nt as f64)
                .collect();
            Some((radii.clone(), means))
        }
        GridLayout::Rect { .. } => None,
    }
}

/// Cubic 1-D interpolation of per-radius values at an arbitrary radius.
pub fn interp_line(coords: &[f64], values: &[f64], t: f64) -> f64 {
    let (i0, w) = stencil_clamped(coords, t);
    (0..4).map(|k| w[k] * values[i0 + k]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grading, ParamGrid};

    #[test]
    fn reproduces_cubics_on_polar_grid() {
        let grid = ParamGrid::disk_gl(32, 64, 1.0, Grading::Geometric { ratio: 1.15 });
        // cubic in (x, y) is not cubic in (r, θ); use a radial cubic times
        // a low harmonic which the angular cubic handles well
        let f: Vec<f64> = grid
            .nodes
            .iter()
            .map(|p| {
                let r = p[0].hypot(p[1]);
                let th = p[1].atan2(p[0]);
                r * r * r - 0.5 * r + 0.2 + 0.3 * r * th.cos()
            })
            .collect();
        let it = Interp::new(&grid);
        let probe: [[f64; 2]; 3] = [[0.3, 0.2], [0.0, 0.55], [-0.4, -0.1]];
        for p in probe {
            let r = p[0].hypot(p[1]);
            let th = p[1].atan2(p[0]);
            let want = r * r * r - 0.5 * r + 0.2 + 0.3 * r * th.cos();
            let got = it.eval_scalar(&f, p);
            assert!((got - want).abs() < 2e-6, "at {p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn periodic_wrap_on_torus() {
        let grid = ParamGrid::flat_torus(32, 32, 1.0);
        let f: Vec<f64> = grid
            .nodes
            .iter()
            .map(|p| (std::f64::consts::TAU * p[0]).sin())
            .collect();
        let it = Interp::new(&grid);
        // points straddling the periodic seam
        for p in [[0.001, 0.4], [0.999, 0.9], [0.5, 0.0001]] {
            let want = (std::f64::consts::TAU * p[0]).sin();
            let got = it.eval_scalar(&f, p);
            assert!((got - want).abs() < 5e-5, "at {p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn circle_mean_of_harmonic_is_center_value() {
        let grid = ParamGrid::disk_gl(48, 96, 1.0, Grading::Uniform);
        // harmonic: Re z² = x² − y²
        let f: Vec<f64> = grid
            .nodes
            .iter()
            .map(|p| p[0] * p[0] - p[1] * p[1])
            .collect();
        let it = Interp::new(&grid);
        let c = [0.2, 0.1];
        let m = it.circle_mean(&f, c, 0.3, 64);
        let center = c[0] * c[0] - c[1] * c[1];
        assert!((m - center).abs() < 1e-6, "{m} vs {center}");
    }
}
