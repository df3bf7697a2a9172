//! Finite-difference stencils on structured grids.
//!
//! Weights come from Fornberg's recursion, so the same code path serves
//! uniform angular lines, non-uniform (Gauss-Legendre or graded) radial
//! lines and ingested rectangular charts. Five-point stencils give 4th
//! order on interior nodes; near edges the window is clamped.

use crate::grid::{GridLayout, ParamGrid};

/// Fornberg finite-difference weights.
///
/// Returns `w` with `w[k][j]` the weight of the sample at `x[j]` in the
/// approximation of the k-th derivative at `x0`, for k = 0..=max_order.
pub fn fd_weights(x: &[f64], x0: f64, max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let m = max_order;
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Per-node stencil along a 1-D coordinate line.
#[derive(Clone, Debug)]
pub struct LineStencil {
    /// First sample index (into the coordinate array) of each node's window.
    pub start: Vec<usize>,
    /// First-derivative weights per node.
    pub d1: Vec<Vec<f64>>,
    /// Second-derivative weights per node.
    pub d2: Vec<Vec<f64>>,
}

/// Builds clamped 5-point stencils for a non-periodic coordinate line.
pub fn line_stencils(coords: &[f64], width: usize) -> LineStencil {
    let n = coords.len();
    let w = width.min(n);
    let mut start = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for i in 0..n {
        let s = i.saturating_sub(w / 2).min(n - w);
        let win = &coords[s..s + w];
        let wts = fd_weights(win, coords[i], 2);
        start.push(s);
        d1.push(wts[1].clone());
        d2.push(wts[2].clone());
    }
    LineStencil { start, d1, d2 }
}

/// Derivative along a uniform periodic line (period `p`, spacing `p/n`),
/// 4th-order central: returns (d/dt, d²/dt²) of `line`.
fn periodic_derivs(line: &[f64], period: f64) -> (Vec<f64>, Vec<f64>) {
    let n = line.len();
    let h = period / n as f64;
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let m2 = line[(i + n - 2) % n];
        let m1 = line[(i + n - 1) % n];
        let p1 = line[(i + 1) % n];
        let p2 = line[(i + 2) % n];
        let c = line[i];
        d1[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        d2[i] = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    }
    (d1, d2)
}

/// First and second derivatives of `field` along both grid directions.
///
/// For polar layouts the directions are (r, θ); for rectangular layouts
/// (x, y). Returns `(f_a, f_b, f_aa, f_bb)` in grid coordinates; the
/// mixed derivative is not produced here (compose [`gradient`] instead).
pub struct GridDerivs {
    pub da: Vec<f64>,
    pub db: Vec<f64>,
    pub daa: Vec<f64>,
    pub dbb: Vec<f64>,
}

pub fn grid_derivs(grid: &ParamGrid, field: &[f64]) -> GridDerivs {
    match &grid.layout {
        GridLayout::Polar { radii, n_theta, .. } => {
            let (nr, nt) = (radii.len(), *n_theta);
            let st = line_stencils(radii, 5.min(nr));
            let mut da = vec![0.0; nr * nt];
            let mut db = vec![0.0; nr * nt];
            let mut daa = vec![0.0; nr * nt];
            let mut dbb = vec![0.0; nr * nt];
            // radial direction
            for it in 0..nt {
                for ir in 0..nr {
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for (k, (w1, w2)) in st.d1[ir].iter().zip(&st.d2[ir]).enumerate() {
                        let v = field[(st.start[ir] + k) * nt + it];
                        s1 += w1 * v;
                        s2 += w2 * v;
                    }
                    da[ir * nt + it] = s1;
                    daa[ir * nt + it] = s2;
                }
            }
            // angular direction, periodic
            let mut line = vec![0.0; nt];
            for ir in 0..nr {
                for it in 0..nt {
                    line[it] = field[ir * nt + it];
                }
                let (d1, d2) = periodic_derivs(&line, std::f64::consts::TAU);
                for it in 0..nt {
                    db[ir * nt + it] = d1[it];
                    dbb[ir * nt + it] = d2[it];
                }
            }
            GridDerivs { da, db, daa, dbb }
        }
        GridLayout::Rect {
            xs,
            ys,
            period_x,
            period_y,
            ..
        } => {
            let (nx, ny) = (xs.len(), ys.len());
            let mut da = vec![0.0; nx * ny];
            let mut db = vec![0.0; nx * ny];
            let mut daa = vec![0.0; nx * ny];
            let mut dbb = vec![0.0; nx * ny];
            let mut line = vec![0.0; nx.max(ny)];
            if let Some(p) = period_x {
                for iy in 0..ny {
                    for ix in 0..nx {
                        line[ix] = field[ix * ny + iy];
                    }
                    let (d1, d2) = periodic_derivs(&line[..nx], *p);
                    for ix in 0..nx {
                        da[ix * ny + iy] = d1[ix];
                        daa[ix * ny + iy] = d2[ix];
                    }
                }
            } else {
                let st = line_stencils(xs, 5.min(nx));
                for iy in 0..ny {
                    for ix in 0..nx {
                        let (mut s1, mut s2) = (0.0, 0.0);
                        for (k, (w1, w2)) in st.d1[ix].iter().zip(&st.d2[ix]).enumerate() {
                            let v = field[(st.start[ix] + k) * ny + iy];
                            s1 += w1 * v;
                            s2 += w2 * v;
                        }
                        da[ix * ny + iy] = s1;
                        daa[ix * ny + iy] = s2;
                    }
                }
            }
            if let Some(p) = period_y {
                for ix in 0..nx {
                    for iy in 0..ny {
                        line[iy] = field[ix * ny + iy];
                    }
                    let (d1, d2) = periodic_derivs(&line[..ny], *p);
                    for iy in 0..ny {
                        db[ix * ny + iy] = d1[iy];
                        dbb[ix * ny + iy] = d2[iy];
                    }
                }
            } else {
                let st = line_stencils(ys, 5.min(ny));
                for ix in 0..nx {
                    for iy in 0..ny {
                        let (mut s1, mut s2) = (0.0, 0.0);
                        for (k, (w1, w2)) in st.d1[iy].iter().zip(&st.d2[iy]).enumerate() {
                            let v = field[ix * ny + st.start[iy] + k];
                            s1 += w1 * v;
                            s2 += w2 * v;
                        }
                        db[ix * ny + iy] = s1;
                        dbb[ix * ny + iy] = s2;
                    }
                }
            }
            GridDerivs { da, db, daa, dbb }
        }
    }
}

/// Cartesian gradient (∂x, ∂y) of a scalar field w.r.t. the chart
/// coordinates the immersion is parameterized by.
pub fn gradient(grid: &ParamGrid, field: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let d = grid_derivs(grid, field);
    match &grid.layout {
        GridLayout::Polar { radii, n_theta, .. } => {
            let nt = *n_theta;
            let nn = grid.nodes.len();
            let mut fx = vec![0.0; nn];
            let mut fy = vec![0.0; nn];
            for (i, node) in grid.nodes.iter().enumerate() {
                let r = radii[i / nt];
                let th = node[1].atan2(node[0]);
                let (s, c) = th.sin_cos();
                fx[i] = c * d.da[i] - s / r * d.db[i];
                fy[i] = s * d.da[i] + c / r * d.db[i];
            }
            (fx, fy)
        }
        GridLayout::Rect { .. } => (d.da, d.db),
    }
}

/// Flat Laplacian ∂xx + ∂yy of a scalar field.
pub fn laplacian(grid: &ParamGrid, field: &[f64]) -> Vec<f64> {
    let d = grid_derivs(grid, field);
    match &grid.layout {
        GridLayout::Polar { radii, n_theta, .. } => {
            let nt = *n_theta;
            (0..grid.nodes.len())
                .map(|i| {
                    let r = radii[i / nt];
                    d.daa[i] + d.da[i] / r + d.dbb[i] / (r * r)
                })
                .collect()
        }
        GridLayout::Rect { .. } => (0..grid.nodes.len()).map(|i| d.daa[i] + d.dbb[i]).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grading, ParamGrid};

    #[test]
    fn fornberg_reproduces_uniform_stencils() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fd_weights(&x, 0.0, 2);
        let d1 = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        let d2 = [
            -1.0 / 12.0,
            16.0 / 12.0,
            -30.0 / 12.0,
            16.0 / 12.0,
            -1.0 / 12.0,
        ];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-13);
            assert!((w[2][j] - d2[j]).abs() < 1e-13);
        }
    }

    #[test]
    fn fornberg_exact_on_polynomials() {
        // non-uniform nodes, quartic polynomial: 5-point stencil is exact
        let x = [0.0, 0.13, 0.41, 0.77, 1.0];
        let p = |t: f64| 3.0 - t + 2.0 * t * t - 0.5 * t * t * t + t * t * t * t;
        let dp = |t: f64| -1.0 + 4.0 * t - 1.5 * t * t + 4.0 * t * t * t;
        let x0 = 0.41;
        let w = fd_weights(&x, x0, 1);
        let approx: f64 = x.iter().zip(&w[1]).map(|(&t, &c)| c * p(t)).sum();
        assert!((approx - dp(x0)).abs() < 1e-10);
    }

    #[test]
    fn polar_gradient_of_smooth_field() {
        let grid = ParamGrid::disk_gl(48, 96, 1.0, Grading::Uniform);
        let f: Vec<f64> = grid
            .nodes
            .iter()
            .map(|p| (p[0] * 1.3).sin() * (p[1] * 0.7).cos())
            .collect();
        let (fx, fy) = gradient(&grid, &f);
        let mut err: f64 = 0.0;
        for (i, p) in grid.nodes.iter().enumerate() {
            let ex = 1.3 * (p[0] * 1.3).cos() * (p[1] * 0.7).cos();
            let ey = -0.7 * (p[0] * 1.3).sin() * (p[1] * 0.7).sin();
            err = err.max((fx[i] - ex).abs()).max((fy[i] - ey).abs());
        }
        assert!(err < 1e-5, "gradient error {err}");
    }

    #[test]
    fn torus_laplacian_of_trig_field() {
        let grid = ParamGrid::flat_torus(64, 64, 1.0);
        let f: Vec<f64> = grid
            .nodes
            .iter()
            .map(|p| (std::f64::consts::TAU * p[0]).sin() * (std::f64::consts::TAU * p[1]).cos())
            .collect();
        let lap = laplacian(&grid, &f);
        let k2 = 2.0 * std::f64::consts::TAU * std::f64::consts::TAU;
        let mut err: f64 = 0.0;
        for (i, v) in lap.iter().enumerate() {
            err = err.max((v + k2 * f[i]).abs());
        }
        assert!(err < 1e-3, "laplacian error {err}");
    }
}
