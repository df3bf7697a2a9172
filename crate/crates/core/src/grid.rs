//! Parameter-domain grids with quadrature weights.
//!
//! Two layouts cover every chart the catalog and the file format
//! produce: tensor polar grids (disk / annulus, optionally graded toward
//! the inner radius to resolve branch points) and rectangular lattices
//! (flat tori, ingested charts). Quadrature is Gauss-Legendre panels or
//! exact-area midpoint cells radially, trapezoid on periodic directions.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::Result;

/// 4-point Gauss-Legendre rule on [-1, 1].
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

/// What the parameter domain represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Disk,
    Annulus,
    FlatTorus,
    CollarCylinder,
}

/// Radial (or axial) cell distribution.
#[derive(Clone, Copy, Debug)]
pub enum Grading {
    Uniform,
    /// Cell widths grow outward by `ratio` (> 1 refines toward the
    /// inner radius, where branch points live).
    Geometric {
        ratio: f64,
    },
}

impl Grading {
    /// Edge positions for `n` cells spanning [a, b], innermost first.
    pub(crate) fn edges(self, n: usize, a: f64, b: f64) -> Vec<f64> {
        let mut e = Vec::with_capacity(n + 1);
        match self {
            Grading::Uniform => {
                for k in 0..=n {
                    e.push(a + (b - a) * k as f64 / n as f64);
                }
            }
            Grading::Geometric { ratio } => {
                assert!(ratio > 1.0, "grading ratio must exceed 1");
                let total = (ratio.powi(n as i32) - 1.0) / (ratio - 1.0);
                let mut acc = a;
                e.push(acc);
                let mut w = (b - a) / total;
                for _ in 0..n {
                    acc += w;
                    e.push(acc);
                    w *= ratio;
                }
                e[n] = b;
            }
        }
        e
    }
}

/// Node layout of a structured grid. Node index is `major * minor_len + minor`,
/// with the radial/x coordinate major.
#[derive(Clone, Debug)]
pub enum GridLayout {
    /// Tensor polar grid; angular nodes at `θ_j = j·2π/n_theta`.
    Polar {
        radii: Vec<f64>,
        /// Radial cell edges (length `radii.len() + 1` for midpoint grids;
        /// midpoint-split between nodes for Gauss-Legendre grids).
        r_edges: Vec<f64>,
        n_theta: usize,
    },
    /// Rectangular lattice, optionally periodic per direction.
    Rect {
        xs: Vec<f64>,
        ys: Vec<f64>,
        x_edges: Vec<f64>,
        y_edges: Vec<f64>,
        period_x: Option<f64>,
        period_y: Option<f64>,
    },
}

/// Sampled parameter domain: nodes, quadrature weights and optional
/// smooth conformal background metric.
#[derive(Clone, Debug)]
pub struct ParamGrid {
    pub kind: DomainKind,
    pub layout: GridLayout,
    /// Chart coordinates of each node.
    pub nodes: Vec<[f64; 2]>,
    /// Parameter-area quadrature weights (positive, sum to the domain area).
    pub weights: Vec<f64>,
    /// Per-node background metric (g11, g12, g22); `None` means flat.
    pub background: Option<Vec<[f64; 3]>>,
    /// Euler characteristic when the grid samples a closed domain.
    pub euler_char: Option<i32>,
}

fn polar_nodes_weights(
    radii: &[f64],
    radial_w: &[f64],
    n_theta: usize,
) -> (Vec<[f64; 2]>, Vec<f64>) {
    let dth = std::f64::consts::TAU / n_theta as f64;
    let mut nodes = Vec::with_capacity(radii.len() * n_theta);
    let mut weights = Vec::with_capacity(radii.len() * n_theta);
    for (r, wr) in radii.iter().zip(radial_w) {
        for j in 0..n_theta {
            let th = j as f64 * dth;
            nodes.push([r * th.cos(), r * th.sin()]);
            // wr already contains the r dr Jacobian factor
            weights.push(wr * dth);
        }
    }
    (nodes, weights)
}

fn midsplit_edges(radii: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut e = Vec::with_capacity(radii.len() + 1);
    e.push(a);
    for k in 1..radii.len() {
        e.push(0.5 * (radii[k - 1] + radii[k]));
    }
    e.push(b);
    e
}

impl ParamGrid {
    /// Disk of radius `rmax` with Gauss-Legendre radial panels (4 nodes
    /// per panel, `nr` radial nodes total) and `n_theta` angular nodes.
    pub fn disk_gl(nr: usize, n_theta: usize, rmax: f64, grading: Grading) -> ParamGrid {
        Self::annulus_gl_kind(DomainKind::Disk, nr, n_theta, 0.0, rmax, grading)
    }

    /// Annulus `rmin ≤ r ≤ rmax`, Gauss-Legendre radial panels.
    pub fn annulus_gl(
        nr: usize,
        n_theta: usize,
        rmin: f64,
        rmax: f64,
        grading: Grading,
    ) -> ParamGrid {
        Self::annulus_gl_kind(DomainKind::Annulus, nr, n_theta, rmin, rmax, grading)
    }

    fn annulus_gl_kind(
        kind: DomainKind,
        nr: usize,
        n_theta: usize,
        rmin: f64,
        rmax: f64,
        grading: Grading,
    ) -> ParamGrid {
        let panels = (nr / 4).max(1);
        let edges = grading.edges(panels, rmin, rmax);
        let mut radii = Vec::with_capacity(4 * panels);
        let mut radial_w = Vec::with_capacity(4 * panels);
        for p in 0..panels {
            let (a, b) = (edges[p], edges[p + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for q in 0..4 {
                let r = mid + half * GL4_X[q];
                radii.push(r);
                radial_w.push(half * GL4_W[q] * r);
            }
        }
        let r_edges = midsplit_edges(&radii, rmin, rmax);
        let (nodes, weights) = polar_nodes_weights(&radii, &radial_w, n_theta);
        ParamGrid {
            kind,
            layout: GridLayout::Polar {
                radii,
                r_edges,
                n_theta,
            },
            nodes,
            weights,
            background: None,
            euler_char: None,
        }
    }

    /// Disk with explicit Gauss-Legendre panel edges (first edge may be 0).
    /// Used when integrands have known joints that panels must align to.
    pub fn disk_gl_edges(panel_edges: &[f64], n_theta: usize) -> ParamGrid {
        assert!(panel_edges.len() >= 2);
        let mut radii = Vec::new();
        let mut radial_w = Vec::new();
        for p in 0..panel_edges.len() - 1 {
            let (a, b) = (panel_edges[p], panel_edges[p + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for q in 0..4 {
                let r = mid + half * GL4_X[q];
                radii.push(r);
                radial_w.push(half * GL4_W[q] * r);
            }
        }
        let rmin = panel_edges[0];
        let rmax = *panel_edges.last().unwrap();
        let r_edges = midsplit_edges(&radii, rmin, rmax);
        let (nodes, weights) = polar_nodes_weights(&radii, &radial_w, n_theta);
        ParamGrid {
            kind: if rmin == 0.0 {
                DomainKind::Disk
            } else {
                DomainKind::Annulus
            },
            layout: GridLayout::Polar {
                radii,
                r_edges,
                n_theta,
            },
            nodes,
            weights,
            background: None,
            euler_char: None,
        }
    }

    /// Disk with midpoint radial cells: each node sits at its cell
    /// center and its weight equals the exact cell area, which is what
    /// ball-restricted integrals with partial cells want.
    pub fn disk_midpoint(nr: usize, n_theta: usize, rmax: f64, grading: Grading) -> ParamGrid {
        Self::annulus_midpoint_kind(DomainKind::Disk, nr, n_theta, 0.0, rmax, grading)
    }

    /// Annulus with midpoint radial cells.
    pub fn annulus_midpoint(
        nr: usize,
        n_theta: usize,
        rmin: f64,
        rmax: f64,
        grading: Grading,
    ) -> ParamGrid {
        Self::annulus_midpoint_kind(DomainKind::Annulus, nr, n_theta, rmin, rmax, grading)
    }

    /// Midpoint polar grid from explicit radial cell edges.
    pub fn disk_midpoint_edges(cell_edges: &[f64], n_theta: usize) -> ParamGrid {
        let kind = if cell_edges[0] == 0.0 {
            DomainKind::Disk
        } else {
            DomainKind::Annulus
        };
        Self::midpoint_from_edges(kind, cell_edges.to_vec(), n_theta)
    }

    fn annulus_midpoint_kind(
        kind: DomainKind,
        nr: usize,
        n_theta: usize,
        rmin: f64,
        rmax: f64,
        grading: Grading,
    ) -> ParamGrid {
        let r_edges = grading.edges(nr, rmin, rmax);
        Self::midpoint_from_edges(kind, r_edges, n_theta)
    }

    fn midpoint_from_edges(kind: DomainKind, r_edges: Vec<f64>, n_theta: usize) -> ParamGrid {
        let nr = r_edges.len() - 1;
        let mut radii = Vec::with_capacity(nr);
        let mut radial_w = Vec::with_capacity(nr);
        for k in 0..nr {
            let (a, b) = (r_edges[k], r_edges[k + 1]);
            let r = 0.5 * (a + b);
            radii.push(r);
            radial_w.push((b - a) * r);
        }
        let (nodes, weights) = polar_nodes_weights(&radii, &radial_w, n_theta);
        ParamGrid {
            kind,
            layout: GridLayout::Polar {
                radii,
                r_edges,
                n_theta,
            },
            nodes,
            weights,
            background: None,
            euler_char: None,
        }
    }

    /// Uniform lattice over the flat-torus fundamental domain [0,1]×[0,b],
    /// cell-centered, periodic in both directions.
    pub fn flat_torus(rows: usize, cols: usize, b: f64) -> ParamGrid {
        let xs: Vec<f64> = (0..rows).map(|i| (i as f64 + 0.5) / rows as f64).collect();
        let ys: Vec<f64> = (0..cols)
            .map(|j| (j as f64 + 0.5) * b / cols as f64)
            .collect();
        let x_edges: Vec<f64> = (0..=rows).map(|i| i as f64 / rows as f64).collect();
        let y_edges: Vec<f64> = (0..=cols).map(|j| j as f64 * b / cols as f64).collect();
        let w = (1.0 / rows as f64) * (b / cols as f64);
        let mut nodes = Vec::with_capacity(rows * cols);
        for &x in &xs {
            for &y in &ys {
                nodes.push([x, y]);
            }
        }
        ParamGrid {
            kind: DomainKind::FlatTorus,
            layout: GridLayout::Rect {
                xs,
                ys,
                x_edges,
                y_edges,
                period_x: Some(1.0),
                period_y: Some(b),
            },
            nodes,
            weights: vec![w; rows * cols],
            background: None,
            euler_char: Some(0),
        }
    }

    /// Rectangular chart grid from explicit coordinate lines
    /// (trapezoid weights; periodic directions carry their period).
    pub fn rect(
        kind: DomainKind,
        xs: Vec<f64>,
        ys: Vec<f64>,
        period_x: Option<f64>,
        period_y: Option<f64>,
    ) -> ParamGrid {
        fn line_weights(t: &[f64], period: Option<f64>) -> Vec<f64> {
            match period {
                Some(p) => vec![p / t.len() as f64; t.len()],
                None => {
                    let n = t.len();
                    (0..n)
                        .map(|i| {
                            let lo = if i == 0 {
                                t[0]
                            } else {
                                0.5 * (t[i - 1] + t[i])
                            };
                            let hi = if i + 1 == n {
                                t[n - 1]
                            } else {
                                0.5 * (t[i] + t[i + 1])
                            };
                            hi - lo
                        })
                        .collect()
                }
            }
        }
        fn line_edges(t: &[f64], period: Option<f64>) -> Vec<f64> {
            let n = t.len();
            match period {
                Some(p) => {
                    let h = p / n as f64;
                    (0..=n).map(|i| t[0] - 0.5 * h + i as f64 * h).collect()
                }
                None => {
                    let mut e = Vec::with_capacity(n + 1);
                    e.push(t[0]);
                    for i in 1..n {
                        e.push(0.5 * (t[i - 1] + t[i]));
                    }
                    e.push(t[n - 1]);
                    e
                }
            }
        }
        let wx = line_weights(&xs, period_x);
        let wy = line_weights(&ys, period_y);
        let x_edges = line_edges(&xs, period_x);
        let y_edges = line_edges(&ys, period_y);
        let mut nodes = Vec::with_capacity(xs.len() * ys.len());
        let mut weights = Vec::with_capacity(xs.len() * ys.len());
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                nodes.push([x, y]);
                weights.push(wx[i] * wy[j]);
            }
        }
        let euler_char = if period_x.is_some() && period_y.is_some() {
            Some(0)
        } else {
            None
        };
        ParamGrid {
            kind,
            layout: GridLayout::Rect {
                xs,
                ys,
                x_edges,
                y_edges,
                period_x,
                period_y,
            },
            nodes,
            weights,
            background: None,
            euler_char,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Total parameter area implied by the layout.
    pub fn parameter_area(&self) -> f64 {
        match &self.layout {
            GridLayout::Polar { r_edges, .. } => {
                let (a, b) = (r_edges[0], *r_edges.last().unwrap());
                std::f64::consts::PI * (b * b - a * a)
            }
            GridLayout::Rect {
                xs,
                ys,
                x_edges,
                y_edges,
                period_x,
                period_y,
            } => {
                let lx = period_x.unwrap_or(x_edges[xs.len()] - x_edges[0]);
                let ly = period_y.unwrap_or(y_edges[ys.len()] - y_edges[0]);
                lx * ly
            }
        }
    }

    /// Radial extent of polar grids.
    pub fn radial_range(&self) -> Option<(f64, f64)> {
        match &self.layout {
            GridLayout::Polar { r_edges, .. } => Some((r_edges[0], *r_edges.last().unwrap())),
            GridLayout::Rect { .. } => None,
        }
    }

    /// Checks the structural invariants: positive weights summing to the
    /// parameter area, positive-definite background, uniform torus lattice.
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(ConfsurfError::InvalidInput(
                "quadrature weights must be positive".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        let area = self.parameter_area();
        if (total - area).abs() > 1e-8 * area.max(1.0) {
            return Err(ConfsurfError::InvalidInput(format!(
                "weights sum to {total}, parameter area is {area}"
            )));
        }
        if let Some(bg) = &self.background {
            for (i, g) in bg.iter().enumerate() {
                let det = g[0] * g[2] - g[1] * g[1];
                if !(g[0] > 0.0 && det > 0.0) {
                    return Err(ConfsurfError::InvalidInput(format!(
                        "background metric not positive definite at node {i}"
                    )));
                }
            }
        }
        if self.kind == DomainKind::FlatTorus {
            if let GridLayout::Rect { xs, ys, .. } = &self.layout {
                for line in [xs, ys] {
                    for w in line.windows(2) {
                        let h0 = line[1] - line[0];
                        if ((w[1] - w[0]) - h0).abs() > 1e-12 * h0.abs().max(1.0) {
                            return Err(ConfsurfError::InvalidInput(
                                "flat-torus lattice must be uniform".into(),
                            ));
                        }
                    }
                }
            } else {
                return Err(ConfsurfError::WrongLayout {
                    required: "rectangular",
                });
            }
        }
        Ok(())
    }

    /// Indices of nodes at distance ≥ `margin` (in chart units) from
    /// every non-periodic grid boundary.
    pub fn interior_nodes(&self, margin: f64) -> Vec<usize> {
        match &self.layout {
            GridLayout::Polar {
                radii,
                r_edges,
                n_theta,
            } => {
                let (rmin, rmax) = (r_edges[0], *r_edges.last().unwrap());
                let mut out = Vec::new();
                for (ir, &r) in radii.iter().enumerate() {
                    let inner_ok = rmin == 0.0 || r - rmin >= margin;
                    if inner_ok && rmax - r >= margin {
                        for it in 0..*n_theta {
                            out.push(ir * n_theta + it);
                        }
                    }
                }
                out
            }
            GridLayout::Rect {
                xs,
                ys,
                period_x,
                period_y,
                ..
            } => {
                let (x0, x1) = (xs[0], xs[xs.len() - 1]);
                let (y0, y1) = (ys[0], ys[ys.len() - 1]);
                let mut out = Vec::new();
                for (i, &x) in xs.iter().enumerate() {
                    let x_ok = period_x.is_some() || (x - x0 >= margin && x1 - x >= margin);
                    if !x_ok {
                        continue;
                    }
                    for (j, &y) in ys.iter().enumerate() {
                        let y_ok = period_y.is_some() || (y - y0 >= margin && y1 - y >= margin);
                        if y_ok {
                            out.push(i * ys.len() + j);
                        }
                    }
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_weights_sum_to_area() {
        for grading in [Grading::Uniform, Grading::Geometric { ratio: 1.2 }] {
            let g = ParamGrid::disk_gl(32, 48, 1.5, grading);
            g.validate().unwrap();
            let sum: f64 = g.weights.iter().sum();
            assert!((sum - PI * 2.25).abs() < 1e-10);
        }
        let g = ParamGrid::disk_midpoint(32, 48, 1.5, Grading::Geometric { ratio: 1.1 });
        g.validate().unwrap();
        let sum: f64 = g.weights.iter().sum();
        assert!((sum - PI * 2.25).abs() < 1e-10);
    }

    #[test]
    fn annulus_weights_and_range() {
        let g = ParamGrid::annulus_gl(24, 32, 0.25, 1.0, Grading::Geometric { ratio: 1.3 });
        g.validate().unwrap();
        let sum: f64 = g.weights.iter().sum();
        assert!((sum - PI * (1.0 - 0.0625)).abs() < 1e-10);
        assert_eq!(g.radial_range(), Some((0.25, 1.0)));
    }

    #[test]
    fn torus_is_uniform_and_validates() {
        let g = ParamGrid::flat_torus(16, 24, 2.0);
        g.validate().unwrap();
        assert_eq!(g.euler_char, Some(0));
        let sum: f64 = g.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gl_disk_integrates_polynomial_exactly() {
        // ∫_D (x² + y²) dA over radius 2 = 2π · 2⁴/4 = 8π
        let g = ParamGrid::disk_gl(16, 64, 2.0, Grading::Uniform);
        let val: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .map(|(p, w)| w * (p[0] * p[0] + p[1] * p[1]))
            .sum();
        assert!((val - 8.0 * PI).abs() < 1e-10, "got {val}");
    }

    #[test]
    fn interior_excludes_boundary_ring() {
        let g = ParamGrid::disk_gl(16, 16, 1.0, Grading::Uniform);
        let inner = g.interior_nodes(0.2);
        assert!(!inner.is_empty());
        for i in inner {
            let p = g.nodes[i];
            assert!(p[0].hypot(p[1]) <= 0.8 + 1e-12);
        }
    }
}
