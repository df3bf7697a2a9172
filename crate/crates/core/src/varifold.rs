//! Pushforward-measure statistics: mass and Willmore growth in ambient
//! balls, Simon's monotonicity function, densities, Li-Yau and the
//! diameter bounds.
//!
//! The monotone quantity is
//!
//! ```text
//! g_{x₀}(r) = μ(B_r)/(πr²) + (1/4π) W(μ, B_r)
//!            + (1/2πr²) ∫_{B_r} ⟨x−x₀, H⟩ dμ
//! ```
//!
//! and the growth between two radii equals
//! `(1/16π) ∫_{B_ρ∖B_σ} |H + 4 (x−x₀)^⊥/|x−x₀|²|² dμ`.
//!
//! Ball-restricted integrals classify each parameter cell against the
//! sphere `|x − x₀| = r`; straddling cells are split into 3×3 subcells
//! whose corner distances drive an exact linear clip on two triangles
//! per subcell. Inputs are treated as embedded (`H_μ = H`); immersed
//! multiplicity weighting would need caller-declared sheet structure
//! and is out of scope here.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::geometry::{surface_energy, GeometryFields};
use crate::grid::{GridLayout, ParamGrid};
use crate::immersion::{vecn, SampledImmersion, Surface};
use crate::interp::Interp;
use crate::Result;

/// Radial profile of ball-restricted quantities around a center.
#[derive(Clone, Debug, Serialize)]
pub struct BallProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    /// μ(B_r) per radius.
    pub mass: Vec<f64>,
    /// ¼ ∫_{B_r} |H|² dμ per radius.
    pub willmore_local: Vec<f64>,
    /// ∫_{B_r} ⟨x−x₀, H⟩ dμ per radius.
    pub moment: Vec<f64>,
    /// Simon's monotonicity function per radius.
    pub g_values: Vec<f64>,
}

/// Cell bounds in grid coordinates plus the measure-exact area element.
fn cell_bounds(grid: &ParamGrid, i: usize) -> ([f64; 2], [f64; 2]) {
    match &grid.layout {
        GridLayout::Polar {
            r_edges, n_theta, ..
        } => {
            let (ir, it) = (i / n_theta, i % n_theta);
            let dth = std::f64::consts::TAU / *n_theta as f64;
            let t0 = it as f64 * dth - 0.5 * dth;
            ([r_edges[ir], r_edges[ir + 1]], [t0, t0 + dth])
        }
        GridLayout::Rect {
            x_edges,
            y_edges,
            ys,
            ..
        } => {
            let ny = ys.len();
            let (ix, iy) = (i / ny, i % ny);
            (
                [x_edges[ix], x_edges[ix + 1]],
                [y_edges[iy], y_edges[iy + 1]],
            )
        }
    }
}

fn is_polar(grid: &ParamGrid) -> bool {
    matches!(grid.layout, GridLayout::Polar { .. })
}

/// Chart point for cell coordinates (a, b): polar cells carry (r, θ).
fn cell_point(polar: bool, a: f64, b: f64) -> [f64; 2] {
    if polar {
        [a * b.cos(), a * b.sin()]
    } else {
        [a, b]
    }
}

/// Parameter measure of the sub-rectangle [a0,a1]×[b0,b1] of a cell.
fn sub_measure(polar: bool, a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    if polar {
        0.5 * (a1 * a1 - a0 * a0) * (b1 - b0)
    } else {
        (a1 - a0) * (b1 - b0)
    }
}

/// Fraction of a triangle with vertex values (a, b, c) where the linear
/// interpolant lies below `t`.
fn triangle_fraction(mut a: f64, mut b: f64, mut c: f64, t: f64) -> f64 {
    // sort ascending
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if t <= a {
        0.0
    } else if t >= c {
        1.0
    } else if t < b {
        (t - a) * (t - a) / ((b - a) * (c - a))
    } else {
        1.0 - (c - t) * (c - t) / ((c - a) * (c - b))
    }
}

/// Per-cell machinery shared by the profile and the identity check.
struct BallGeom<'a> {
    chart: &'a SampledImmersion,
    interp: Interp<'a>,
    polar: bool,
    /// Distance of each node image to the center.
    node_dist: Vec<f64>,
    /// Upper bound on the image radius of each cell.
    cell_reach: Vec<f64>,
    center: Vec<f64>,
}

impl<'a> BallGeom<'a> {
    fn new(chart: &'a SampledImmersion, geom: &'a GeometryFields, x0: &[f64]) -> Self {
        let polar = is_polar(&chart.grid);
        let node_dist: Vec<f64> = (0..chart.node_count())
            .map(|i| vecn::dist_sq(chart.point(i), x0).sqrt())
            .collect();
        let cell_reach: Vec<f64> = (0..chart.node_count())
            .map(|i| {
                let ([a0, a1], [b0, b1]) = cell_bounds(&chart.grid, i);
                let diag = if polar {
                    let rmid = 0.5 * (a0 + a1);
                    (a1 - a0).hypot(rmid * (b1 - b0))
                } else {
                    (a1 - a0).hypot(b1 - b0)
                };
                // half-diagonal stretched by the conformal factor, padded
                geom.u[i].exp() * diag * 0.9
            })
            .collect();
        BallGeom {
            chart,
            interp: Interp::new(&chart.grid),
            polar,
            node_dist,
            cell_reach,
            center: x0.to_vec(),
        }
    }

    /// Distances at the 4×4 corner lattice of cell `i`.
    fn corner_distances(&self, i: usize) -> [f64; 16] {
        let ([a0, a1], [b0, b1]) = cell_bounds(&self.chart.grid, i);
        let n = self.chart.n;
        let mut pos = vec![0.0; n];
        let mut out = [0.0; 16];
        for (idx, (ia, ib)) in (0..4)
            .flat_map(|ia| (0..4).map(move |ib| (ia, ib)))
            .enumerate()
        {
            let a = a0 + (a1 - a0) * ia as f64 / 3.0;
            let b = b0 + (b1 - b0) * ib as f64 / 3.0;
            self.interp
                .eval(&self.chart.f, n, cell_point(self.polar, a, b), &mut pos);
            out[idx] = vecn::dist_sq(&pos, &self.center).sqrt();
        }
        out
    }

    /// Coverage fraction and (optionally) sub-resolved integrals of the
    /// given node-major scalar fields over `cell ∩ {d ≤ r}`.
    /// Returns (covered measure, per-field integral).
    fn clipped_integrals(
        &self,
        i: usize,
        corners: &[f64; 16],
        r: f64,
        fields: &[&[f64]],
        out: &mut [f64],
    ) -> f64 {
        let ([a0, a1], [b0, b1]) = cell_bounds(&self.chart.grid, i);
        out.fill(0.0);
        let mut covered = 0.0;
        let mut val = [0.0];
        for sa in 0..3 {
            for sb in 0..3 {
                let d00 = corners[sa * 4 + sb];
                let d01 = corners[sa * 4 + sb + 1];
                let d10 = corners[(sa + 1) * 4 + sb];
                let d11 = corners[(sa + 1) * 4 + sb + 1];
                let frac = 0.5 * triangle_fraction(d00, d01, d11, r)
                    + 0.5 * triangle_fraction(d00, d11, d10, r);
                if frac == 0.0 {
                    continue;
                }
                let sa0 = a0 + (a1 - a0) * sa as f64 / 3.0;
                let sa1 = a0 + (a1 - a0) * (sa + 1) as f64 / 3.0;
                let sb0 = b0 + (b1 - b0) * sb as f64 / 3.0;
                let sb1 = b0 + (b1 - b0) * (sb + 1) as f64 / 3.0;
                let meas = sub_measure(self.polar, sa0, sa1, sb0, sb1) * frac;
                covered += meas;
                let centroid = cell_point(self.polar, 0.5 * (sa0 + sa1), 0.5 * (sb0 + sb1));
                for (fi, field) in fields.iter().enumerate() {
                    self.interp.eval(field, 1, centroid, &mut val);
                    out[fi] += meas * val[0];
                }
            }
        }
        covered
    }
}

/// Computes the radial profile of mass, local Willmore energy, first
/// moment and g around `x0`.
pub fn ball_profile(
    surface: &Surface,
    geoms: &[GeometryFields],
    x0: &[f64],
    radii: &[f64],
) -> Result<BallProfile> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(ConfsurfError::InvalidInput(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let nrad = radii.len();
    let mut mass = vec![0.0; nrad];
    let mut wloc = vec![0.0; nrad];
    let mut mom = vec![0.0; nrad];

    for (chart, geom) in surface.charts.iter().zip(geoms) {
        let n = chart.n;
        let bg = BallGeom::new(chart, geom, x0);
        // node-major densities entering the three integrals
        let e2u = &geom.e2u;
        let wdens: Vec<f64> = (0..chart.node_count())
            .map(|i| 0.25 * geom.h_sq[i] * e2u[i])
            .collect();
        let mdens: Vec<f64> = (0..chart.node_count())
            .map(|i| {
                let p = chart.point(i);
                let h = &geom.h[i * n..(i + 1) * n];
                let dot: f64 = (0..n).map(|k| (p[k] - x0[k]) * h[k]).sum();
                dot * e2u[i]
            })
            .collect();

        let partial = crate::exec::fold_chunks(
            chart.node_count(),
            || (vec![0.0; nrad], vec![0.0; nrad], vec![0.0; nrad]),
            |acc, i| {
                let pou = chart.pou(i);
                if pou == 0.0 {
                    return;
                }
                let w = chart.grid.weights[i] * pou;
                let (dc, reach) = (bg.node_dist[i], bg.cell_reach[i]);
                let mut corners: Option<[f64; 16]> = None;
                for (ri, &r) in radii.iter().enumerate() {
                    if dc + reach <= r {
                        // fully inside
                        acc.0[ri] += w * e2u[i];
                        acc.1[ri] += w * wdens[i];
                        acc.2[ri] += w * mdens[i];
                    } else if dc - reach < r {
                        let c = corners.get_or_insert_with(|| bg.corner_distances(i));
                        let mut vals = [0.0; 3];
                        bg.clipped_integrals(i, c, r, &[e2u, &wdens, &mdens], &mut vals);
                        acc.0[ri] += pou * vals[0];
                        acc.1[ri] += pou * vals[1];
                        acc.2[ri] += pou * vals[2];
                    }
                }
            },
            |acc, p| {
                for ri in 0..nrad {
                    acc.0[ri] += p.0[ri];
                    acc.1[ri] += p.1[ri];
                    acc.2[ri] += p.2[ri];
                }
            },
        );
        for ri in 0..nrad {
            mass[ri] += partial.0[ri];
            wloc[ri] += partial.1[ri];
            mom[ri] += partial.2[ri];
        }
    }

    let g_values: Vec<f64> = (0..nrad)
        .map(|ri| {
            let r = radii[ri];
            let pi_r2 = std::f64::consts::PI * r * r;
            mass[ri] / pi_r2 + wloc[ri] / (4.0 * std::f64::consts::PI) + mom[ri] / (2.0 * pi_r2)
        })
        .collect();
    Ok(BallProfile {
        center: x0.to_vec(),
        radii: radii.to_vec(),
        mass,
        willmore_local: wloc,
        moment: mom,
        g_values,
    })
}

/// Both sides of the monotonicity identity between two profile radii.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MonotonicityDefect {
    /// g(ρ) − g(σ).
    pub lhs: f64,
    /// (1/16π) ∫_{B_ρ∖B_σ} |H + 4 (x−x₀)^⊥ / |x−x₀|²|² dμ.
    pub rhs: f64,
    pub gap: f64,
}

pub fn monotonicity_defect(
    surface: &Surface,
    geoms: &[GeometryFields],
    profile: &BallProfile,
    sigma: f64,
    rho: f64,
) -> Result<MonotonicityDefect> {
    if !(sigma < rho) {
        return Err(ConfsurfError::BadAnnulus { sigma, rho });
    }
    let find = |r: f64| -> Result<usize> {
        profile
            .radii
            .iter()
            .position(|&x| (x - r).abs() < 1e-12 * (1.0 + r))
            .ok_or_else(|| ConfsurfError::InvalidInput(format!("radius {r} is not in the profile")))
    };
    let (isig, irho) = (find(sigma)?, find(rho)?);
    let lhs = profile.g_values[irho] - profile.g_values[isig];

    // annulus integral of the squared defect vector, with ⊥ the
    // projection onto the normal space of the image point
    let mut rhs = 0.0;
    for (chart, geom) in surface.charts.iter().zip(geoms) {
        let n = chart.n;
        let bg = BallGeom::new(chart, geom, &profile.center);
        let defect_sq: Vec<f64> = (0..chart.node_count())
            .map(|i| {
                let sl = i * n..(i + 1) * n;
                let t1 = &chart.df[0][sl.clone()];
                let t2 = &chart.df[1][sl.clone()];
                let n1 = vecn::norm(t1);
                let e1: Vec<f64> = t1.iter().map(|v| v / n1).collect();
                let mut e2: Vec<f64> = t2.to_vec();
                let c = vecn::dot(&e2, &e1);
                vecn::axpy(&mut e2, -c, &e1);
                let n2 = vecn::norm(&e2);
                for v in e2.iter_mut() {
                    *v /= n2;
                }
                let p = chart.point(i);
                let dx: Vec<f64> = (0..n).map(|k| p[k] - profile.center[k]).collect();
                let d2 = vecn::norm_sq(&dx);
                if d2 == 0.0 {
                    return 0.0;
                }
                let (c1, c2) = (vecn::dot(&dx, &e1), vecn::dot(&dx, &e2));
                let mut s = 0.0;
                for k in 0..n {
                    let perp = dx[k] - c1 * e1[k] - c2 * e2[k];
                    let v = geom.h[i * n + k] + 4.0 * perp / d2;
                    s += v * v;
                }
                s
            })
            .collect();

        let total: f64 = crate::exec::sum_over(chart.node_count(), |i| {
            let pou = chart.pou(i);
            if pou == 0.0 {
                return 0.0;
            }
            let (dc, reach) = (bg.node_dist[i], bg.cell_reach[i]);
            // coverage fraction of the annulus
            let frac_at = |r: f64, corners: &mut Option<[f64; 16]>| -> f64 {
                if dc + reach <= r {
                    1.0
                } else if dc - reach >= r {
                    0.0
                } else {
                    let c = corners.get_or_insert_with(|| bg.corner_distances(i));
                    let measure: f64 = chart.grid.weights[i];
                    let covered = bg.clipped_integrals(i, c, r, &[], &mut []);
                    (covered / measure).clamp(0.0, 1.0)
                }
            };
            let mut corners = None;
            let f = frac_at(rho, &mut corners) - frac_at(sigma, &mut corners);
            chart.grid.weights[i] * pou * geom.e2u[i] * f * defect_sq[i]
        });
        rhs += total;
    }
    rhs /= 16.0 * std::f64::consts::PI;
    Ok(MonotonicityDefect {
        lhs,
        rhs,
        gap: lhs - rhs,
    })
}

/// Density estimate at one sample point.
#[derive(Clone, Debug, Serialize)]
pub struct LiYauRow {
    pub point: Vec<f64>,
    /// Extrapolated density θ²(μ, x).
    pub theta_sq: f64,
    /// W/4π.
    pub bound: f64,
    /// Radii used for the extrapolation.
    pub radii: Vec<f64>,
    /// Spread between the two pairwise extrapolations.
    pub spread: f64,
}

/// Estimates θ² at each sample point as the extrapolated limit of
/// `μ(B_r)/(πr²)` over the three smallest reliable radii (first-order
/// Richardson) and checks the Li-Yau bound `θ² ≤ W/4π`.
pub fn li_yau_check(
    surface: &Surface,
    geoms: &[GeometryFields],
    points: &[Vec<f64>],
) -> Result<Vec<LiYauRow>> {
    let rep = surface_energy(surface, geoms);
    let bound = rep.willmore / (4.0 * std::f64::consts::PI);
    // smallest radius that several cells still resolve
    let mut reaches: Vec<f64> = Vec::new();
    for (chart, geom) in surface.charts.iter().zip(geoms) {
        let bgless: Vec<f64> = (0..chart.node_count())
            .map(|i| {
                let ([a0, a1], [b0, b1]) = cell_bounds(&chart.grid, i);
                let diag = if is_polar(&chart.grid) {
                    (a1 - a0).hypot(0.5 * (a0 + a1) * (b1 - b0))
                } else {
                    (a1 - a0).hypot(b1 - b0)
                };
                geom.u[i].exp() * diag
            })
            .collect();
        reaches.extend(bgless);
    }
    reaches.sort_by(f64::total_cmp);
    let median = reaches[reaches.len() / 2];
    let base = 5.0 * median;
    let radii = [base, 1.5 * base, 2.0 * base];

    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let prof = ball_profile(surface, geoms, p, &radii)?;
        let t: Vec<f64> = (0..3)
            .map(|i| prof.mass[i] / (std::f64::consts::PI * radii[i] * radii[i]))
            .collect();
        // one Richardson step in r²: smooth surfaces have
        // μ(B_r)/(πr²) = θ² + c r² + O(r⁴), with no odd term
        let extrap = |i: usize, j: usize| -> f64 {
            let (qi, qj) = (radii[i] * radii[i], radii[j] * radii[j]);
            t[i] - (t[j] - t[i]) * qi / (qj - qi)
        };
        let e1 = extrap(0, 1);
        let e2 = extrap(1, 2);
        rows.push(LiYauRow {
            point: p.clone(),
            theta_sq: e1,
            bound,
            radii: radii.to_vec(),
            spread: (e1 - e2).abs(),
        });
    }
    Ok(rows)
}

/// Diameter bound check: `√(area/W) ≤ diam ≤ C √(area·W)` with the
/// non-explicit C reported as the observed ratio.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiameterBounds {
    /// √(area/W).
    pub lower: f64,
    pub diam: f64,
    /// diam / √(area·W).
    pub upper_ratio: f64,
    pub lower_holds: bool,
}

pub fn diameter_bounds_check(surface: &Surface, geoms: &[GeometryFields]) -> DiameterBounds {
    let rep = surface_energy(surface, geoms);
    let lower = (rep.area / rep.willmore).sqrt();
    let upper_ratio = rep.diam / (rep.area * rep.willmore).sqrt();
    DiameterBounds {
        lower,
        diam: rep.diam,
        upper_ratio,
        lower_holds: lower <= rep.diam * (1.0 + 1e-9),
    }
}
