//! Newtonian potential on the disk and harmonicity diagnostics.
//!
//! `solve_potential` evaluates
//!
//! ```text
//! v(z) = -(1/2π) ∫_D log|z-w| s(w) dA(w)
//! ```
//!
//! as a dense kernel sum with a second-order singularity subtraction:
//! the constant and gradient of the source at the target are peeled off
//! and integrated in closed form over the whole disk,
//!
//! ```text
//! ∫_{D_R} log|z-w| dA(w)          = π r²/2 + π R² (log R − ½)
//! ∫_{D_R} log|z-w| (w−z) dA(w)    = −π z (r²/4 + R² log R),   r = |z|
//! ```
//!
//! while the remainder (which vanishes quadratically at the target) is
//! integrated cell-exactly near the singularity by subdividing the
//! neighboring cells. On midpoint-cell grids the node weights coincide
//! with cell areas, so the far field is a plain midpoint rule and the
//! quadrature error stays a smooth function of the target point.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::fd;
use crate::grid::{GridLayout, ParamGrid};
use crate::interp::{self, Interp};
use crate::Result;

/// Solution of `-Δv = source` on the disk by logarithmic potential.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialSolution {
    /// Potential at every grid node.
    pub v: Vec<f64>,
    /// ‖v‖_∞ over the grid.
    pub sup_norm: f64,
    /// ‖Dv‖_{L²(D)}.
    pub grad_l2: f64,
    /// ∫_D |source| dA.
    pub source_l1: f64,
}

/// Rings/sectors around the target whose cells are integrated by
/// subdivision instead of the plain node rule.
const NEAR_RINGS: usize = 2;
const NEAR_SUB: usize = 8;

pub fn solve_potential(grid: &ParamGrid, source: &[f64]) -> Result<PotentialSolution> {
    let (radii, r_edges, n_theta) = match &grid.layout {
        GridLayout::Polar {
            radii,
            r_edges,
            n_theta,
        } => (radii, r_edges, *n_theta),
        GridLayout::Rect { .. } => {
            return Err(ConfsurfError::WrongLayout {
                required: "polar disk",
            })
        }
    };
    if r_edges[0] > 0.0 {
        return Err(ConfsurfError::WrongLayout {
            required: "disk (inner radius 0)",
        });
    }
    let nn = grid.node_count();
    let nr = radii.len();
    let nt = n_theta;
    let big_r = *r_edges.last().unwrap();
    let dth = std::f64::consts::TAU / nt as f64;

    let (sx, sy) = fd::gradient(grid, source);
    let it = Interp::new(grid);

    let v: Vec<f64> = crate::exec::map_collect(nn, |i| {
        let z = grid.nodes[i];
        let (si, gx, gy) = (source[i], sx[i], sy[i]);
        let (ir_c, it_c) = (i / nt, i % nt);
        // remainder after subtracting the linear model at z
        let rem = |w: [f64; 2], sw: f64| -> f64 {
            let (dx, dy) = (w[0] - z[0], w[1] - z[1]);
            let d2 = dx * dx + dy * dy;
            if d2 == 0.0 {
                return 0.0;
            }
            0.5 * d2.ln() * (sw - si - gx * dx - gy * dy)
        };

        let mut acc = 0.0;
        for j in 0..nn {
            let (ir, ith) = (j / nt, j % nt);
            let dring = ir.abs_diff(ir_c);
            let dsec = {
                let d = ith.abs_diff(it_c);
                d.min(nt - d)
            };
            if dring <= NEAR_RINGS && dsec <= NEAR_RINGS {
                continue; // handled by subdivision below
            }
            acc += grid.weights[j] * rem(grid.nodes[j], source[j]);
        }

        // near cells: subdivided midpoint rule with interpolated source
        let mut buf = [0.0];
        for ir in ir_c.saturating_sub(NEAR_RINGS)..=(ir_c + NEAR_RINGS).min(nr - 1) {
            let (r0, r1) = (r_edges[ir], r_edges[ir + 1]);
            for doff in 0..=2 * NEAR_RINGS {
                let ith = (it_c + nt + doff) as i64 - NEAR_RINGS as i64;
                let ith = (ith.rem_euclid(nt as i64)) as usize;
                let t0 = (ith as f64 - 0.5) * dth;
                for a in 0..NEAR_SUB {
                    let rs0 = r0 + (r1 - r0) * a as f64 / NEAR_SUB as f64;
                    let rs1 = r0 + (r1 - r0) * (a + 1) as f64 / NEAR_SUB as f64;
                    let rc = 0.5 * (rs0 + rs1);
                    let warea = rc * (rs1 - rs0) * dth / NEAR_SUB as f64;
                    for b in 0..NEAR_SUB {
                        let tc = t0 + dth * (b as f64 + 0.5) / NEAR_SUB as f64;
                        let w = [rc * tc.cos(), rc * tc.sin()];
                        it.eval(source, 1, w, &mut buf);
                        acc += warea * rem(w, buf[0]);
                    }
                }
            }
        }

        // closed-form contributions of the subtracted linear model
        let r2 = z[0] * z[0] + z[1] * z[1];
        let phi = std::f64::consts::PI * (0.5 * r2 + big_r * big_r * (big_r.ln() - 0.5));
        let gvec = -std::f64::consts::PI * (0.25 * r2 + big_r * big_r * big_r.ln());
        acc += si * phi + (gx * z[0] + gy * z[1]) * gvec;

        -acc / std::f64::consts::TAU
    });

    let (vx, vy) = fd::gradient(grid, &v);
    let grad_l2 = (0..nn)
        .map(|i| grid.weights[i] * (vx[i] * vx[i] + vy[i] * vy[i]))
        .sum::<f64>()
        .sqrt();
    let sup_norm = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let source_l1 = (0..nn)
        .map(|i| grid.weights[i] * source[i].abs())
        .sum::<f64>();
    Ok(PotentialSolution {
        v,
        sup_norm,
        grad_l2,
        source_l1,
    })
}

/// Max interior violation of the mean-value property of `u - v`:
/// `|(u-v)(z) - mean_{∂D_margin(z)}(u-v)|` over interior nodes.
pub fn harmonic_defect(grid: &ParamGrid, u: &[f64], v: &[f64], margin: f64) -> Result<f64> {
    let (radii, r_edges, n_theta) = match &grid.layout {
        GridLayout::Polar {
            radii,
            r_edges,
            n_theta,
        } => (radii, r_edges, *n_theta),
        GridLayout::Rect { .. } => {
            return Err(ConfsurfError::WrongLayout {
                required: "polar disk/annulus",
            })
        }
    };
    let (rmin, rmax) = (r_edges[0], *r_edges.last().unwrap());
    let diff: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    let it = Interp::new(grid);
    let mut eligible = Vec::new();
    for (ir, &r) in radii.iter().enumerate() {
        let inner_ok = if rmin > 0.0 { r - margin > rmin } else { true };
        if inner_ok && r + margin < rmax {
            eligible.push(ir);
        }
    }
    if eligible.is_empty() {
        return Err(ConfsurfError::EmptyInterior { margin });
    }
    let worst = crate::exec::max_over(eligible.len(), |k| {
        let ir = eligible[k];
        let mut w: f64 = 0.0;
        for ith in 0..n_theta {
            let i = ir * n_theta + ith;
            let z = grid.nodes[i];
            let mean = it.circle_mean(&diff, z, margin, 32);
            w = w.max((diff[i] - mean).abs());
        }
        w
    })
    .max(0.0);
    Ok(worst)
}

/// Flux integrals `(1/2π) ∮_{∂D_ρ} ∂w/∂r ds` at the requested radii and
/// their mean — the coefficient of `log|z|` in the field.
#[derive(Clone, Debug, Serialize)]
pub struct LogCoefficient {
    pub alpha: f64,
    /// (radius, flux value) pairs.
    pub per_radius: Vec<(f64, f64)>,
    /// Max minus min of the per-radius values.
    pub spread: f64,
}

pub fn log_coefficient(
    grid: &ParamGrid,
    field: &[f64],
    radii_req: &[f64],
) -> Result<LogCoefficient> {
    let r_edges = match &grid.layout {
        GridLayout::Polar { r_edges, .. } => r_edges,
        GridLayout::Rect { .. } => {
            return Err(ConfsurfError::WrongLayout {
                required: "polar annulus",
            })
        }
    };
    let (rmin, rmax) = (r_edges[0], *r_edges.last().unwrap());
    // exact trapezoid over the angle first, then the radial derivative
    // of the 1-D profile in log r: (1/2π) ∮ ∂_r w ds = r ∂_r ūmean =
    // dūmean/d(log r), which centered stencils reproduce exactly for
    // logarithmic fields
    let (line_r, means) = interp::angular_means(grid, field).expect("polar grid");
    let ln_r: Vec<f64> = line_r.iter().map(|r| r.ln()).collect();
    let mut per_radius = Vec::with_capacity(radii_req.len());
    for &rho in radii_req {
        if !(rho > rmin && rho < rmax) {
            return Err(ConfsurfError::RadiusOutsideAnnulus {
                radius: rho,
                rmin,
                rmax,
            });
        }
        let x0 = rho.ln();
        let i = ln_r.partition_point(|&c| c < x0);
        let i0 = i.saturating_sub(2).min(ln_r.len().saturating_sub(5));
        let win = &ln_r[i0..(i0 + 5).min(ln_r.len())];
        let wts = fd::fd_weights(win, x0, 1);
        let val: f64 = wts[1]
            .iter()
            .enumerate()
            .map(|(k, w)| w * means[i0 + k])
            .sum();
        per_radius.push((rho, val));
    }
    let alpha = per_radius.iter().map(|p| p.1).sum::<f64>() / per_radius.len() as f64;
    let spread = per_radius
        .iter()
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max)
        - per_radius.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(LogCoefficient {
        alpha,
        per_radius,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grading, ParamGrid};

    fn disk(nr: usize) -> ParamGrid {
        ParamGrid::disk_midpoint(nr, 2 * nr, 1.0, Grading::Uniform)
    }

    #[test]
    fn zero_source_gives_zero_potential() {
        let g = disk(24);
        let sol = solve_potential(&g, &vec![0.0; g.node_count()]).unwrap();
        assert_eq!(sol.sup_norm, 0.0);
        assert_eq!(sol.grad_l2, 0.0);
    }

    #[test]
    fn potential_is_linear_in_the_source() {
        let g = disk(20);
        let s1: Vec<f64> = g.nodes.iter().map(|p| (3.0 * p[0]).sin()).collect();
        let s2: Vec<f64> = g.nodes.iter().map(|p| p[1] * p[1]).collect();
        let combo: Vec<f64> = s1.iter().zip(&s2).map(|(a, b)| 2.0 * a - 0.7 * b).collect();
        let v1 = solve_potential(&g, &s1).unwrap().v;
        let v2 = solve_potential(&g, &s2).unwrap().v;
        let vc = solve_potential(&g, &combo).unwrap().v;
        let mut worst: f64 = 0.0;
        for i in 0..g.node_count() {
            worst = worst.max((vc[i] - (2.0 * v1[i] - 0.7 * v2[i])).abs());
        }
        assert!(worst < 1e-12, "linearity violation {worst}");
    }

    #[test]
    fn indicator_source_center_value_matches_radial_oracle() {
        // v(0) for source = 1_{D_{1/2}}; independent 1-D radial quadrature
        // of -(1/2π)·2π ∫ ρ log ρ dρ (closed form (1 + 2 log 2)/16).
        let oracle = {
            let m = 400_000;
            let h = 0.5 / m as f64;
            let mut acc = 0.0;
            for k in 0..m {
                let rho = (k as f64 + 0.5) * h;
                acc += rho * rho.ln() * h;
            }
            -acc
        };
        let exact = (1.0 + 2.0 * 2.0f64.ln()) / 16.0;
        assert!((oracle - exact).abs() < 1e-9, "oracle {oracle} vs {exact}");

        let g = disk(96);
        let s: Vec<f64> = g
            .nodes
            .iter()
            .map(|p| {
                if p[0] * p[0] + p[1] * p[1] <= 0.25 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let sol = solve_potential(&g, &s).unwrap();
        let it = crate::interp::Interp::new(&g);
        let v0 = it.eval_scalar(&sol.v, [0.0, 0.0]);
        // the indicator is discontinuous, so the rule is only O(h) there
        assert!((v0 - oracle).abs() < 5e-3, "v(0) = {v0} vs oracle {oracle}");
    }

    #[test]
    fn log_coefficient_of_pure_log_and_harmonic() {
        let g = ParamGrid::annulus_gl(48, 96, 0.05, 1.0, Grading::Geometric { ratio: 1.1 });
        let w3: Vec<f64> = g
            .nodes
            .iter()
            .map(|p| 3.0 * p[0].hypot(p[1]).ln())
            .collect();
        let lc = log_coefficient(&g, &w3, &[0.1, 0.2, 0.4, 0.8]).unwrap();
        assert!((lc.alpha - 3.0).abs() < 1e-6, "alpha {}", lc.alpha);
        assert!(lc.spread < 1e-6);

        // adding a harmonic function leaves the flux unchanged
        let w1: Vec<f64> = g
            .nodes
            .iter()
            .map(|p| p[0].hypot(p[1]).ln() + p[0])
            .collect();
        let lc = log_coefficient(&g, &w1, &[0.1, 0.25, 0.5]).unwrap();
        assert!((lc.alpha - 1.0).abs() < 1e-6, "alpha {}", lc.alpha);

        assert!(matches!(
            log_coefficient(&g, &w1, &[2.0]),
            Err(ConfsurfError::RadiusOutsideAnnulus { .. })
        ));
    }

    #[test]
    fn harmonic_defect_flags_laplacian() {
        let g = disk(48);
        let v: Vec<f64> = g.nodes.iter().map(|p| p[0] - 0.3 * p[1]).collect();
        // u = v + Re z³: harmonic difference → tiny defect
        let u_h: Vec<f64> = g
            .nodes
            .iter()
            .zip(&v)
            .map(|(p, &vv)| vv + p[0] * p[0] * p[0] - 3.0 * p[0] * p[1] * p[1])
            .collect();
        let d = harmonic_defect(&g, &u_h, &v, 0.15).unwrap();
        assert!(d < 5e-5, "defect {d}");

        // u = v + |z|²: Δ|z|² = 4 forces defect = margin²
        let u_q: Vec<f64> = g
            .nodes
            .iter()
            .zip(&v)
            .map(|(p, &vv)| vv + p[0] * p[0] + p[1] * p[1])
            .collect();
        let d = harmonic_defect(&g, &u_q, &v, 0.15).unwrap();
        assert!((d - 0.15 * 0.15).abs() < 5e-5, "defect {d}");

        assert!(matches!(
            harmonic_defect(&g, &u_q, &v, 2.0),
            Err(ConfsurfError::EmptyInterior { .. })
        ));
    }
}
