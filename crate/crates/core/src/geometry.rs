//! Pointwise and integral geometry of a sampled conformal immersion.
//!
//! The tangential/normal splitting of the chart Hessian gives the
//! second fundamental form; everything else follows the classical
//! coordinate formulas:
//!
//! ```text
//! u   = ½ log(½ |Df|²)
//! H   = e^{-2u} (A₁₁ + A₂₂)
//! K   = e^{-4u} (⟨A₁₁, A₂₂⟩ − |A₁₂|²)
//! |A|² = |A°|² + ½ |H|²
//! ```
//!
//! The Gauss map sends a node's oriented tangent plane to
//! `[(e₁ + i e₂)/√2] ∈ CP^{n-1}`; its Dirichlet energy is computed by
//! finite differences of a representative with the phase-invariant
//! quotient formula, so the in-plane rotation freedom drops out.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::fd;
use crate::grid::{GridLayout, ParamGrid};
use crate::immersion::{vecn, SampledImmersion, Surface};
use crate::Result;

/// Second pivot threshold (relative to the first) below which the
/// tangent frame counts as rank-deficient.
pub const FRAME_PIVOT_TOL: f64 = 1e-10;

/// Per-node geometric fields of one chart.
#[derive(Clone, Debug)]
pub struct GeometryFields {
    pub n: usize,
    /// Log conformal factor w.r.t. the flat chart coordinates.
    pub u: Vec<f64>,
    /// Area density e^{2u}.
    pub e2u: Vec<f64>,
    /// Normal-valued second-fundamental-form coefficients (node-major).
    pub a11: Vec<f64>,
    pub a12: Vec<f64>,
    pub a22: Vec<f64>,
    /// Mean curvature vector (node-major).
    pub h: Vec<f64>,
    pub h_sq: Vec<f64>,
    /// |A|² in the induced metric.
    pub a_sq: Vec<f64>,
    /// |A°|² of the trace-free part.
    pub a0_sq: Vec<f64>,
    /// Gauss curvature.
    pub k: Vec<f64>,
    /// Unit representative of the Gauss map in C^n (node-major).
    pub gauss_re: Vec<f64>,
    pub gauss_im: Vec<f64>,
}

/// Integral quantities of a chart or a whole surface.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyReport {
    /// ¼ ∫ |H|² dμ
    pub willmore: f64,
    /// ∫ |A|² dμ
    pub total_a: f64,
    /// ∫ |A°|² dμ
    pub tracefree_a: f64,
    /// μ_g(Σ)
    pub area: f64,
    /// ∫ K dμ
    pub gauss_bonnet: f64,
    /// ∫ |DG|² (flat chart measure)
    pub gauss_map_energy: f64,
    /// Extrinsic diameter of the sampled image.
    pub diam: f64,
}

/// Splits the chart Hessian into tangential and normal parts at every
/// node and assembles all pointwise fields.
pub fn build_geometry(imm: &SampledImmersion) -> Result<GeometryFields> {
    let n = imm.n;
    let nn = imm.node_count();
    let mut g = GeometryFields {
        n,
        u: vec![0.0; nn],
        e2u: vec![0.0; nn],
        a11: vec![0.0; nn * n],
        a12: vec![0.0; nn * n],
        a22: vec![0.0; nn * n],
        h: vec![0.0; nn * n],
        h_sq: vec![0.0; nn],
        a_sq: vec![0.0; nn],
        a0_sq: vec![0.0; nn],
        k: vec![0.0; nn],
        gauss_re: vec![0.0; nn * n],
        gauss_im: vec![0.0; nn * n],
    };

    for i in 0..nn {
        let sl = i * n..(i + 1) * n;
        let t1 = &imm.df[0][sl.clone()];
        let t2 = &imm.df[1][sl.clone()];
        let n1 = vecn::norm(t1);
        let n2 = vecn::norm(t2);
        let first_pivot = n1.max(n2);
        let g11 = n1 * n1;
        let g22 = n2 * n2;
        let g12 = vecn::dot(t1, t2);
        // |t1 ∧ t2| / first pivot is the pivoted second Gram-Schmidt pivot
        let area2 = (g11 * g22 - g12 * g12).max(0.0);
        let second_pivot = area2.sqrt() / first_pivot;
        if !(second_pivot > FRAME_PIVOT_TOL * first_pivot) {
            return Err(ConfsurfError::DegenerateFrame {
                node: i,
                pivot: second_pivot,
                threshold: FRAME_PIVOT_TOL * first_pivot,
            });
        }

        // oriented orthonormal frame, fixed order for a smooth Gauss map
        let mut e1 = t1.to_vec();
        for v in e1.iter_mut() {
            *v /= n1;
        }
        let mut e2 = t2.to_vec();
        let c = vecn::dot(t2, &e1);
        vecn::axpy(&mut e2, -c, &e1);
        let w = vecn::norm(&e2);
        for v in e2.iter_mut() {
            *v /= w;
        }

        let e2u = 0.5 * (g11 + g22);
        g.u[i] = 0.5 * e2u.ln();
        g.e2u[i] = e2u;

        for (dst, src) in [
            (&mut g.a11, &imm.d2f[0]),
            (&mut g.a12, &imm.d2f[1]),
            (&mut g.a22, &imm.d2f[2]),
        ] {
            let v = &src[sl.clone()];
            let c1 = vecn::dot(v, &e1);
            let c2 = vecn::dot(v, &e2);
            for k in 0..n {
                dst[i * n + k] = v[k] - c1 * e1[k] - c2 * e2[k];
            }
        }

        let a11 = &g.a11[sl.clone()];
        let a12 = &g.a12[sl.clone()];
        let a22 = &g.a22[sl.clone()];
        let inv = 1.0 / e2u;
        let mut h_sq = 0.0;
        for k in 0..n {
            let hk = inv * (a11[k] + a22[k]);
            g.h[i * n + k] = hk;
            h_sq += hk * hk;
        }
        g.h_sq[i] = h_sq;
        let a_sq = inv * inv * (vecn::norm_sq(a11) + 2.0 * vecn::norm_sq(a12) + vecn::norm_sq(a22));
        g.a_sq[i] = a_sq;
        g.a0_sq[i] = a_sq - 0.5 * h_sq;
        g.k[i] = inv * inv * (vecn::dot(a11, a22) - vecn::norm_sq(a12));

        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..n {
            g.gauss_re[i * n + k] = e1[k] * inv_sqrt2;
            g.gauss_im[i * n + k] = e2[k] * inv_sqrt2;
        }
    }
    Ok(g)
}

/// Pointwise Dirichlet density of the Gauss map w.r.t. the flat chart,
/// computed from finite differences of the stored representative with
/// the phase-invariant formula |DG|² = |DĜ|² − |⟨DĜ, Ĝ⟩|².
pub fn gauss_map_density(geom: &GeometryFields, grid: &ParamGrid) -> Vec<f64> {
    let n = geom.n;
    let nn = grid.node_count();
    let mut gre_x = vec![0.0; nn * n];
    let mut gre_y = vec![0.0; nn * n];
    let mut gim_x = vec![0.0; nn * n];
    let mut gim_y = vec![0.0; nn * n];
    let mut comp = vec![0.0; nn];
    for k in 0..n {
        for i in 0..nn {
            comp[i] = geom.gauss_re[i * n + k];
        }
        let (fx, fy) = fd::gradient(grid, &comp);
        for i in 0..nn {
            gre_x[i * n + k] = fx[i];
            gre_y[i * n + k] = fy[i];
        }
        for i in 0..nn {
            comp[i] = geom.gauss_im[i * n + k];
        }
        let (fx, fy) = fd::gradient(grid, &comp);
        for i in 0..nn {
            gim_x[i * n + k] = fx[i];
            gim_y[i * n + k] = fy[i];
        }
    }
    (0..nn)
        .map(|i| {
            let mut total = 0.0;
            for (dre, dim) in [(&gre_x, &gim_x), (&gre_y, &gim_y)] {
                let mut norm = 0.0;
                let mut ip_re = 0.0;
                let mut ip_im = 0.0;
                for k in 0..n {
                    let (ar, ai) = (dre[i * n + k], dim[i * n + k]);
                    let (br, bi) = (geom.gauss_re[i * n + k], geom.gauss_im[i * n + k]);
                    norm += ar * ar + ai * ai;
                    // ⟨∂Ĝ, Ĝ⟩ with conjugation on the second slot
                    ip_re += ar * br + ai * bi;
                    ip_im += ai * br - ar * bi;
                }
                total += norm - (ip_re * ip_re + ip_im * ip_im);
            }
            total.max(0.0)
        })
        .collect()
}

/// Integrates the pointwise fields over one chart with dμ = e^{2u} ×
/// parameter quadrature (times the chart's partition-of-unity weight).
pub fn energy_report(geom: &GeometryFields, imm: &SampledImmersion) -> EnergyReport {
    let mut willmore = 0.0;
    let mut total_a = 0.0;
    let mut tracefree = 0.0;
    let mut area = 0.0;
    let mut gb = 0.0;
    for i in 0..imm.node_count() {
        let w = imm.grid.weights[i] * imm.pou(i) * geom.e2u[i];
        willmore += 0.25 * w * geom.h_sq[i];
        total_a += w * geom.a_sq[i];
        tracefree += w * geom.a0_sq[i];
        area += w;
        gb += w * geom.k[i];
    }
    let dg = gauss_map_density(geom, &imm.grid);
    let gauss_map_energy: f64 = (0..imm.node_count())
        .map(|i| imm.grid.weights[i] * imm.pou(i) * dg[i])
        .sum();
    EnergyReport {
        willmore,
        total_a,
        tracefree_a: tracefree,
        area,
        gauss_bonnet: gb,
        gauss_map_energy,
        diam: extrinsic_diameter(std::iter::once(imm)),
    }
}

/// Energy report of a whole surface: chart sums plus the global diameter.
pub fn surface_energy(surface: &Surface, geoms: &[GeometryFields]) -> EnergyReport {
    let mut acc: Option<EnergyReport> = None;
    for (imm, geom) in surface.charts.iter().zip(geoms) {
        let r = energy_report(geom, imm);
        acc = Some(match acc {
            None => r,
            Some(a) => EnergyReport {
                willmore: a.willmore + r.willmore,
                total_a: a.total_a + r.total_a,
                tracefree_a: a.tracefree_a + r.tracefree_a,
                area: a.area + r.area,
                gauss_bonnet: a.gauss_bonnet + r.gauss_bonnet,
                gauss_map_energy: a.gauss_map_energy + r.gauss_map_energy,
                diam: a.diam,
            },
        });
    }
    let mut rep = acc.expect("surface has at least one chart");
    rep.diam = extrinsic_diameter(surface.charts.iter());
    rep
}

/// Builds geometry for every chart of a surface.
pub fn build_surface_geometry(surface: &Surface) -> Result<Vec<GeometryFields>> {
    surface.charts.iter().map(build_geometry).collect()
}

/// Extrinsic diameter of the sampled image by iterated farthest-point
/// sweeps from several seeds (exact on the grids used here up to
/// sampling density).
pub fn extrinsic_diameter<'a>(charts: impl Iterator<Item = &'a SampledImmersion>) -> f64 {
    let charts: Vec<&SampledImmersion> = charts.collect();
    let total: usize = charts.iter().map(|c| c.node_count()).sum();
    if total == 0 {
        return 0.0;
    }
    let point = |idx: usize| -> &[f64] {
        let mut i = idx;
        for c in &charts {
            if i < c.node_count() {
                return c.point(i);
            }
            i -= c.node_count();
        }
        unreachable!()
    };
    let farthest = |from: &[f64]| -> (usize, f64) {
        let mut best = (0, -1.0);
        for idx in 0..total {
            let d = vecn::dist_sq(from, point(idx));
            if d > best.1 {
                best = (idx, d);
            }
        }
        best
    };
    let mut best_sq: f64 = 0.0;
    for seed in [0, total / 3, 2 * total / 5, total - 1] {
        let mut cur = seed;
        for _ in 0..4 {
            let (far, d) = farthest(point(cur));
            best_sq = best_sq.max(d);
            if far == cur {
                break;
            }
            cur = far;
        }
    }
    best_sq.sqrt()
}

/// Weak Liouville residual `∫⟨Du, Dφ⟩ − ∫ K e^{2u} φ` for a compactly
/// supported test function; with a conformal background `g₀ = e^{2w}δ`
/// the Remark form `−Δ_{g₀}u = K e^{2u} − K_{g₀}` is used.
pub fn liouville_residual(geom: &GeometryFields, grid: &ParamGrid, testfn: &[f64]) -> Result<f64> {
    // support check: the outermost rings of a bounded chart must be zero
    let scale = testfn.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let margin_nodes = boundary_band(grid, 3);
    for &i in &margin_nodes {
        if testfn[i].abs() > 1e-12 * scale.max(1.0) {
            return Err(ConfsurfError::TestFunctionSupport {
                node: i,
                value: testfn[i],
            });
        }
    }

    // u relative to the background, plus background curvature term
    let (u_rel, bg_term): (Vec<f64>, Option<(Vec<f64>, Vec<f64>)>) = match &grid.background {
        None => (geom.u.clone(), None),
        Some(bg) => {
            let w: Vec<f64> = bg.iter().map(|g| 0.5 * g[0].ln()).collect();
            let lap_w = fd::laplacian(grid, &w);
            let k0: Vec<f64> = (0..grid.node_count())
                .map(|i| -lap_w[i] * (-2.0 * w[i]).exp())
                .collect();
            let e2w: Vec<f64> = w.iter().map(|&wi| (2.0 * wi).exp()).collect();
            let u_rel = geom.u.iter().zip(&w).map(|(&u, &wi)| u - wi).collect();
            (u_rel, Some((k0, e2w)))
        }
    };

    let (ux, uy) = fd::gradient(grid, &u_rel);
    let (px, py) = fd::gradient(grid, testfn);
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..grid.node_count() {
        let w = grid.weights[i];
        lhs += w * (ux[i] * px[i] + uy[i] * py[i]);
        rhs += w * geom.k[i] * geom.e2u[i] * testfn[i];
        if let Some((k0, e2w)) = &bg_term {
            rhs -= w * k0[i] * e2w[i] * testfn[i];
        }
    }
    Ok(lhs - rhs)
}

/// Nodes within `rings` grid lines of a non-periodic boundary.
fn boundary_band(grid: &ParamGrid, rings: usize) -> Vec<usize> {
    match &grid.layout {
        GridLayout::Polar {
            radii,
            r_edges,
            n_theta,
        } => {
            let nr = radii.len();
            let mut out = Vec::new();
            for ir in 0..nr {
                let outer = ir + rings >= nr;
                let inner = r_edges[0] > 0.0 && ir < rings;
                if outer || inner {
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
            let (nx, ny) = (xs.len(), ys.len());
            let mut out = Vec::new();
            for i in 0..nx {
                let x_bd = period_x.is_none() && (i < rings || i + rings >= nx);
                for j in 0..ny {
                    let y_bd = period_y.is_none() && (j < rings || j + rings >= ny);
                    if x_bd || y_bd {
                        out.push(i * ny + j);
                    }
                }
            }
            out
        }
    }
}

/// Result of the Gauss-map identity check `∫|DG|² = ½ ∫|A|² dμ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaussMapIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// The coercivity threshold for the ambient dimension (8π for n = 3,
    /// 4π for n ≥ 4).
    pub gamma_n: f64,
    /// Whether ∫|A|² dμ stays below γ_n.
    pub below_threshold: bool,
}

/// Energy threshold of the conformal-factor estimate.
pub fn gamma_n(n: usize) -> f64 {
    if n == 3 {
        8.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    }
}

pub fn gauss_map_identity_check(geom: &GeometryFields, imm: &SampledImmersion) -> GaussMapIdentity {
    let rep = energy_report(geom, imm);
    let lhs = rep.gauss_map_energy;
    let rhs = 0.5 * rep.total_a;
    GaussMapIdentity {
        lhs,
        rhs,
        gap: lhs - rhs,
        gamma_n: gamma_n(imm.n),
        below_threshold: rep.total_a < gamma_n(imm.n),
    }
}

/// Rebuilds the derivative fields of every chart by finite differences,
/// for analytic-vs-stencil comparisons.
pub fn with_fd_derivatives(surface: &Surface) -> Surface {
    let mut s = surface.clone();
    for chart in &mut s.charts {
        chart.rebuild_derivatives();
    }
    s
}

/// Max-node violation of the pointwise Gauss equation
/// `K = ¼|H|² − ½|A°|²`.
pub fn gauss_equation_violation(geom: &GeometryFields) -> f64 {
    geom.k
        .iter()
        .zip(geom.h_sq.iter().zip(&geom.a0_sq))
        .map(|(&k, (&h2, &a02))| (k - 0.25 * h2 + 0.5 * a02).abs())
        .fold(0.0, f64::max)
}

/// Max-node scaled orthogonality defect `|⟨A_ij, ∂_k f⟩| / e^{3u}`.
///
/// The quotient is floored at `1e-12 e^{3 max u}`: near a branch point
/// the numerator sits at the roundoff of `|d²f||df|` while `e^{3u} → 0`
/// much faster, so the raw ratio only measures noise there.
pub fn orthogonality_violation(geom: &GeometryFields, imm: &SampledImmersion) -> f64 {
    let n = imm.n;
    let u_max = geom.u.iter().fold(f64::NEG_INFINITY, |m, &u| m.max(u));
    let floor = 1e-12 * (3.0 * u_max).exp();
    crate::exec::max_over(imm.node_count(), |i| {
        let sl = i * n..(i + 1) * n;
        let scale = (3.0 * geom.u[i]).exp().max(floor);
        let mut worst: f64 = 0.0;
        for a in [&geom.a11, &geom.a12, &geom.a22] {
            for t in [&imm.df[0], &imm.df[1]] {
                worst = worst.max(vecn::dot(&a[sl.clone()], &t[sl.clone()]).abs() / scale);
            }
        }
        worst
    })
    .max(0.0)
}
