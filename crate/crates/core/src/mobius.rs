//! Möbius transformations of `R^n` with exact conformal-factor
//! bookkeeping.
//!
//! A map is a similarity (scale, rotation, translation) optionally
//! followed by the sphere inversion `I_{x₀}(x) = x₀ + (x−x₀)/|x−x₀|²`.
//! Applying it to a sampled immersion chain-rules all derivative fields,
//! so the transformed chart carries the same analytic quality as the
//! input. Under inversion the conformal factor updates by
//! `v = −log|f−x₀|²`, the trace-free curvature density `|A°|² dμ` is
//! invariant, and the Willmore energy obeys
//!
//! ```text
//! W(I_{x₀} ∘ f) = W(f) − 4π Σ_{p ∈ f⁻¹{x₀}} (m(p)+1)
//! ```
//!
//! which `inversion_energy_identity` checks, excising the declared
//! preimages at shrinking parameter radii and extrapolating.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::geometry::{build_geometry, build_surface_geometry, surface_energy};
use crate::grid::{GridLayout, ParamGrid};
use crate::immersion::{vecn, SampledImmersion, Surface};
use crate::interp::Interp;
use crate::Result;

/// Similarity optionally composed with a sphere inversion.
#[derive(Clone, Debug)]
pub struct MobiusMap {
    /// Scale λ > 0.
    pub scale: f64,
    /// Orthogonal n×n matrix, row-major; `None` is the identity.
    pub rotation: Option<Vec<f64>>,
    /// Translation; empty means zero.
    pub translation: Vec<f64>,
    /// Center of the inversion applied after the similarity.
    pub inversion_center: Option<Vec<f64>>,
}

impl MobiusMap {
    pub fn identity() -> MobiusMap {
        MobiusMap {
            scale: 1.0,
            rotation: None,
            translation: Vec::new(),
            inversion_center: None,
        }
    }

    pub fn scaling(scale: f64) -> MobiusMap {
        MobiusMap {
            scale,
            ..MobiusMap::identity()
        }
    }

    pub fn translation(t: Vec<f64>) -> MobiusMap {
        MobiusMap {
            translation: t,
            ..MobiusMap::identity()
        }
    }

    pub fn inversion(x0: Vec<f64>) -> MobiusMap {
        MobiusMap {
            inversion_center: Some(x0),
            ..MobiusMap::identity()
        }
    }

    /// Checks λ > 0 and QᵀQ = I to 1e-12.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.scale > 0.0) {
            return Err(ConfsurfError::InvalidInput("scale must be positive".into()));
        }
        if let Some(q) = &self.rotation {
            if q.len() != n * n {
                return Err(ConfsurfError::InvalidInput(format!(
                    "rotation must be {n}x{n}"
                )));
            }
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = (0..n).map(|k| q[k * n + i] * q[k * n + j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    if (dot - want).abs() > 1e-12 {
                        return Err(ConfsurfError::InvalidInput(format!(
                            "rotation not orthogonal: (QᵀQ)[{i}][{j}] = {dot}"
                        )));
                    }
                }
            }
        }
        if !self.translation.is_empty() && self.translation.len() != n {
            return Err(ConfsurfError::InvalidInput(
                "translation dimension mismatch".into(),
            ));
        }
        if let Some(c) = &self.inversion_center {
            if c.len() != n {
                return Err(ConfsurfError::InvalidInput(
                    "inversion center dimension mismatch".into(),
                ));
            }
        }
        Ok(())
    }

    /// Composition `self ∘ other` for similarity-only maps.
    pub fn compose_similarity(&self, other: &MobiusMap, n: usize) -> Result<MobiusMap> {
        if self.inversion_center.is_some() || other.inversion_center.is_some() {
            return Err(ConfsurfError::InvalidInput(
                "composition is only defined for similarity-only maps".into(),
            ));
        }
        let matmul = |a: Option<&Vec<f64>>, b: Option<&Vec<f64>>| -> Option<Vec<f64>> {
            match (a, b) {
                (None, None) => None,
                (Some(a), None) => Some(a.clone()),
                (None, Some(b)) => Some(b.clone()),
                (Some(a), Some(b)) => {
                    let mut c = vec![0.0; n * n];
                    for i in 0..n {
                        for j in 0..n {
                            c[i * n + j] = (0..n).map(|k| a[i * n + k] * b[k * n + j]).sum();
                        }
                    }
                    Some(c)
                }
            }
        };
        let mut tr = if other.translation.is_empty() {
            vec![0.0; n]
        } else {
            other.translation.clone()
        };
        // t = λ₂ R₂ t₁ + t₂
        let mut tmp = tr.clone();
        if let Some(q) = &self.rotation {
            for i in 0..n {
                tmp[i] = (0..n).map(|k| q[i * n + k] * tr[k]).sum();
            }
        }
        for (i, v) in tmp.iter().enumerate() {
            tr[i] = self.scale * v
                + if self.translation.is_empty() {
                    0.0
                } else {
                    self.translation[i]
                };
        }
        Ok(MobiusMap {
            scale: self.scale * other.scale,
            rotation: matmul(self.rotation.as_ref(), other.rotation.as_ref()),
            translation: tr,
            inversion_center: None,
        })
    }
}

/// Applies the map to every node, chain-ruling positions and the first
/// and second derivative fields.
pub fn apply(map: &MobiusMap, imm: &SampledImmersion) -> Result<SampledImmersion> {
    let n = imm.n;
    map.validate(n)?;
    let nn = imm.node_count();
    let mut out = imm.clone();

    // similarity part
    let lam = map.scale;
    for i in 0..nn {
        for k in 0..n {
            let idx = i * n + k;
            let rot = |src: &Vec<f64>| -> f64 {
                match &map.rotation {
                    None => src[i * n + k],
                    Some(q) => (0..n).map(|l| q[k * n + l] * src[i * n + l]).sum(),
                }
            };
            out.f[idx] = lam * rot(&imm.f)
                + if map.translation.is_empty() {
                    0.0
                } else {
                    map.translation[k]
                };
            out.df[0][idx] = lam * rot(&imm.df[0]);
            out.df[1][idx] = lam * rot(&imm.df[1]);
            out.d2f[0][idx] = lam * rot(&imm.d2f[0]);
            out.d2f[1][idx] = lam * rot(&imm.d2f[1]);
            out.d2f[2][idx] = lam * rot(&imm.d2f[2]);
        }
    }

    let Some(x0) = &map.inversion_center else {
        return Ok(out);
    };

    // center-distance precondition; work in recentered coordinates d = y − x₀
    let mut min_d = f64::INFINITY;
    let mut min_node = 0;
    for i in 0..nn {
        let d2 = vecn::dist_sq(out.point(i), x0);
        if d2 < min_d {
            min_d = d2;
            min_node = i;
        }
    }
    if min_d.sqrt() <= 1e-8 {
        return Err(ConfsurfError::CenterOnSurface {
            node: min_node,
            distance: min_d.sqrt(),
        });
    }

    let mut d = vec![0.0; n];
    for i in 0..nn {
        let sl = i * n..(i + 1) * n;
        for k in 0..n {
            d[k] = out.f[i * n + k] - x0[k];
        }
        let rho2 = vecn::norm_sq(&d);
        let y1 = out.df[0][sl.clone()].to_vec();
        let y2 = out.df[1][sl.clone()].to_vec();
        let yab = [
            out.d2f[0][sl.clone()].to_vec(),
            out.d2f[1][sl.clone()].to_vec(),
            out.d2f[2][sl.clone()].to_vec(),
        ];
        let dy1 = vecn::dot(&d, &y1);
        let dy2 = vecn::dot(&d, &y2);

        // ŷ = x₀ + d/ρ²
        for k in 0..n {
            out.f[i * n + k] = x0[k] + d[k] / rho2;
        }
        // ∂ŷ = y_a/ρ² − 2(d·y_a) d/ρ⁴
        for k in 0..n {
            out.df[0][i * n + k] = y1[k] / rho2 - 2.0 * dy1 * d[k] / (rho2 * rho2);
            out.df[1][i * n + k] = y2[k] / rho2 - 2.0 * dy2 * d[k] / (rho2 * rho2);
        }
        // ∂²ŷ = y_ab/ρ² − 2[(d·y_b) y_a + (d·y_a) y_b]/ρ⁴
        //       − 2[(y_a·y_b) + (d·y_ab)] d/ρ⁴ + 8 (d·y_a)(d·y_b) d/ρ⁶
        let pairs = [
            (&y1, &y1, dy1, dy1),
            (&y1, &y2, dy1, dy2),
            (&y2, &y2, dy2, dy2),
        ];
        for (slot, (ya, yb, dya, dyb)) in pairs.iter().enumerate() {
            let dyab = vecn::dot(&d, &yab[slot]);
            let yayb = vecn::dot(ya, yb);
            let r4 = rho2 * rho2;
            let r6 = r4 * rho2;
            for k in 0..n {
                out.d2f[slot][i * n + k] = yab[slot][k] / rho2
                    - 2.0 * (dyb * ya[k] + dya * yb[k]) / r4
                    - 2.0 * (yayb + dyab) * d[k] / r4
                    + 8.0 * dya * dyb * d[k] / r6;
            }
        }
    }
    Ok(out)
}

/// Applies the map to every chart of a surface.
pub fn apply_surface(map: &MobiusMap, surface: &Surface) -> Result<Surface> {
    let mut out = surface.clone();
    for chart in &mut out.charts {
        *chart = apply(map, chart)?;
    }
    Ok(out)
}

/// Max-node gap between `|Â°|² e^{2û}` and `|A°|² e^{2u}` (the
/// transformed quantity recomputed from scratch is the oracle).
pub fn tracefree_invariance_check(imm: &SampledImmersion, map: &MobiusMap) -> Result<f64> {
    let before = build_geometry(imm)?;
    let after_imm = apply(map, imm)?;
    let after = build_geometry(&after_imm)?;
    let mut worst: f64 = 0.0;
    for i in 0..imm.node_count() {
        worst = worst.max((after.a0_sq[i] * after.e2u[i] - before.a0_sq[i] * before.e2u[i]).abs());
    }
    Ok(worst)
}

/// A declared preimage of the inversion center.
#[derive(Clone, Debug)]
pub struct Preimage {
    pub chart: usize,
    /// Parameter point of the preimage in that chart.
    pub point: [f64; 2],
    /// Branching order m(p).
    pub order: u32,
}

/// Outcome of the inversion energy identity check.
#[derive(Clone, Debug, Serialize)]
pub struct InversionIdentity {
    /// W(I_{x₀} ∘ f): direct for external centers, excision-extrapolated
    /// for on-surface centers.
    pub lhs: f64,
    /// W(f) − 4π Σ (m+1).
    pub rhs: f64,
    pub gap: f64,
    pub willmore_before: f64,
    /// (excision radius, Willmore of the punctured image) pairs.
    pub excision: Vec<(f64, f64)>,
    /// |W(0.05) − W(0.1)| when extrapolating, else 0.
    pub extrapolation_error: f64,
}

/// Excision radii (parameter units) for on-surface inversions.
pub const EXCISION_RADII: [f64; 3] = [0.2, 0.1, 0.05];

fn param_dist(grid: &ParamGrid, p: [f64; 2], q: [f64; 2]) -> f64 {
    match &grid.layout {
        GridLayout::Rect {
            period_x, period_y, ..
        } => {
            let mut dx = (p[0] - q[0]).abs();
            if let Some(px) = period_x {
                dx = dx.min(px - dx);
            }
            let mut dy = (p[1] - q[1]).abs();
            if let Some(py) = period_y {
                dy = dy.min(py - dy);
            }
            dx.hypot(dy)
        }
        GridLayout::Polar { .. } => (p[0] - q[0]).hypot(p[1] - q[1]),
    }
}

/// Checks `W(f̂) = W(f) − 4π Σ (m+1)` for the inversion at `x0` with the
/// declared preimages (empty list for an external center).
pub fn inversion_energy_identity(
    surface: &Surface,
    x0: &[f64],
    preimages: &[Preimage],
) -> Result<InversionIdentity> {
    let geoms = build_surface_geometry(surface)?;
    let before = surface_energy(surface, &geoms);
    let four_pi = 4.0 * std::f64::consts::PI;
    let rhs =
        before.willmore - four_pi * preimages.iter().map(|p| p.order as f64 + 1.0).sum::<f64>();

    // validate declared preimages against the sampled surface
    for (idx, pre) in preimages.iter().enumerate() {
        let chart = &surface.charts[pre.chart];
        let it = Interp::new(&chart.grid);
        let mut pos = vec![0.0; chart.n];
        it.eval(&chart.f, chart.n, pre.point, &mut pos);
        let dist = vecn::dist_sq(&pos, x0).sqrt();
        // interpolation at the declared point is cubic; leave headroom
        let tol = 1e-4 * (1.0 + vecn::norm(x0));
        if dist > tol {
            return Err(ConfsurfError::PreimageOffSurface {
                index: idx,
                distance: dist,
                tolerance: tol,
            });
        }
    }

    let map = MobiusMap::inversion(x0.to_vec());
    let inverted = apply_surface(&map, surface)?;
    let inv_geoms = build_surface_geometry(&inverted)?;

    if preimages.is_empty() {
        let after = surface_energy(&inverted, &inv_geoms);
        return Ok(InversionIdentity {
            lhs: after.willmore,
            rhs,
            gap: after.willmore - rhs,
            willmore_before: before.willmore,
            excision: Vec::new(),
            extrapolation_error: 0.0,
        });
    }

    // on-surface center: Willmore of the punctured image at shrinking
    // excision radii, then linear Richardson extrapolation to δ → 0
    let mut excision = Vec::new();
    for &delta in &EXCISION_RADII {
        let mut w = 0.0;
        for (ci, (chart, geom)) in inverted.charts.iter().zip(&inv_geoms).enumerate() {
            for i in 0..chart.node_count() {
                let p = chart.grid.nodes[i];
                let excised = preimages
                    .iter()
                    .filter(|pre| pre.chart == ci)
                    .any(|pre| param_dist(&chart.grid, p, pre.point) < delta);
                if excised {
                    continue;
                }
                w += 0.25 * chart.grid.weights[i] * chart.pou(i) * geom.e2u[i] * geom.h_sq[i];
            }
        }
        excision.push((delta, w));
    }
    let w_half = excision[1].1;
    let w_quarter = excision[2].1;
    let lhs = 2.0 * w_quarter - w_half;
    Ok(InversionIdentity {
        lhs,
        rhs,
        gap: lhs - rhs,
        willmore_before: before.willmore,
        excision,
        extrapolation_error: (w_quarter - w_half).abs(),
    })
}
