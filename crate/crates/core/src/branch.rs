//! Classification of isolated singularities of conformal immersions.
//!
//! Near an isolated finite-area singularity the conformal factor splits
//! as `u(z) = m log|z| + ω(z)` with integer branching order `m ≥ 0` and
//! `ω` continuous; the area density at the image point is `m + 1`, and
//! rescalings `f_λ(z) = λ^{-(m+1)} (f(λz) − f(λz₀))` converge to the
//! homogeneous model `e^{ω₀+iβ}/(m+1) (z^{m+1} − z₀^{m+1})` mapping into
//! a fixed 2-plane. The three operations here estimate `m`, check the
//! density ratio, and measure the blow-up convergence.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::ConfsurfError;
use crate::geometry::build_geometry;
use crate::immersion::{vecn, SampledImmersion};
use crate::interp::{self, Interp};
use crate::Result;

/// Threshold on |slope − nearest integer| beyond which classification
/// is rejected: orders are provably integers, so a large residual means
/// numerical failure rather than a fractional branch.
pub const ROUNDING_TOL: f64 = 0.2;

/// Result of the branching-order regression.
#[derive(Clone, Debug, Serialize)]
pub struct BranchEstimate {
    /// Least-squares slope of the circle-averaged conformal factor
    /// against log r.
    pub alpha_raw: f64,
    /// Rounded non-negative integer branching order.
    pub m: u32,
    /// ω(0), the regular part of the conformal factor at the puncture.
    pub omega0: f64,
    /// Extrapolated area-density ratio (filled by
    /// [`density_ratio_profile`]; NaN until then).
    pub density_limit: f64,
    /// RMS residual of the log-linear fit.
    pub fit_residual: f64,
    /// Whether the point is a genuine immersion point (m = 0).
    pub unbranched: bool,
    /// Dyadic radii used for the fit.
    pub radii: Vec<f64>,
}

/// Circle-averaged conformal factor at the grid radii.
fn radial_u_profile(imm: &SampledImmersion) -> Result<(Vec<f64>, Vec<f64>)> {
    let geom = build_geometry(imm)?;
    interp::angular_means(&imm.grid, &geom.u).ok_or(ConfsurfError::WrongLayout {
        required: "polar annulus",
    })
}

/// Estimates the branching order at the parameter origin from the
/// circle-averaged conformal factor over dyadic radii in
/// (exclusion, ½].
pub fn estimate_branch_order(imm: &SampledImmersion, exclusion: f64) -> Result<BranchEstimate> {
    let (rmin, rmax) = imm.grid.radial_range().ok_or(ConfsurfError::WrongLayout {
        required: "polar annulus",
    })?;
    let lo = exclusion.max(rmin);
    if !(lo < 0.5 && rmax >= 0.5) {
        return Err(ConfsurfError::InvalidInput(format!(
            "grid radial range [{rmin}, {rmax}] cannot host dyadic radii in ({lo}, 0.5]"
        )));
    }
    let (line_r, u_means) = radial_u_profile(imm)?;
    // dyadic radii 2^{-j}, equal leverage in log r
    let mut radii = Vec::new();
    let mut r = 0.5;
    while r > lo * (1.0 + 1e-12) {
        radii.push(r);
        r *= 0.5;
    }
    if radii.len() < 3 {
        return Err(ConfsurfError::InvalidInput(
            "need at least 3 dyadic radii between the exclusion radius and 1/2".into(),
        ));
    }
    // interpolate the profile in log r, where u is polynomial-plus-log
    let ln_r: Vec<f64> = line_r.iter().map(|r| r.ln()).collect();
    let ubar: Vec<f64> = radii
        .iter()
        .map(|&r| interp::interp_line(&ln_r, &u_means, r.ln()))
        .collect();

    // least squares ubar = alpha log r + c
    let n = radii.len() as f64;
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ubar.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ubar).map(|(x, y)| x * y).sum();
    let alpha_raw = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let c = (sy - alpha_raw * sx) / n;
    let fit_residual = (xs
        .iter()
        .zip(&ubar)
        .map(|(x, y)| {
            let e = y - (alpha_raw * x + c);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();

    if alpha_raw < -0.5 {
        return Err(ConfsurfError::NotFiniteArea { alpha: alpha_raw });
    }
    let m_round = alpha_raw.round().max(0.0);
    let gap = (alpha_raw - m_round).abs();
    if gap > ROUNDING_TOL {
        return Err(ConfsurfError::ClassificationFailed {
            alpha: alpha_raw,
            gap,
        });
    }
    let m = m_round as u32;

    // ω̂(r) = ubar − m log r, extrapolated to r → 0 linearly in r² from
    // the two smallest dyadic radii (ω̂(r) = ω₀ + c r² + …, r₂ = 2 r₁)
    let omegas: Vec<f64> = radii
        .iter()
        .zip(&ubar)
        .map(|(r, y)| y - m as f64 * r.ln())
        .collect();
    let k = omegas.len();
    let omega0 = omegas[k - 1] - (omegas[k - 2] - omegas[k - 1]) / 3.0;

    Ok(BranchEstimate {
        alpha_raw,
        m,
        omega0,
        density_limit: f64::NAN,
        fit_residual,
        unbranched: m == 0,
        radii,
    })
}

/// One row of the density-ratio profile: `(ρ, μ_g(D_ρ) / (π r(ρ)²))`
/// with `r(ρ) = e^{ω₀} ρ^{m+1}/(m+1)`.
pub type DensityRow = (f64, f64);

/// Area-density ratios at the requested parameter radii, with the
/// ρ → 0 extrapolation written back into the estimate.
pub fn density_ratio_profile(
    imm: &SampledImmersion,
    est: &mut BranchEstimate,
    rhos: &[f64],
) -> Result<Vec<DensityRow>> {
    let geom = build_geometry(imm)?;
    let (line_r, e2u_means) =
        interp::angular_means(&imm.grid, &geom.e2u).ok_or(ConfsurfError::WrongLayout {
            required: "polar annulus",
        })?;
    let (rmin, rmax) = imm.grid.radial_range().unwrap();
    let m = est.m as f64;
    // mass inside the excluded inner disk from the branch model
    let inner_mass =
        std::f64::consts::PI * (2.0 * est.omega0).exp() * rmin.powf(2.0 * m + 2.0) / (m + 1.0);

    // the radial integrand 2π r <e2u>(r) behaves like a power of r near
    // a branch point, so each segment is integrated with its local
    // power-law model (exact for pure powers, 2nd order otherwise)
    let integrand: Vec<f64> = line_r
        .iter()
        .zip(&e2u_means)
        .map(|(r, e)| std::f64::consts::TAU * r * e)
        .collect();
    let segment = |k: usize, r_to: f64| -> f64 {
        let (r0, r1) = (line_r[k], line_r[k + 1]);
        let (f0, f1) = (integrand[k], integrand[k + 1]);
        if f0 > 0.0 && f1 > 0.0 {
            let p = (f1 / f0).ln() / (r1 / r0).ln();
            f0 * r0 * ((r_to / r0).powf(p + 1.0) - 1.0) / (p + 1.0)
        } else {
            0.5 * (f0 + f1) * (r_to - r0)
        }
    };
    let mut cum = vec![0.0; line_r.len()];
    for i in 1..line_r.len() {
        cum[i] = cum[i - 1] + segment(i - 1, line_r[i]);
    }
    // leading piece between the inner edge and the first node radius
    let lead = std::f64::consts::PI * (2.0 * est.omega0).exp() / (m + 1.0)
        * (line_r[0].powf(2.0 * m + 2.0) - rmin.powf(2.0 * m + 2.0));

    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        if !(rho > line_r[0] && rho <= rmax) {
            return Err(ConfsurfError::RadiusOutsideAnnulus {
                radius: rho,
                rmin: line_r[0],
                rmax,
            });
        }
        let k = line_r.partition_point(|&r| r < rho).saturating_sub(1);
        let k = k.min(line_r.len() - 2);
        let mass = inner_mass + lead + cum[k] + segment(k, rho);
        let r_img = est.omega0.exp() * rho.powf(m + 1.0) / (m + 1.0);
        rows.push((rho, mass / (std::f64::consts::PI * r_img * r_img)));
    }

    // Richardson extrapolation (linear in ρ²) from the two smallest radii
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    est.density_limit = if sorted.len() >= 2 {
        let (r1, t1) = sorted[0];
        let (r2, t2) = sorted[1];
        t1 - (t2 - t1) * r1 * r1 / (r2 * r2 - r1 * r1)
    } else {
        sorted[0].1
    };
    Ok(rows)
}

/// One row of the blow-up convergence table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlowupRow {
    pub lambda: f64,
    /// Max distance between the rescaled map and the aligned
    /// homogeneous limit over the test annulus.
    pub distance: f64,
    /// Rotation applied to the limit model (radians).
    pub beta: f64,
}

/// Compares `f_λ(z) = λ^{-(m+1)}(f(λz) − f(λz₀))` with the limit model
/// on an annulus of test points, after orthogonal Procrustes alignment
/// of the image plane and an optimal in-plane rotation.
pub fn blowup_check(
    imm: &SampledImmersion,
    est: &BranchEstimate,
    z0: Complex64,
    lambdas: &[f64],
) -> Result<Vec<BlowupRow>> {
    if z0.norm() == 0.0 {
        return Err(ConfsurfError::InvalidInput(
            "blow-up base point z0 must be nonzero".into(),
        ));
    }
    let (_, rmax) = imm.grid.radial_range().ok_or(ConfsurfError::WrongLayout {
        required: "polar annulus",
    })?;
    let n = imm.n;
    let it = Interp::new(&imm.grid);
    let m1 = est.m as f64 + 1.0;

    // test nodes on a fixed annulus around the unit circle
    let mut test: Vec<Complex64> = Vec::new();
    for &r in &[0.6, 0.85, 1.1, 1.4] {
        for k in 0..12 {
            let phi = std::f64::consts::TAU * (k as f64 + 0.3) / 12.0;
            test.push(Complex64::from_polar(r, phi));
        }
    }
    let reach = test.iter().map(|z| z.norm()).fold(z0.norm(), f64::max);

    let mut rows = Vec::with_capacity(lambdas.len());
    let mut buf = vec![0.0; n];
    let mut base = vec![0.0; n];
    for &lam in lambdas {
        if lam * reach > rmax {
            return Err(ConfsurfError::InvalidInput(format!(
                "lambda {lam} pushes test points outside the chart (reach {:.3} > {rmax})",
                lam * reach
            )));
        }
        let scale = lam.powf(m1);
        it.eval(&imm.f, n, [lam * z0.re, lam * z0.im], &mut base);
        // rescaled samples
        let mut pts = vec![0.0; test.len() * n];
        for (k, z) in test.iter().enumerate() {
            it.eval(&imm.f, n, [lam * z.re, lam * z.im], &mut buf);
            for c in 0..n {
                pts[k * n + c] = (buf[c] - base[c]) / scale;
            }
        }
        // dominant 2-plane from the Gram matrix
        let mut gram = vec![0.0; n * n];
        for k in 0..test.len() {
            for a in 0..n {
                for b in 0..n {
                    gram[a * n + b] += pts[k * n + a] * pts[k * n + b];
                }
            }
        }
        let (vals, vecs) = crate::linalg::jacobi_eigen(&gram, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
        let v1: Vec<f64> = (0..n).map(|r| vecs[r * n + order[0]]).collect();
        let v2: Vec<f64> = (0..n).map(|r| vecs[r * n + order[1]]).collect();

        // limit model values
        let target: Vec<Complex64> = test
            .iter()
            .map(|z| (z.powf(m1) - z0.powf(m1)) * est.omega0.exp() / m1)
            .collect();

        let mut best = f64::INFINITY;
        let mut best_beta = 0.0;
        for flip in [1.0, -1.0] {
            // project onto the plane; flip switches orientation
            let proj: Vec<Complex64> = (0..test.len())
                .map(|k| {
                    let p = &pts[k * n..(k + 1) * n];
                    Complex64::new(vecn::dot(p, &v1), flip * vecn::dot(p, &v2))
                })
                .collect();
            // optimal rotation of the limit model: maximize Re Σ p conj(e^{iβ} t)
            let corr: Complex64 = proj.iter().zip(&target).map(|(p, t)| p * t.conj()).sum();
            let beta = corr.arg();
            let rot = Complex64::from_polar(1.0, beta);
            let mut worst: f64 = 0.0;
            for k in 0..test.len() {
                let p = &pts[k * n..(k + 1) * n];
                let in_plane = proj[k] - rot * target[k];
                let off = vecn::norm_sq(p) - proj[k].norm_sqr();
                worst = worst.max((in_plane.norm_sqr() + off.max(0.0)).sqrt());
            }
            if worst < best {
                best = worst;
                best_beta = beta;
            }
        }
        rows.push(BlowupRow {
            lambda: lam,
            distance: best,
            beta: best_beta,
        });
    }
    Ok(rows)
}
