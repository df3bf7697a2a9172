//! Acceptance suite: every release-gating criterion, at its stated
//! tolerance, printing one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines; each test also asserts, so a plain `cargo test` is the gate.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use confsurf::branch::{density_ratio_profile, estimate_branch_order};
use confsurf::catalog::{self, instantiate, instantiate_with, GridStyle, SurfaceSpec};
use confsurf::geometry::{
    build_geometry, build_surface_geometry, energy_report, gauss_map_identity_check, surface_energy,
};
use confsurf::grid::{Grading, ParamGrid};
use confsurf::immersion::Surface;
use confsurf::liouville::{harmonic_defect, solve_potential};
use confsurf::mobius::{inversion_energy_identity, Preimage};
use confsurf::moduli::{
    collar_geometry, collar_half_length, collar_isometry_check, normalize_lattice,
};
use confsurf::varifold::{ball_profile, li_yau_check, monotonicity_defect};
use confsurf::{fd, GeometryFields};

const PI: f64 = std::f64::consts::PI;

fn verdict(id: u32, pass: bool, detail: &str) {
    println!(
        "criterion {id:02} [{}] {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id:02}: {detail}");
}

#[test]
fn criterion_01_sphere_willmore_via_cli() {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_confsurf"))
        .args(["energy", "--surface", "sphere", "--grid", "128"])
        .output()
        .expect("binary runs");
    let elapsed = started.elapsed();
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    let w = rep["results"]["willmore"].as_f64().unwrap();
    let rel = (w - 4.0 * PI).abs() / (4.0 * PI);
    let pass = out.status.success() && rel < 1e-4 && elapsed.as_secs_f64() < 5.0;
    verdict(
        1,
        pass,
        &format!(
            "energy --surface sphere --grid 128: |W-4π|/4π = {rel:.2e} (< 1e-4), runtime {:.2}s (< 5s), exit {:?}",
            elapsed.as_secs_f64(),
            out.status.code()
        ),
    );
}

#[test]
fn criterion_02_f_eps_exact_energies() {
    let mut worst = 0.0f64;
    for eps in [0.25, 0.5, 1.0, 2.0] {
        let s = instantiate(SurfaceSpec::FEps { eps }, 256).unwrap();
        let g = build_geometry(&s.charts[0]).unwrap();
        let rep = energy_report(&g, &s.charts[0]);
        let want = 4.0 * PI / (1.0 + eps * eps);
        worst = worst.max((rep.total_a - want).abs());
    }
    verdict(
        2,
        worst < 1e-3,
        &format!("f_eps ∫|A|²dμ vs 4π/(1+ε²), ε in {{0.25,0.5,1,2}} at 256-radius graded disk: max abs err {worst:.2e} (< 1e-3)"),
    );
}

#[test]
fn criterion_03_enneper_blowdown_approaches_8pi() {
    let mut values = Vec::new();
    for lambda in [1.0, 2.0, 4.0, 8.0] {
        let s = instantiate(SurfaceSpec::EnneperBlowdown { lambda }, 128).unwrap();
        let g = build_geometry(&s.charts[0]).unwrap();
        values.push(energy_report(&g, &s.charts[0]).total_a);
    }
    let below = values.iter().all(|&v| v < 8.0 * PI);
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let rel_gap = (8.0 * PI - values[3]) / (8.0 * PI);
    let pass = below && increasing && rel_gap < 0.1;
    verdict(
        3,
        pass,
        &format!(
            "blow-down energies {values:?} all < 8π, increasing, relative gap at λ=8 is {rel_gap:.3e} (< 0.1)"
        ),
    );
}

#[test]
fn criterion_04_gauss_bonnet_at_256() {
    let mut worst = 0.0f64;
    for (spec, chi) in [
        (SurfaceSpec::Sphere, 2),
        (SurfaceSpec::CliffordTorus, 0),
        (SurfaceSpec::ProductTorus { b: 2.0 }, 0),
    ] {
        let s = instantiate(spec, 256).unwrap();
        let geoms = build_surface_geometry(&s).unwrap();
        let rep = surface_energy(&s, &geoms);
        worst = worst.max((rep.gauss_bonnet - 2.0 * PI * chi as f64).abs());
    }
    verdict(
        4,
        worst < 1e-3,
        &format!("∫K dμ vs 2πχ on sphere and tori at 256² grids: max abs err {worst:.2e} (< 1e-3)"),
    );
}

#[test]
fn criterion_05_gauss_map_energy_identity() {
    let mut worst = 0.0f64;
    for spec in [
        SurfaceSpec::Sphere,
        SurfaceSpec::FEps { eps: 1.0 },
        SurfaceSpec::Enneper,
    ] {
        let s = instantiate(spec, 128).unwrap();
        let geoms = build_surface_geometry(&s).unwrap();
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (c, g) in s.charts.iter().zip(&geoms) {
            let id = gauss_map_identity_check(g, c);
            lhs += id.lhs;
            rhs += id.rhs;
        }
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    verdict(
        5,
        worst < 1e-2,
        &format!("∫|DG|² vs ½∫|A|²dμ on sphere, f_ε, enneper: max rel gap {worst:.2e} (< 1e-2)"),
    );
}

#[test]
fn criterion_06_branch_orders_and_densities() {
    let mut ok = true;
    let mut detail = String::new();
    for m in 0..=3u32 {
        let s = instantiate(SurfaceSpec::PowerBranch { m, n: 3 }, 256).unwrap();
        let imm = &s.charts[0];
        let mut est = estimate_branch_order(imm, 1e-3).unwrap();
        density_ratio_profile(imm, &mut est, &[0.02, 0.05, 0.1, 0.2]).unwrap();
        let density_rel = (est.density_limit - (m as f64 + 1.0)).abs() / (m as f64 + 1.0);
        ok &= est.m == m && density_rel < 0.02;
        detail.push_str(&format!("m={m}→{} (density rel {density_rel:.1e}) ", est.m));
    }
    verdict(
        6,
        ok,
        &format!("branch classification exact for m in 0..=3, density within 2%: {detail}"),
    );
}

#[test]
fn criterion_07_external_inversion_preserves_willmore() {
    let s = instantiate(SurfaceSpec::Sphere, 128).unwrap();
    let id = inversion_energy_identity(&s, &[3.0, 0.0, 0.0], &[]).unwrap();
    verdict(
        7,
        id.gap.abs() < 1e-3,
        &format!(
            "sphere inverted at (3,0,0): |W(f̂) − W(f)| = {:.2e} (< 1e-3)",
            id.gap.abs()
        ),
    );
}

#[test]
fn criterion_08_on_surface_inversion_energy_account() {
    // inversion at the north pole turns the sphere into a plane:
    // W(f̂) = W − 4π(m+1) = 0 for the simple preimage
    let s = instantiate(SurfaceSpec::Sphere, 128).unwrap();
    let pre = Preimage {
        chart: 1,
        point: [0.0, 0.0],
        order: 0,
    };
    let id = inversion_energy_identity(&s, &[0.0, 0.0, 1.0], &[pre]).unwrap();
    verdict(
        8,
        id.lhs.abs() < 0.05,
        &format!(
            "excision-extrapolated W of the sphere inverted at the north pole: {:.2e} (< 0.05), extrapolation err {:.1e}",
            id.lhs.abs(),
            id.extrapolation_error
        ),
    );
}

fn worst_g_drop(
    surface: &Surface,
    geoms: &[GeometryFields],
    centers: &[Vec<f64>],
    radii: &[f64],
) -> f64 {
    let mut worst = 0.0f64;
    for c in centers {
        let prof = ball_profile(surface, geoms, c, radii).unwrap();
        for w in prof.g_values.windows(2) {
            worst = worst.max(w[0] - w[1]);
        }
    }
    worst
}

#[test]
fn criterion_09_monotonicity_random_centers_and_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let mut worst_drop = 0.0f64;
    for spec in [SurfaceSpec::Sphere, SurfaceSpec::CliffordTorus] {
        let s = instantiate_with(spec, 96, GridStyle::Midpoint).unwrap();
        let geoms = build_surface_geometry(&s).unwrap();
        let rep = surface_energy(&s, &geoms);
        let n = s.charts[0].n;
        let centers: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                (0..n)
                    .map(|_| rng.gen_range(-1.2..1.2) * rep.diam)
                    .collect()
            })
            .collect();
        let radii: Vec<f64> = (1..=22)
            .map(|k| rep.diam * (0.06 + 1.3 * (k as f64 - 1.0) / 21.0))
            .collect();
        worst_drop = worst_drop.max(worst_g_drop(&s, &geoms, &centers, &radii));
    }

    // annulus identity with a nontrivial jump: unit sphere seen from its
    // center, g(σ) = 0, g(ρ) = 1, both sides of the identity equal 1
    let s = instantiate_with(SurfaceSpec::Sphere, 128, GridStyle::Midpoint).unwrap();
    let geoms = build_surface_geometry(&s).unwrap();
    let prof = ball_profile(&s, &geoms, &[0.0; 3], &[0.25, 1.5, 2.5]).unwrap();
    // the annulus must be resolved by enough nodes
    let resolved: usize = s
        .charts
        .iter()
        .map(|c| {
            (0..c.node_count())
                .filter(|&i| {
                    let d = confsurf::immersion::vecn::norm(c.point(i));
                    c.pou(i) > 0.0 && (0.25..2.5).contains(&d)
                })
                .count()
        })
        .sum();
    let def = monotonicity_defect(&s, &geoms, &prof, 0.25, 2.5).unwrap();
    let rel = def.gap.abs() / def.rhs.abs().max(1e-12);
    let pass = worst_drop < 1e-3 && rel < 0.01 && resolved >= 10_000;
    verdict(
        9,
        pass,
        &format!(
            "g nondecreasing over 20 random centers on sphere+clifford (worst drop {worst_drop:.2e} < 1e-3); annulus identity rel gap {rel:.2e} (< 1%) on {resolved} nodes"
        ),
    );
}

#[test]
fn criterion_10_sphere_equality_case() {
    let s = instantiate_with(SurfaceSpec::Sphere, 128, GridStyle::Midpoint).unwrap();
    let geoms = build_surface_geometry(&s).unwrap();
    let radii: Vec<f64> = (0..24)
        .map(|k| 0.105 + (1.895 - 0.105) * k as f64 / 23.0)
        .collect();
    let prof = ball_profile(&s, &geoms, &[0.0, 0.0, -1.0], &radii).unwrap();
    let worst = prof
        .g_values
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0f64, f64::max);
    verdict(
        10,
        worst < 1e-3,
        &format!("g ≡ 1 for a center on the unit sphere, r in (0.1, 1.9): max |g−1| = {worst:.2e} (< 1e-3)"),
    );
}

#[test]
fn criterion_11_li_yau_density_bound() {
    let mut ok = true;
    let mut detail = String::new();
    for spec in [
        SurfaceSpec::Sphere,
        SurfaceSpec::CliffordTorus,
        SurfaceSpec::ProductTorus { b: 2.0 },
    ] {
        let s = instantiate_with(spec, 96, GridStyle::Midpoint).unwrap();
        let geoms = build_surface_geometry(&s).unwrap();
        let pts = vec![
            s.charts[0].point(0).to_vec(),
            s.charts[0].point(s.charts[0].node_count() / 2).to_vec(),
        ];
        let rows = li_yau_check(&s, &geoms, &pts).unwrap();
        for r in rows {
            let on_point = (r.theta_sq - 1.0).abs() < 0.02;
            let bounded = r.theta_sq <= r.bound + 0.02;
            ok &= on_point && bounded;
            detail.push_str(&format!("θ²={:.4}≤{:.4} ", r.theta_sq, r.bound));
        }
    }
    verdict(
        11,
        ok,
        &format!("θ² = 1 ≤ W/4π on embedded closed members: {detail}"),
    );
}

/// Independent brute-force reduction: Lagrange-Gauss on the basis
/// vectors, then canonical placement.
fn gauss_reduction_oracle(tau: Complex64) -> (f64, f64) {
    let dot = |u: [f64; 2], v: [f64; 2]| u[0] * v[0] + u[1] * v[1];
    let mut v1 = [1.0, 0.0];
    let mut v2 = [tau.re, tau.im];
    loop {
        if dot(v2, v2) < dot(v1, v1) {
            std::mem::swap(&mut v1, &mut v2);
        }
        let mu = (dot(v1, v2) / dot(v1, v1)).round();
        if mu == 0.0 {
            break;
        }
        v2[0] -= mu * v1[0];
        v2[1] -= mu * v1[1];
    }
    let mut t = Complex64::new(v2[0], v2[1]) / Complex64::new(v1[0], v1[1]);
    if t.im < 0.0 {
        t = -t;
    }
    if t.re < 0.0 {
        t.re = -t.re;
    }
    while t.re > 0.5 + 1e-15 {
        t.re -= 1.0;
        if t.re < 0.0 {
            t.re = -t.re;
        }
    }
    (t.re, t.im)
}

#[test]
fn criterion_12_lattice_normalization_vs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    let mut invariants = true;
    for _ in 0..1000 {
        let tau = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..4.0));
        let n = normalize_lattice(tau).unwrap();
        let (oa, ob) = gauss_reduction_oracle(tau);
        worst = worst
            .max((n.lattice.a - oa).abs())
            .max((n.lattice.b - ob).abs());
        invariants &= n.lattice.is_normalized() && n.basis_det().abs() == 1;
    }
    verdict(
        12,
        worst < 1e-12 && invariants,
        &format!("1000 random τ vs Gauss-reduction oracle: max component gap {worst:.2e} (< 1e-12), domain+det invariants hold"),
    );
}

#[test]
fn criterion_13_collar_limits_and_isometry() {
    let l = 1e-3;
    let t_max = collar_half_length(l);
    let mut worst = 0.0f64;
    for t0 in [0.5, 1.0, 2.0] {
        for sign in [1.0, -1.0] {
            let g = collar_geometry(l, sign * (t_max - t0)).unwrap();
            worst = worst
                .max((g.curvature.abs() - 1.0).abs())
                .max((g.length - 1.0 / (t0 + 0.5)).abs());
        }
    }
    let pts: Vec<(f64, f64)> = (0..1000)
        .map(|k| {
            let s = (k as f64 * 0.37).fract();
            let t = ((k as f64 * 0.61).fract() - 0.5) * 1.9 * collar_half_length(0.5);
            (s, t)
        })
        .collect();
    let gap = collar_isometry_check(0.5, &pts).unwrap();
    let pass = worst < 1e-3 && gap < 1e-8;
    verdict(
        13,
        pass,
        &format!("collar limits at ℓ=1e-3 within {worst:.2e} (< 1e-3); isometry pullback gap {gap:.2e} (< 1e-8)"),
    );
}

#[test]
fn criterion_14_liouville_solver_convergence() {
    // -Δv = K e^{2u} for the f_ε source, ε = 0.5; the interior residual
    // of the recovered potential must at least halve per grid doubling
    let eps: f64 = 0.5;
    let mut residuals = Vec::new();
    for nr in [24usize, 48, 96] {
        let g = ParamGrid::disk_midpoint(nr, 2 * nr, 1.0, Grading::Uniform);
        let src: Vec<f64> = g
            .nodes
            .iter()
            .map(|p| {
                let r2 = p[0] * p[0] + p[1] * p[1];
                -2.0 * eps * eps / (r2 + eps * eps).powi(2)
            })
            .collect();
        let sol = solve_potential(&g, &src).unwrap();
        let lap = fd::laplacian(&g, &sol.v);
        let mut worst = 0.0f64;
        if let confsurf::grid::GridLayout::Polar { radii, n_theta, .. } = &g.layout {
            for (ir, &r) in radii.iter().enumerate() {
                if !(0.1..=0.85).contains(&r) {
                    continue;
                }
                for it in 0..*n_theta {
                    let i = ir * n_theta + it;
                    worst = worst.max((-lap[i] - src[i]).abs());
                }
            }
        }
        residuals.push(worst);
    }
    let halves = residuals[1] <= 0.5 * residuals[0] && residuals[2] <= 0.5 * residuals[1];

    // harmonic defect of u − v under refinement
    let mut defects = Vec::new();
    for res in [32usize, 64] {
        let s = instantiate_with(SurfaceSpec::FEps { eps }, res, GridStyle::Midpoint).unwrap();
        let chart = &s.charts[0];
        let g = build_geometry(chart).unwrap();
        let source: Vec<f64> = (0..chart.node_count()).map(|i| g.k[i] * g.e2u[i]).collect();
        let sol = solve_potential(&chart.grid, &source).unwrap();
        defects.push(harmonic_defect(&chart.grid, &g.u, &sol.v, 0.12).unwrap());
    }
    let defect_decays = defects[1] < defects[0];
    verdict(
        14,
        halves && defect_decays,
        &format!(
            "potential residuals {residuals:?} (ratios {:.1}, {:.1}; each ≥ 2); harmonic defect {defects:?} decreasing",
            residuals[0] / residuals[1],
            residuals[1] / residuals[2]
        ),
    );
}

#[test]
fn criterion_15_compactness_ingredients_only() {
    // The subsequence-compactness statements themselves are not
    // numerically reproducible; their quantitative ingredients are what
    // this suite pins down: the γ_n thresholds (criterion 5 context and
    // the estimate-sanity test), the 8π behavior of degenerating tori
    // (degeneration series + criterion 3), and the inversion accounting
    // (criteria 7 and 8).
    let rows = confsurf::moduli::degeneration_series(&[1.0, 2.0, 4.0, 8.0], 48).unwrap();
    let tail_exceeds = rows.last().unwrap().willmore >= 8.0 * PI;
    let probe = catalog::helein_dichotomy_probe(&[1.0, 0.5, 0.1], 48).unwrap();
    verdict(
        15,
        tail_exceeds && probe.neither_alternative(),
        "compactness theorems covered through their desk-scale ingredients (γ_n thresholds, 8π torus behavior, inversion accounting, dichotomy probe)",
    );
}
