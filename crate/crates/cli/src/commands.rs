//! One function per subcommand; each returns the report plus any CSV
//! artifacts.

use std::path::PathBuf;

use anyhow::{bail, Context};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use confsurf::branch;
use confsurf::catalog::{self, GridStyle, SurfaceSpec};
use confsurf::geometry::{
    self, build_surface_geometry, gauss_equation_violation, gauss_map_identity_check,
    orthogonality_violation, surface_energy,
};
use confsurf::immersion::Surface;
use confsurf::mobius;
use confsurf::moduli;
use confsurf::varifold;
use confsurf::ConfsurfError;

use crate::config::RunConfig;
use crate::gridfile;
use crate::report::{csv, CsvFile, Report};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Rounds to 10 significant digits so thread-count and reduction-order
/// jitter never reaches the serialized report.
fn stable(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        v
    } else {
        format!("{v:.9e}").parse().unwrap()
    }
}

fn energy_results(report: &mut Report, rep: &geometry::EnergyReport) {
    report.result("willmore", stable(rep.willmore));
    report.result("total_a", stable(rep.total_a));
    report.result("tracefree_a", stable(rep.tracefree_a));
    report.result("area", stable(rep.area));
    report.result("gauss_bonnet", stable(rep.gauss_bonnet));
    report.result("gauss_map_energy", stable(rep.gauss_map_energy));
    report.result("diam", stable(rep.diam));
}

fn build(cfg: &RunConfig, style: GridStyle) -> anyhow::Result<(SurfaceSpec, Surface)> {
    let spec = cfg.surface_spec()?;
    let surface = catalog::instantiate_with(spec, cfg.grid, style)?;
    Ok((spec, surface))
}

pub fn energy(
    cfg: &RunConfig,
    export_grid: Option<PathBuf>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let (spec, surface) = build(cfg, GridStyle::GaussLegendre)?;
    let mut report = Report::new("energy");
    report.input("surface", spec.display());
    report.input("grid", cfg.grid);
    let geoms = build_surface_geometry(&surface)?;
    let rep = surface_energy(&surface, &geoms);
    energy_results(&mut report, &rep);
    let conf = surface.conformality_residual();
    report.check_bool(
        "conformality_residual",
        conf <= cfg.tol("conformality", 1e-8),
        stable(conf),
        cfg.tol("conformality", 1e-8),
    );
    let finite = [
        rep.willmore,
        rep.total_a,
        rep.tracefree_a,
        rep.area,
        rep.gauss_bonnet,
        rep.gauss_map_energy,
        rep.diam,
    ]
    .iter()
    .all(|v| v.is_finite());
    report.check_bool(
        "energies_finite_area_positive",
        finite && rep.area > 0.0,
        stable(rep.area),
        0.0,
    );
    if let Some(chi) = surface.euler_char {
        let gb = rep.gauss_bonnet - std::f64::consts::TAU * chi as f64;
        report.check_abs(
            "gauss_bonnet_vs_2pi_chi",
            stable(gb),
            cfg.tol("gauss_bonnet", 1e-3),
        );
    }

    if let Some(path) = export_grid {
        let text = match &surface.charts[0].grid.layout {
            confsurf::grid::GridLayout::Rect { .. } => {
                gridfile::write_grid_file(&surface.charts[0])?
            }
            confsurf::grid::GridLayout::Polar { .. } => {
                // resample the first chart on a rectangle inscribed in it
                let (_, rmax) = surface.charts[0].grid.radial_range().unwrap();
                let half = 0.7 * rmax;
                let m = cfg.grid.max(16);
                let line: Vec<f64> = (0..m)
                    .map(|i| -half + 2.0 * half * i as f64 / (m - 1) as f64)
                    .collect();
                let patch = catalog::sample_patch(spec, line.clone(), line)?;
                gridfile::write_grid_file(&patch)?
            }
        };
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        report.result("exported_grid", path.display().to_string());
    }
    Ok((report, Vec::new()))
}

pub fn identity_suite(cfg: &RunConfig) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let (spec, surface) = build(cfg, GridStyle::GaussLegendre)?;
    let mut report = Report::new("identity-suite");
    report.input("surface", spec.display());
    report.input("grid", cfg.grid);
    let geoms = build_surface_geometry(&surface)?;
    let rep = surface_energy(&surface, &geoms);
    energy_results(&mut report, &rep);

    let conf = surface.conformality_residual();
    report.check_bool(
        "conformality_residual",
        conf <= cfg.tol("conformality", 1e-8),
        stable(conf),
        cfg.tol("conformality", 1e-8),
    );
    let ge: f64 = geoms
        .iter()
        .map(gauss_equation_violation)
        .fold(0.0, f64::max);
    report.check_abs(
        "gauss_equation_pointwise",
        stable(ge),
        cfg.tol("gauss_eq", 1e-10),
    );
    let orth: f64 = surface
        .charts
        .iter()
        .zip(&geoms)
        .map(|(c, g)| orthogonality_violation(g, c))
        .fold(0.0, f64::max);
    report.check_abs(
        "second_ff_orthogonality",
        stable(orth),
        cfg.tol("orthogonality", 1e-9),
    );

    // Gauss-map identity per chart sums to the surface-level integrals
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (c, g) in surface.charts.iter().zip(&geoms) {
        let id = gauss_map_identity_check(g, c);
        lhs += id.lhs;
        rhs += id.rhs;
    }
    let denom = rhs.abs().max(1e-9);
    report.result("gauss_map_lhs", stable(lhs));
    report.result("gauss_map_rhs", stable(rhs));
    report.check_abs(
        "gauss_map_identity_rel",
        stable((lhs - rhs) / denom),
        cfg.tol("gauss_map_rel", 1e-2),
    );
    let gamma = geometry::gamma_n(surface.charts[0].n);
    report.result("gamma_n", stable(gamma));
    report.result("total_a_below_gamma_n", rep.total_a < gamma);

    if let Some(chi) = surface.euler_char {
        let gb = rep.gauss_bonnet - std::f64::consts::TAU * chi as f64;
        report.check_abs(
            "gauss_bonnet_vs_2pi_chi",
            stable(gb),
            cfg.tol("gauss_bonnet", 1e-3),
        );
        let decomp = rep.willmore - (0.5 * rep.tracefree_a + std::f64::consts::TAU * chi as f64);
        report.check_abs(
            "willmore_decomposition",
            stable(decomp),
            cfg.tol("willmore_decomp", 1e-3),
        );
    }
    Ok((report, Vec::new()))
}

pub fn branch_cmd(
    cfg: &RunConfig,
    input: Option<PathBuf>,
    exclusion: f64,
    rhos: Option<Vec<f64>>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let mut report = Report::new("branch");
    report.input("exclusion", exclusion);
    let imm = match input {
        Some(path) => {
            report.input("input", path.display().to_string());
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            gridfile::read_grid_file(&text)?
        }
        None => {
            let (spec, mut surface) = build(cfg, GridStyle::GaussLegendre)?;
            report.input("surface", spec.display());
            report.input("grid", cfg.grid);
            if surface.charts.len() != 1 {
                bail!("branch classification expects a single-chart surface");
            }
            surface.charts.remove(0)
        }
    };
    match branch::estimate_branch_order(&imm, exclusion) {
        Err(e @ ConfsurfError::ClassificationFailed { .. })
        | Err(e @ ConfsurfError::NotFiniteArea { .. }) => {
            report.result("error", e.to_string());
            report.check_bool("classification_succeeded", false, f64::NAN, 0.2);
            Ok((report, Vec::new()))
        }
        Err(e) => Err(e.into()),
        Ok(mut est) => {
            let rhos = rhos.unwrap_or_else(|| vec![0.05, 0.1, 0.2, 0.4]);
            let rows = branch::density_ratio_profile(&imm, &mut est, &rhos)?;
            report.result("m", est.m);
            report.result("alpha_raw", stable(est.alpha_raw));
            report.result("omega0", stable(est.omega0));
            report.result("density_limit", stable(est.density_limit));
            report.result("fit_residual", stable(est.fit_residual));
            report.result("unbranched", est.unbranched);
            report.check_bool(
                "classification_succeeded",
                true,
                stable((est.alpha_raw - est.m as f64).abs()),
                branch::ROUNDING_TOL,
            );
            let target = est.m as f64 + 1.0;
            report.check_abs(
                "density_limit_vs_multiplicity_rel",
                stable((est.density_limit - target) / target),
                cfg.tol("density_rel", 0.02),
            );
            let table = csv(
                "density_profile.csv",
                "rho,ratio",
                rows.iter().map(|(a, b)| vec![*a, *b]),
            );
            Ok((report, vec![table]))
        }
    }
}

fn parse_center(center: &Option<Vec<f64>>, n: usize) -> anyhow::Result<Vec<f64>> {
    let Some(c) = center else {
        bail!("this experiment needs --center x,y,…");
    };
    if c.len() != n {
        bail!("--center must have {n} components, got {}", c.len());
    }
    Ok(c.clone())
}

pub fn invert(
    cfg: &RunConfig,
    center: Option<Vec<f64>>,
    preimages: Vec<String>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let (spec, surface) = build(cfg, GridStyle::GaussLegendre)?;
    let mut report = Report::new("invert");
    report.input("surface", spec.display());
    report.input("grid", cfg.grid);
    let x0 = parse_center(&center, surface.charts[0].n)?;
    report.input("center", x0.clone());
    let pres: Vec<mobius::Preimage> = preimages
        .iter()
        .map(|s| -> anyhow::Result<mobius::Preimage> {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 4 {
                bail!("--preimage expects chart,u,v,m; got '{s}'");
            }
            Ok(mobius::Preimage {
                chart: parts[0].trim().parse()?,
                point: [parts[1].trim().parse()?, parts[2].trim().parse()?],
                order: parts[3].trim().parse()?,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    report.input("preimages", preimages.clone());

    let id = mobius::inversion_energy_identity(&surface, &x0, &pres)?;
    report.result("willmore_before", stable(id.willmore_before));
    report.result("lhs", stable(id.lhs));
    report.result("rhs", stable(id.rhs));
    report.result("extrapolation_error", stable(id.extrapolation_error));
    let tol = if pres.is_empty() {
        cfg.tol("inversion", 1e-3)
    } else {
        cfg.tol("inversion_onsurface", 0.05)
    };
    report.check_abs("inversion_identity_gap", stable(id.gap), tol);
    let mut files = Vec::new();
    if !id.excision.is_empty() {
        files.push(csv(
            "excision.csv",
            "delta,willmore",
            id.excision.iter().map(|(a, b)| vec![*a, *b]),
        ));
    }
    Ok((report, files))
}

pub fn monotonicity(
    cfg: &RunConfig,
    center: Option<Vec<f64>>,
    random_centers: usize,
    radii: Option<Vec<f64>>,
    sigma: Option<f64>,
    rho: Option<f64>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let (spec, surface) = build(cfg, GridStyle::Midpoint)?;
    if !surface.closed {
        bail!("monotonicity statistics need a closed surface");
    }
    let mut report = Report::new("monotonicity");
    report.input("surface", spec.display());
    report.input("grid", cfg.grid);
    let n = surface.charts[0].n;
    let geoms = build_surface_geometry(&surface)?;
    let rep = surface_energy(&surface, &geoms);
    let radii = radii.unwrap_or_else(|| {
        (1..=24)
            .map(|k| rep.diam * (0.04 + 1.16 * (k as f64 - 1.0) / 23.0))
            .collect()
    });
    report.input("radii", radii.clone());

    let mut centers: Vec<Vec<f64>> = Vec::new();
    if let Ok(c) = parse_center(&center, n) {
        centers.push(c);
    }
    if random_centers > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..random_centers {
            centers.push(
                (0..n)
                    .map(|_| rng.gen_range(-1.25..1.25) * rep.diam)
                    .collect(),
            );
        }
    }
    if centers.is_empty() {
        bail!("pass --center or --random-centers");
    }
    report.input("centers", centers.len());

    let slack = cfg.tol("mono_slack", 1e-3);
    let mut files = Vec::new();
    let mut worst_drop_all: f64 = 0.0;
    let mut first_profile: Option<varifold::BallProfile> = None;
    for (ci, c) in centers.iter().enumerate() {
        let prof = varifold::ball_profile(&surface, &geoms, c, &radii)?;
        let worst_drop = prof
            .g_values
            .windows(2)
            .map(|w| (w[0] - w[1]).max(0.0))
            .fold(0.0, f64::max);
        worst_drop_all = worst_drop_all.max(worst_drop);
        if ci == 0 {
            files.push(csv(
                "monotonicity_profile.csv",
                "r,mass,willmore_local,moment,g",
                (0..prof.radii.len()).map(|i| {
                    vec![
                        prof.radii[i],
                        prof.mass[i],
                        prof.willmore_local[i],
                        prof.moment[i],
                        prof.g_values[i],
                    ]
                }),
            ));
            first_profile = Some(prof);
        }
    }
    report.check_abs("g_nondecreasing_worst_drop", stable(worst_drop_all), slack);

    // annulus identity on the first center
    let prof = first_profile.unwrap();
    let sigma = sigma.unwrap_or(prof.radii[prof.radii.len() / 4]);
    let rho = rho.unwrap_or(prof.radii[3 * prof.radii.len() / 4]);
    report.input("sigma", sigma);
    report.input("rho", rho);
    let def = varifold::monotonicity_defect(&surface, &geoms, &prof, sigma, rho)?;
    report.result("identity_lhs", stable(def.lhs));
    report.result("identity_rhs", stable(def.rhs));
    // when the jump vanishes (g constant) the gap is measured against
    // the scale of g itself
    let g_scale = prof.g_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rel = def.gap / def.lhs.abs().max(def.rhs.abs()).max(0.05 * g_scale);
    report.check_abs(
        "monotonicity_identity_rel",
        stable(rel),
        cfg.tol("identity_rel", 0.01),
    );
    Ok((report, files))
}

pub fn lattice(
    cfg: &RunConfig,
    tau: Option<Vec<f64>>,
    random: usize,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let mut report = Report::new("lattice");
    let mut files = Vec::new();
    if let Some(t) = &tau {
        if t.len() != 2 {
            bail!("--tau expects re,im");
        }
        let norm = moduli::normalize_lattice(Complex64::new(t[0], t[1]))?;
        report.input("tau", t.clone());
        report.result("a", stable(norm.lattice.a));
        report.result("b", stable(norm.lattice.b));
        report.result(
            "moves",
            norm.moves
                .iter()
                .map(|m| format!("{m:?}"))
                .collect::<Vec<_>>(),
        );
        report.result("basis_det", norm.basis_det());
        report.result("conjugated", norm.conjugated);
        report.check_bool(
            "normalized_in_fundamental_domain",
            norm.lattice.is_normalized(),
            stable(norm.lattice.a),
            0.5,
        );
        report.check_bool(
            "basis_unimodular",
            norm.basis_det().abs() == 1,
            norm.basis_det() as f64,
            1.0,
        );
    }
    if random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut rows = Vec::new();
        let mut all_ok = true;
        let mut det_ok = true;
        for _ in 0..random {
            let t = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.02..4.0));
            let nm = moduli::normalize_lattice(t)?;
            all_ok &= nm.lattice.is_normalized();
            det_ok &= nm.basis_det().abs() == 1;
            rows.push(vec![t.re, t.im, nm.lattice.a, nm.lattice.b]);
        }
        report.input("random", random);
        report.input("seed", cfg.seed);
        report.check_bool("random_sample_normalized", all_ok, random as f64, 0.0);
        report.check_bool("random_sample_unimodular", det_ok, random as f64, 0.0);
        files.push(csv("lattice_sample.csv", "tau_re,tau_im,a,b", rows));
    }
    if tau.is_none() && random == 0 {
        bail!("pass --tau re,im and/or --random N");
    }
    Ok((report, files))
}

pub fn collar(
    cfg: &RunConfig,
    length: f64,
    samples: usize,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let mut report = Report::new("collar");
    report.input("length", length);
    let t_max = moduli::collar_half_length(length);
    report.result("half_length", stable(t_max));
    report.result("half_length_times_l", stable(t_max * length));

    let mut rows = Vec::new();
    let mut worst_pyth: f64 = 0.0;
    for k in 0..samples {
        let t = -0.999 * t_max + 1.998 * t_max * k as f64 / (samples - 1) as f64;
        let g = moduli::collar_geometry(length, t)?;
        worst_pyth = worst_pyth.max(
            (g.curvature * g.curvature + (length / g.length) * (length / g.length) - 1.0).abs(),
        );
        rows.push(vec![t, g.metric_factor, g.curvature, g.length]);
    }
    report.check_abs("curvature_length_pythagoras", stable(worst_pyth), 1e-12);

    // limit markers at fixed distance from the ends
    for t0 in [0.5, 1.0, 2.0] {
        if t_max > t0 {
            let g = moduli::collar_geometry(length, t_max - t0)?;
            report.result(&format!("curvature_at_end_minus_{t0}"), stable(g.curvature));
            report.result(&format!("length_at_end_minus_{t0}"), stable(g.length));
        }
    }

    let pts: Vec<(f64, f64)> = (0..256)
        .map(|k| {
            let s = (k as f64 * 0.37).fract();
            let t = ((k as f64 * 0.61).fract() - 0.5) * 1.9 * t_max;
            (s, t)
        })
        .collect();
    let gap = moduli::collar_isometry_check(length, &pts)?;
    report.check_abs(
        "isometry_pullback_gap",
        stable(gap),
        cfg.tol("isometry", 1e-8),
    );

    let table = csv(
        "collar_profile.csv",
        "t,metric_factor,curvature,length",
        rows,
    );
    Ok((report, vec![table]))
}

pub fn degeneration(
    cfg: &RunConfig,
    b_seq: Option<Vec<f64>>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let b_seq = b_seq.unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let mut report = Report::new("degeneration");
    report.input("b_seq", b_seq.clone());
    report.input("grid", cfg.grid);
    report.result("family_evidence", true);
    let rows = moduli::degeneration_series(&b_seq, cfg.grid)?;
    let min_diam_worst = rows
        .iter()
        .map(|r| (r.min_circle_diam - 1.0).abs())
        .fold(0.0f64, f64::max);
    report.check_abs(
        "min_circle_diameter_normalized",
        stable(min_diam_worst),
        cfg.tol("min_circle", 0.05),
    );
    let nondecreasing = rows
        .windows(2)
        .all(|w| w[1].willmore >= w[0].willmore - 1e-9);
    report.check_bool(
        "willmore_nondecreasing_along_family",
        nondecreasing,
        stable(rows.last().unwrap().willmore),
        0.0,
    );
    let last = rows.last().unwrap();
    report.check_bool(
        "willmore_exceeds_8pi_for_large_b",
        last.willmore >= 8.0 * std::f64::consts::PI - cfg.tol("eight_pi_slack", 1e-6),
        stable(last.willmore),
        8.0 * std::f64::consts::PI,
    );
    let table = csv(
        "degeneration.csv",
        "b,willmore,total_a,min_circle_diam",
        rows.iter()
            .map(|r| vec![r.b, r.willmore, r.total_a, r.min_circle_diam]),
    );
    Ok((report, vec![table]))
}

pub fn helein_probe(
    cfg: &RunConfig,
    eps_seq: Option<Vec<f64>>,
) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let eps_seq = eps_seq.unwrap_or_else(|| vec![1.0, 0.5, 0.25, 0.1, 0.05, 0.01]);
    let mut report = Report::new("helein-probe");
    report.input("eps_seq", eps_seq.clone());
    report.input("grid", cfg.grid);
    let probe = catalog::helein_dichotomy_probe(&eps_seq, cfg.grid)?;
    report.result("factor_unbounded_below", probe.factor_unbounded_below);
    report.result(
        "factor_bounded_away_from_center",
        probe.factor_bounded_away_from_center,
    );
    report.result("maps_do_not_collapse", probe.maps_do_not_collapse);
    report.check_bool(
        "neither_alternative",
        probe.neither_alternative(),
        f64::NAN,
        0.0,
    );
    report.check_bool(
        "energy_increasing_below_4pi",
        probe.energy_increasing_below_4pi,
        stable(probe.rows.last().unwrap().total_a),
        FOUR_PI,
    );
    let worst_energy_gap = probe
        .rows
        .iter()
        .map(|r| (r.total_a - catalog::f_eps_total_a(r.eps)).abs())
        .fold(0.0f64, f64::max);
    report.check_abs(
        "total_a_matches_family_formula",
        stable(worst_energy_gap),
        cfg.tol("f_eps_energy", 1e-3),
    );
    let table = csv(
        "helein_probe.csv",
        "eps,u_at_0,u_at_half,total_a,sup_f",
        probe
            .rows
            .iter()
            .map(|r| vec![r.eps, r.u_at_0, r.u_at_half, r.total_a, r.sup_f]),
    );
    Ok((report, vec![table]))
}

pub fn ingest(cfg: &RunConfig, input: PathBuf) -> anyhow::Result<(Report, Vec<CsvFile>)> {
    let mut report = Report::new("ingest");
    report.input("input", input.display().to_string());
    let text =
        std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
    let imm = gridfile::read_grid_file(&text)?;
    report.result("n", imm.n);
    report.result("nodes", imm.node_count());
    report.result("source", "finite-difference");
    let surface = Surface::single("ingested", imm);
    let geoms = build_surface_geometry(&surface)?;
    let rep = surface_energy(&surface, &geoms);
    energy_results(&mut report, &rep);
    report.result(
        "conformality_residual",
        stable(surface.conformality_residual()),
    );
    let finite = [rep.willmore, rep.total_a, rep.area]
        .iter()
        .all(|v| v.is_finite());
    report.check_bool(
        "energies_finite_area_positive",
        finite && rep.area > 0.0,
        stable(rep.area),
        0.0,
    );
    let _ = cfg;
    Ok((report, Vec::new()))
}
