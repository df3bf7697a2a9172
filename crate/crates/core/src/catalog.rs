//! Closed-form example surfaces with analytic derivatives.
//!
//! Every member is defined by a chart formula evaluated on second-order
//! jets, so the sampled `df`/`d2f` are exact. The family members carry
//! the exact energy values the test-suite pins down:
//!
//! * `f_eps(ε)`: `z ↦ (½z², εz)` in `R⁴`, minimal, with
//!   `∫|A|² dμ = 4π/(1+ε²)`;
//! * `enneper` and its blow-downs `λ⁻³ f(λz)` with `∫|A|² dμ < 8π`;
//! * `power-branch(m)`: the local branch-point model `z ↦ z^{m+1}/(m+1)`;
//! * round sphere (two stereographic charts glued by a partition of
//!   unity), Clifford torus and conformal product tori.

use serde::Serialize;

use crate::error::ConfsurfError;
use crate::grid::{Grading, ParamGrid};
use crate::immersion::{DerivativeSource, SampledImmersion, Surface};
use crate::jet::{CJet, Jet2};
use crate::Result;

/// Inner radius of the punctured disk used for branch-point models.
pub const POWER_BRANCH_RMIN: f64 = 1e-4;

/// Outer radius of each stereographic sphere chart; the partition of
/// unity transitions over [1/SPHERE_CHART_R, SPHERE_CHART_R].
pub const SPHERE_CHART_R: f64 = 2.0;

/// Catalog member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum SurfaceSpec {
    Sphere,
    CliffordTorus,
    ProductTorus { b: f64 },
    FEps { eps: f64 },
    Enneper,
    EnneperBlowdown { lambda: f64 },
    PowerBranch { m: u32, n: usize },
    Plane,
}

/// Quadrature family for the instantiated grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridStyle {
    /// Gauss-Legendre radial panels: high-order energy integrals.
    GaussLegendre,
    /// Midpoint cells whose weights equal exact cell areas: what
    /// ball-restricted (varifold) integrals want.
    Midpoint,
}

impl SurfaceSpec {
    /// Parses the CLI grammar `name(k=v, …)`, e.g. `"f_eps(eps=0.5)"`.
    pub fn parse(s: &str) -> Result<SurfaceSpec> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            None => (s, Vec::new()),
            Some(i) => {
                let rest = s[i + 1..].strip_suffix(')').ok_or_else(|| {
                    ConfsurfError::BadSurfaceSpec(format!("unbalanced parens: {s}"))
                })?;
                let mut kv = Vec::new();
                for part in rest.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let (k, v) = part.split_once('=').ok_or_else(|| {
                        ConfsurfError::BadSurfaceSpec(format!("expected k=v, got '{part}'"))
                    })?;
                    let val: f64 = v.trim().parse().map_err(|_| {
                        ConfsurfError::BadSurfaceSpec(format!(
                            "bad number '{}' for {}",
                            v.trim(),
                            k
                        ))
                    })?;
                    kv.push((k.trim().to_string(), val));
                }
                (&s[..i], kv)
            }
        };
        let get = |key: &str| args.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        let spec = match name {
            "sphere" => SurfaceSpec::Sphere,
            "clifford-torus" => SurfaceSpec::CliffordTorus,
            "product-torus" => {
                let b = get("b").unwrap_or(1.0);
                if !(b > 0.0) {
                    return Err(ConfsurfError::BadSurfaceSpec("need b > 0".into()));
                }
                SurfaceSpec::ProductTorus { b }
            }
            "f_eps" => {
                let eps = get("eps")
                    .ok_or_else(|| ConfsurfError::BadSurfaceSpec("f_eps needs eps".into()))?;
                if !(eps > 0.0) {
                    return Err(ConfsurfError::BadSurfaceSpec("need eps > 0".into()));
                }
                SurfaceSpec::FEps { eps }
            }
            "enneper" => SurfaceSpec::Enneper,
            "enneper-blowdown" => {
                let lambda = get("lambda").or_else(|| get("l")).unwrap_or(1.0);
                if !(lambda >= 1.0) {
                    return Err(ConfsurfError::BadSurfaceSpec("need lambda >= 1".into()));
                }
                SurfaceSpec::EnneperBlowdown { lambda }
            }
            "power-branch" => {
                let m = get("m")
                    .ok_or_else(|| ConfsurfError::BadSurfaceSpec("power-branch needs m".into()))?;
                if m < 0.0 || m > 4.0 || m.fract() != 0.0 {
                    return Err(ConfsurfError::BadSurfaceSpec(
                        "need integer m in 0..=4".into(),
                    ));
                }
                let n = get("n").unwrap_or(3.0);
                if n < 3.0 || n.fract() != 0.0 {
                    return Err(ConfsurfError::BadSurfaceSpec("need integer n >= 3".into()));
                }
                SurfaceSpec::PowerBranch {
                    m: m as u32,
                    n: n as usize,
                }
            }
            "plane" => SurfaceSpec::Plane,
            other => {
                return Err(ConfsurfError::BadSurfaceSpec(format!(
                    "unknown surface '{other}'"
                )))
            }
        };
        Ok(spec)
    }

    /// Canonical spec string.
    pub fn display(&self) -> String {
        match self {
            SurfaceSpec::Sphere => "sphere".into(),
            SurfaceSpec::CliffordTorus => "clifford-torus".into(),
            SurfaceSpec::ProductTorus { b } => format!("product-torus(b={b})"),
            SurfaceSpec::FEps { eps } => format!("f_eps(eps={eps})"),
            SurfaceSpec::Enneper => "enneper".into(),
            SurfaceSpec::EnneperBlowdown { lambda } => format!("enneper-blowdown(lambda={lambda})"),
            SurfaceSpec::PowerBranch { m, n } => format!("power-branch(m={m},n={n})"),
            SurfaceSpec::Plane => "plane".into(),
        }
    }

    /// Whether the member samples a closed surface.
    pub fn is_closed(&self) -> bool {
        matches!(
            self,
            SurfaceSpec::Sphere | SurfaceSpec::CliffordTorus | SurfaceSpec::ProductTorus { .. }
        )
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        match self {
            SurfaceSpec::Sphere | SurfaceSpec::Enneper | SurfaceSpec::EnneperBlowdown { .. } => 3,
            SurfaceSpec::CliffordTorus | SurfaceSpec::ProductTorus { .. } => 4,
            SurfaceSpec::FEps { .. } => 4,
            SurfaceSpec::PowerBranch { n, .. } => *n,
            SurfaceSpec::Plane => 3,
        }
    }
}

/// Evaluates a jet-valued chart map on every grid node.
pub(crate) fn sample_chart(
    grid: ParamGrid,
    n: usize,
    eval: impl Fn(f64, f64) -> Vec<Jet2> + Sync,
) -> SampledImmersion {
    let nn = grid.node_count();
    let mut f = vec![0.0; nn * n];
    let mut d1 = vec![0.0; nn * n];
    let mut d2 = vec![0.0; nn * n];
    let mut d11 = vec![0.0; nn * n];
    let mut d12 = vec![0.0; nn * n];
    let mut d22 = vec![0.0; nn * n];
    for (i, p) in grid.nodes.iter().enumerate() {
        let jets = eval(p[0], p[1]);
        debug_assert_eq!(jets.len(), n);
        for (k, j) in jets.iter().enumerate() {
            f[i * n + k] = j.v;
            d1[i * n + k] = j.dx;
            d2[i * n + k] = j.dy;
            d11[i * n + k] = j.dxx;
            d12[i * n + k] = j.dxy;
            d22[i * n + k] = j.dyy;
        }
    }
    SampledImmersion {
        grid,
        n,
        f,
        df: [d1, d2],
        d2f: [d11, d12, d22],
        source: DerivativeSource::Analytic,
        chart_weight: None,
    }
}

fn disk_grid(res: usize, style: GridStyle, rmin: f64, rmax: f64, grading: Grading) -> ParamGrid {
    let nt = 2 * res;
    match (style, rmin > 0.0) {
        (GridStyle::GaussLegendre, false) => ParamGrid::disk_gl(res, nt, rmax, grading),
        (GridStyle::GaussLegendre, true) => ParamGrid::annulus_gl(res, nt, rmin, rmax, grading),
        (GridStyle::Midpoint, false) => ParamGrid::disk_midpoint(res, nt, rmax, grading),
        (GridStyle::Midpoint, true) => ParamGrid::annulus_midpoint(res, nt, rmin, rmax, grading),
    }
}

/// Smallest geometric ratio whose innermost cell is at most `target`
/// wide when `cells` cells span `span`.
fn adaptive_grading(span: f64, cells: usize, target: f64) -> Grading {
    let width = |ratio: f64| span * (ratio - 1.0) / (ratio.powi(cells as i32) - 1.0);
    let (mut lo, mut hi) = (1.01, 3.0);
    if width(hi) > target {
        return Grading::Geometric { ratio: hi };
    }
    if width(lo) <= target {
        return Grading::Geometric { ratio: lo };
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if width(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Grading::Geometric { ratio: hi }
}

/// Disk grid resolving a feature of scale `scale` at the origin: a
/// geometrically graded inner zone joined to uniform outer panels.
fn feature_disk_grid(res: usize, style: GridStyle, rmax: f64, scale: f64) -> ParamGrid {
    let nt = 2 * res;
    match style {
        GridStyle::GaussLegendre => {
            let panels = (res / 4).max(4);
            let zone = (8.0 * scale).min(0.5 * rmax);
            let inner = panels / 2;
            let outer = panels - inner;
            let g = adaptive_grading(zone, inner, scale / 5.0);
            let mut edges = g.edges(inner, 0.0, zone);
            for k in 1..=outer {
                edges.push(zone + (rmax - zone) * k as f64 / outer as f64);
            }
            ParamGrid::disk_gl_edges(&edges, nt)
        }
        GridStyle::Midpoint => {
            let g = adaptive_grading(rmax, res, scale / 5.0);
            ParamGrid::disk_midpoint(res, nt, rmax, g)
        }
    }
}

/// Quintic smoothstep (C², symmetric: s(t) + s(1-t) = 1).
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

/// Partition-of-unity weight of a sphere chart at chart radius `r`.
fn sphere_pou(r: f64) -> f64 {
    let rho = SPHERE_CHART_R;
    if r <= 1.0 / rho {
        1.0
    } else if r >= rho {
        0.0
    } else {
        let x = r.ln() / rho.ln(); // in (-1, 1)
        smoothstep(0.5 * (1.0 - x))
    }
}

/// Stereographic chart of the unit sphere; `flip` mirrors the z-axis for
/// the opposite chart. Both have conformal factor 2/(1+|w|²).
fn sphere_chart_jets(x: f64, y: f64, flip: bool) -> Vec<Jet2> {
    let xj = Jet2::var_x(x);
    let yj = Jet2::var_y(y);
    let s = (xj * xj + yj * yj + 1.0).recip();
    let fx = xj * s * 2.0;
    let fy = yj * s * 2.0;
    let fz = (Jet2::constant(1.0) - s * 2.0) * if flip { -1.0 } else { 1.0 };
    vec![fx, fy, fz]
}

/// Sphere chart grid: Gauss-Legendre panels aligned to the partition-of-
/// unity joints at 1/R and R so the C² kinks never cross a panel.
fn sphere_grid(res: usize, style: GridStyle) -> ParamGrid {
    let rho = SPHERE_CHART_R;
    match style {
        GridStyle::GaussLegendre => {
            let panels = (res / 4).max(3);
            let inner = (panels / 3).max(1);
            let outer = panels - inner;
            let mut edges = Vec::with_capacity(panels + 1);
            for k in 0..=inner {
                edges.push(k as f64 / inner as f64 / rho);
            }
            for k in 1..=outer {
                edges.push(1.0 / rho + (rho - 1.0 / rho) * k as f64 / outer as f64);
            }
            ParamGrid::disk_gl_edges(&edges, 2 * res)
        }
        GridStyle::Midpoint => {
            // fine geometric cells near the chart center (ball-restricted
            // integrals around points on the sphere need them), uniform
            // outside
            let inner_cells = res / 2;
            let outer_cells = res - inner_cells;
            let g = adaptive_grading(1.0 / rho, inner_cells, 0.002);
            let mut edges = g.edges(inner_cells, 0.0, 1.0 / rho);
            for k in 1..=outer_cells {
                edges.push(1.0 / rho + (rho - 1.0 / rho) * k as f64 / outer_cells as f64);
            }
            ParamGrid::disk_midpoint_edges(&edges, 2 * res)
        }
    }
}

fn sphere_surface(res: usize, style: GridStyle) -> Surface {
    let mut charts = Vec::new();
    for flip in [false, true] {
        let grid = sphere_grid(res, style);
        let mut chart = sample_chart(grid, 3, move |x, y| sphere_chart_jets(x, y, flip));
        let pou: Vec<f64> = chart
            .grid
            .nodes
            .iter()
            .map(|p| sphere_pou(p[0].hypot(p[1])))
            .collect();
        chart.chart_weight = Some(pou);
        charts.push(chart);
    }
    Surface {
        name: "sphere".into(),
        charts,
        euler_char: Some(2),
        closed: true,
    }
}

fn f_eps_jets(eps: f64, x: f64, y: f64) -> Vec<Jet2> {
    let z = CJet::var(x, y);
    let z2 = (z * z).scale(0.5);
    vec![z2.re, z2.im, Jet2::var_x(x) * eps, Jet2::var_y(y) * eps]
}

fn enneper_jets(lambda: f64, x: f64, y: f64) -> Vec<Jet2> {
    // blow-down λ⁻³ f(λ z); λ = 1 is Enneper itself
    let z = CJet {
        re: Jet2::var_x(x) * lambda,
        im: Jet2::var_y(y) * lambda,
    };
    let z3 = z.powu(3).scale(1.0 / 3.0);
    let a = (z - z3).scale(0.5);
    let b = (z + z3).scale(0.5);
    let c = (z * z).scale(0.5);
    let s = lambda.powi(-3);
    vec![a.re * s, -(b.im) * s, c.re * s]
}

fn power_branch_jets(m: u32, n: usize, x: f64, y: f64) -> Vec<Jet2> {
    let z = CJet::var(x, y);
    let p = z.powu(m + 1).scale(1.0 / (m + 1) as f64);
    let mut out = vec![p.re, p.im];
    out.resize(n, Jet2::ZERO);
    out
}

fn torus_jets(radius: f64, b: f64, s: f64, t: f64) -> Vec<Jet2> {
    let tau = std::f64::consts::TAU;
    let ang_s = Jet2::var_x(s) * tau;
    let ang_t = Jet2::var_y(t) * (tau / b);
    vec![
        ang_s.cos() * radius,
        ang_s.sin() * radius,
        ang_t.cos() * (radius * b),
        ang_t.sin() * (radius * b),
    ]
}

/// Instantiates a catalog member at the given resolution (radial nodes
/// for disks, rows for tori) with Gauss-Legendre quadrature.
pub fn instantiate(spec: SurfaceSpec, res: usize) -> Result<Surface> {
    instantiate_with(spec, res, GridStyle::GaussLegendre)
}

/// Instantiates with an explicit quadrature style.
pub fn instantiate_with(spec: SurfaceSpec, res: usize, style: GridStyle) -> Result<Surface> {
    if res < 16 {
        return Err(ConfsurfError::InvalidInput(format!(
            "resolution {res} below the minimum of 16"
        )));
    }
    let surface = match spec {
        SurfaceSpec::Sphere => sphere_surface(res, style),
        SurfaceSpec::Plane => {
            let grid = disk_grid(res, style, 0.0, 1.0, Grading::Uniform);
            Surface::single(
                spec.display(),
                sample_chart(grid, 3, |x, y| {
                    vec![Jet2::var_x(x), Jet2::var_y(y), Jet2::ZERO]
                }),
            )
        }
        SurfaceSpec::FEps { eps } => {
            let grid = feature_disk_grid(res, style, 1.0, eps.min(0.25));
            Surface::single(
                spec.display(),
                sample_chart(grid, 4, move |x, y| f_eps_jets(eps, x, y)),
            )
        }
        SurfaceSpec::Enneper => {
            let grid = disk_grid(res, style, 0.0, 1.0, Grading::Uniform);
            Surface::single(
                spec.display(),
                sample_chart(grid, 3, |x, y| enneper_jets(1.0, x, y)),
            )
        }
        SurfaceSpec::EnneperBlowdown { lambda } => {
            let grid = disk_grid(res, style, 0.0, 1.0, Grading::Uniform);
            Surface::single(
                spec.display(),
                sample_chart(grid, 3, move |x, y| enneper_jets(lambda, x, y)),
            )
        }
        SurfaceSpec::PowerBranch { m, n } => {
            let cells = match style {
                GridStyle::GaussLegendre => (res / 4).max(4),
                GridStyle::Midpoint => res,
            };
            let g = adaptive_grading(1.0 - POWER_BRANCH_RMIN, cells, 2.0 * POWER_BRANCH_RMIN);
            let grid = disk_grid(res, style, POWER_BRANCH_RMIN, 1.0, g);
            Surface::single(
                spec.display(),
                sample_chart(grid, n, move |x, y| power_branch_jets(m, n, x, y)),
            )
        }
        SurfaceSpec::CliffordTorus => {
            let grid = ParamGrid::flat_torus(res, res, 1.0);
            let r = std::f64::consts::FRAC_1_SQRT_2;
            Surface::single(
                spec.display(),
                sample_chart(grid, 4, move |s, t| torus_jets(r, 1.0, s, t)),
            )
        }
        SurfaceSpec::ProductTorus { b } => {
            let cols = ((res as f64 * b).round() as usize).max(16);
            let grid = ParamGrid::flat_torus(res, cols, b);
            let r = 1.0 / std::f64::consts::TAU;
            Surface::single(
                spec.display(),
                sample_chart(grid, 4, move |s, t| torus_jets(r, b, s, t)),
            )
        }
    };
    Ok(surface)
}

/// Samples an open chart of the member on an explicit rectangular grid
/// with analytic derivatives (the first stereographic chart for the
/// sphere). Feeds grid-file export and its round-trip oracle.
pub fn sample_patch(spec: SurfaceSpec, xs: Vec<f64>, ys: Vec<f64>) -> Result<SampledImmersion> {
    let grid = ParamGrid::rect(crate::grid::DomainKind::Disk, xs, ys, None, None);
    let chart = match spec {
        SurfaceSpec::Sphere => sample_chart(grid, 3, |x, y| sphere_chart_jets(x, y, false)),
        SurfaceSpec::Plane => sample_chart(grid, 3, |x, y| {
            vec![Jet2::var_x(x), Jet2::var_y(y), Jet2::ZERO]
        }),
        SurfaceSpec::FEps { eps } => sample_chart(grid, 4, move |x, y| f_eps_jets(eps, x, y)),
        SurfaceSpec::Enneper => sample_chart(grid, 3, |x, y| enneper_jets(1.0, x, y)),
        SurfaceSpec::EnneperBlowdown { lambda } => {
            sample_chart(grid, 3, move |x, y| enneper_jets(lambda, x, y))
        }
        SurfaceSpec::PowerBranch { m, n } => {
            sample_chart(grid, n, move |x, y| power_branch_jets(m, n, x, y))
        }
        SurfaceSpec::CliffordTorus | SurfaceSpec::ProductTorus { .. } => {
            return Err(ConfsurfError::InvalidInput(
                "tori are sampled on their native periodic lattice, not a patch".into(),
            ))
        }
    };
    Ok(chart)
}

/// One row of the Hélein dichotomy probe on the `f_ε` family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeleinRow {
    pub eps: f64,
    /// Conformal factor extrapolated to the chart origin.
    pub u_at_0: f64,
    /// Conformal factor at |z| = ½.
    pub u_at_half: f64,
    /// ∫ |A|² dμ over the unit disk.
    pub total_a: f64,
    /// sup |f| over the sampled disk.
    pub sup_f: f64,
}

/// Probe result: the family violates both convergence alternatives —
/// the conformal factor collapses at the origin while the maps do not
/// shrink to a point.
#[derive(Clone, Debug, Serialize)]
pub struct HeleinProbe {
    pub rows: Vec<HeleinRow>,
    /// u(0) → −∞ along the sequence (alternative (a) fails).
    pub factor_unbounded_below: bool,
    /// u(½) stays bounded.
    pub factor_bounded_away_from_center: bool,
    /// sup |f| stays bounded away from zero (alternative (b) fails).
    pub maps_do_not_collapse: bool,
    /// ∫|A|² dμ increases toward 4π from below.
    pub energy_increasing_below_4pi: bool,
}

impl HeleinProbe {
    pub fn neither_alternative(&self) -> bool {
        self.factor_unbounded_below
            && self.factor_bounded_away_from_center
            && self.maps_do_not_collapse
    }
}

/// Runs the dichotomy probe on a decreasing ε-sequence.
pub fn helein_dichotomy_probe(eps_seq: &[f64], res: usize) -> Result<HeleinProbe> {
    if eps_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ConfsurfError::InvalidInput(
            "epsilon sequence must be strictly decreasing".into(),
        ));
    }
    let mut rows = Vec::new();
    for &eps in eps_seq {
        let surface = instantiate(SurfaceSpec::FEps { eps }, res)?;
        let chart = &surface.charts[0];
        let geom = crate::geometry::build_geometry(chart)?;
        let rep = crate::geometry::energy_report(&geom, chart);
        let it = crate::interp::Interp::new(&chart.grid);
        let u_at_0 = it.eval_scalar(&geom.u, [0.0, 0.0]);
        let u_at_half = it.eval_scalar(&geom.u, [0.5, 0.0]);
        let sup_f = (0..chart.node_count())
            .map(|i| crate::immersion::vecn::norm(chart.point(i)))
            .fold(0.0, f64::max);
        rows.push(HeleinRow {
            eps,
            u_at_0,
            u_at_half,
            total_a: rep.total_a,
            sup_f,
        });
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    let factor_unbounded_below = rows.windows(2).all(|w| w[1].u_at_0 < w[0].u_at_0 - 1e-6);
    let factor_bounded_away_from_center = rows.iter().all(|r| r.u_at_half.abs() < 1.0);
    let maps_do_not_collapse = rows.iter().all(|r| r.sup_f > 0.4);
    let energy_increasing_below_4pi = rows.windows(2).all(|w| w[1].total_a > w[0].total_a - 1e-9)
        && rows.iter().all(|r| r.total_a < four_pi);
    Ok(HeleinProbe {
        rows,
        factor_unbounded_below,
        factor_bounded_away_from_center,
        maps_do_not_collapse,
        energy_increasing_below_4pi,
    })
}

/// Exact `∫|A|² dμ` of `f_ε` on the unit disk.
pub fn f_eps_total_a(eps: f64) -> f64 {
    4.0 * std::f64::consts::PI / (1.0 + eps * eps)
}

/// Exact `∫|A|² dμ` of the Enneper blow-down restricted to the unit disk
/// (boundary flux of the conformal factor, 2∮ ∂u/∂r ds at radius λ).
pub fn enneper_blowdown_total_a(lambda: f64) -> f64 {
    8.0 * std::f64::consts::PI * lambda * lambda / (1.0 + lambda * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, energy_report};

    #[test]
    fn parses_the_cli_grammar() {
        assert_eq!(SurfaceSpec::parse("sphere").unwrap(), SurfaceSpec::Sphere);
        assert_eq!(
            SurfaceSpec::parse("f_eps(eps=0.5)").unwrap(),
            SurfaceSpec::FEps { eps: 0.5 }
        );
        assert_eq!(
            SurfaceSpec::parse("power-branch(m=2, n=4)").unwrap(),
            SurfaceSpec::PowerBranch { m: 2, n: 4 }
        );
        assert_eq!(
            SurfaceSpec::parse(" enneper-blowdown(lambda=4) ").unwrap(),
            SurfaceSpec::EnneperBlowdown { lambda: 4.0 }
        );
        assert!(SurfaceSpec::parse("f_eps(eps=nope)").is_err());
        assert!(SurfaceSpec::parse("f_eps(eps=-1)").is_err());
        assert!(SurfaceSpec::parse("mystery").is_err());
        assert!(SurfaceSpec::parse("power-branch(m=7)").is_err());
    }

    #[test]
    fn f_eps_conformal_factor_matches_closed_form() {
        // u_ε(z) = ½ log(|z|² + ε²)
        for eps in [0.1, 1.0] {
            let s = instantiate(SurfaceSpec::FEps { eps }, 32).unwrap();
            let chart = &s.charts[0];
            let geom = build_geometry(chart).unwrap();
            for (i, p) in chart.grid.nodes.iter().enumerate() {
                let want = 0.5 * (p[0] * p[0] + p[1] * p[1] + eps * eps).ln();
                assert!(
                    (geom.u[i] - want).abs() < 1e-12,
                    "u mismatch at {p:?}: {} vs {want}",
                    geom.u[i]
                );
            }
        }
    }

    #[test]
    fn f_eps_u_values_at_marked_points() {
        let s = instantiate(SurfaceSpec::FEps { eps: 0.1 }, 64).unwrap();
        let chart = &s.charts[0];
        let geom = build_geometry(chart).unwrap();
        let it = crate::interp::Interp::new(&chart.grid);
        let u0 = it.eval_scalar(&geom.u, [0.0, 0.0]);
        assert!((u0 - 0.1f64.ln()).abs() < 1e-3, "u(0) = {u0}");
        // boundary value is a one-sided stencil; tolerance reflects that
        let u1 = it.eval_scalar(&geom.u, [1.0, 0.0]);
        assert!((u1 - 0.5 * 1.01f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn minimal_members_have_vanishing_mean_curvature() {
        for spec in [
            SurfaceSpec::FEps { eps: 1.0 },
            SurfaceSpec::Enneper,
            SurfaceSpec::EnneperBlowdown { lambda: 4.0 },
            SurfaceSpec::PowerBranch { m: 2, n: 3 },
        ] {
            let s = instantiate(spec, 32).unwrap();
            let chart = &s.charts[0];
            let geom = build_geometry(chart).unwrap();
            let worst = (0..chart.node_count())
                .map(|i| geom.h_sq[i].sqrt() * geom.u[i].exp())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "{}: max |H| e^u = {worst}", spec.display());
        }
    }

    #[test]
    fn catalog_members_are_conformal() {
        let specs = [
            SurfaceSpec::Sphere,
            SurfaceSpec::CliffordTorus,
            SurfaceSpec::ProductTorus { b: 2.0 },
            SurfaceSpec::FEps { eps: 0.5 },
            SurfaceSpec::Enneper,
            SurfaceSpec::EnneperBlowdown { lambda: 2.0 },
            SurfaceSpec::PowerBranch { m: 1, n: 3 },
            SurfaceSpec::Plane,
        ];
        for spec in specs {
            let s = instantiate(spec, 32).unwrap();
            let r = s.conformality_residual();
            assert!(r < 1e-8, "{} residual {r}", spec.display());
        }
    }

    #[test]
    fn power_branch_m0_is_identity_chart() {
        let s = instantiate(SurfaceSpec::PowerBranch { m: 0, n: 3 }, 32).unwrap();
        let chart = &s.charts[0];
        for (i, p) in chart.grid.nodes.iter().enumerate() {
            assert!((chart.f[i * 3] - p[0]).abs() < 1e-15);
            assert!((chart.f[i * 3 + 1] - p[1]).abs() < 1e-15);
            assert_eq!(chart.f[i * 3 + 2], 0.0);
        }
    }

    #[test]
    fn f_eps_energy_matches_family_formula() {
        // ∫|A|² dμ = 4π/(1+ε²)
        let s = instantiate(SurfaceSpec::FEps { eps: 1.0 }, 64).unwrap();
        let chart = &s.charts[0];
        let geom = build_geometry(chart).unwrap();
        let rep = energy_report(&geom, chart);
        assert!(
            (rep.total_a - 2.0 * std::f64::consts::PI).abs() < 1e-6,
            "total_A = {}",
            rep.total_a
        );
    }

    #[test]
    fn helein_probe_flags_neither_alternative() {
        let probe = helein_dichotomy_probe(&[1.0, 0.5, 0.1, 0.01], 48).unwrap();
        assert!(probe.neither_alternative());
        assert!(probe.energy_increasing_below_4pi);
        let last = probe.rows.last().unwrap();
        assert!((last.u_at_0 - 0.01f64.ln()).abs() < 0.05, "{}", last.u_at_0);
        assert!((last.u_at_half - 0.5 * 0.2501f64.ln()).abs() < 1e-4);
        let first = &probe.rows[0];
        assert!((first.total_a - 2.0 * std::f64::consts::PI).abs() < 1e-6);
    }
}
