//! Browser bindings for three interactive experiments. Each export
//! returns a JSON string the static page plots directly; the heavy
//! lifting stays in the core crate (built without thread support here).

use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use confsurf::catalog::{f_eps_total_a, instantiate, SurfaceSpec};
use confsurf::geometry::{build_geometry, energy_report};
use confsurf::interp::{angular_means, Interp};
use confsurf::moduli::{collar_geometry, collar_half_length, normalize_lattice, LatticeMove};

#[derive(Serialize)]
struct FEpsProfile {
    eps: f64,
    r: Vec<f64>,
    u: Vec<f64>,
    u_exact: Vec<f64>,
    u_at_0: f64,
    u_at_half: f64,
    total_a: f64,
    total_a_exact: f64,
    four_pi: f64,
    sup_f: f64,
}

/// Radial profile and energies of the `f_ε(z) = (½z², εz)` family on
/// the unit disk.
#[wasm_bindgen]
pub fn f_eps_profile(eps: f64, res: usize) -> String {
    let eps = eps.clamp(1e-3, 10.0);
    let res = res.clamp(24, 96);
    let surface = instantiate(SurfaceSpec::FEps { eps }, res).expect("valid family member");
    let chart = &surface.charts[0];
    let geom = build_geometry(chart).expect("family members are immersed");
    let rep = energy_report(&geom, chart);
    let (r, u) = angular_means(&chart.grid, &geom.u).expect("disk chart");
    let u_exact = r
        .iter()
        .map(|&rr| 0.5 * (rr * rr + eps * eps).ln())
        .collect();
    let it = Interp::new(&chart.grid);
    let sup_f = (0..chart.node_count())
        .map(|i| confsurf::immersion::vecn::norm(chart.point(i)))
        .fold(0.0, f64::max);
    let out = FEpsProfile {
        eps,
        u_at_0: it.eval_scalar(&geom.u, [0.0, 0.0]),
        u_at_half: it.eval_scalar(&geom.u, [0.5, 0.0]),
        r,
        u,
        u_exact,
        total_a: rep.total_a,
        total_a_exact: f_eps_total_a(eps),
        four_pi: 4.0 * std::f64::consts::PI,
        sup_f,
    };
    serde_json::to_string(&out).unwrap()
}

#[derive(Serialize)]
struct CollarProfile {
    l: f64,
    t_max: f64,
    t: Vec<f64>,
    curvature: Vec<f64>,
    length: Vec<f64>,
    metric_factor: Vec<f64>,
    /// (t₀, κ(T−t₀), L(T−t₀), 1/(t₀+½)) rows for the ℓ → 0 limits.
    end_markers: Vec<(f64, f64, f64, f64)>,
}

/// Collar cylinder profile for a closed geodesic of length `l`.
#[wasm_bindgen]
pub fn collar_profile(l: f64, samples: usize) -> String {
    let l = l.clamp(1e-4, 3.0);
    let samples = samples.clamp(16, 2048);
    let t_max = collar_half_length(l);
    let mut t = Vec::with_capacity(samples);
    let mut curvature = Vec::with_capacity(samples);
    let mut length = Vec::with_capacity(samples);
    let mut metric_factor = Vec::with_capacity(samples);
    for k in 0..samples {
        let tt = -0.995 * t_max + 1.99 * t_max * k as f64 / (samples - 1) as f64;
        let g = collar_geometry(l, tt).expect("inside the collar");
        t.push(tt);
        curvature.push(g.curvature);
        length.push(g.length);
        metric_factor.push(g.metric_factor);
    }
    let end_markers = [0.5, 1.0, 2.0]
        .iter()
        .filter(|&&t0| t_max > t0 + 1e-6)
        .map(|&t0| {
            let g = collar_geometry(l, t_max - t0).unwrap();
            (t0, g.curvature, g.length, 1.0 / (t0 + 0.5))
        })
        .collect();
    let out = CollarProfile {
        l,
        t_max,
        t,
        curvature,
        length,
        metric_factor,
        end_markers,
    };
    serde_json::to_string(&out).unwrap()
}

#[derive(Serialize)]
struct LatticeReduction {
    a: f64,
    b: f64,
    conjugated: bool,
    basis_det: i64,
    moves: Vec<String>,
    /// τ after each move, starting from the input.
    path: Vec<[f64; 2]>,
    error: Option<String>,
}

/// Reduces τ = re + i·im into the fundamental domain, reporting the
/// walk for animation.
#[wasm_bindgen]
pub fn lattice_reduce(re: f64, im: f64) -> String {
    let tau = Complex64::new(re, im);
    let norm = match normalize_lattice(tau) {
        Ok(n) => n,
        Err(e) => {
            return serde_json::to_string(&LatticeReduction {
                a: f64::NAN,
                b: f64::NAN,
                conjugated: false,
                basis_det: 0,
                moves: Vec::new(),
                path: Vec::new(),
                error: Some(e.to_string()),
            })
            .unwrap()
        }
    };
    let mut path = vec![[tau.re, tau.im]];
    let mut cur = tau;
    let mut moves = Vec::new();
    for mv in &norm.moves {
        cur = match mv {
            LatticeMove::Shift(k) => {
                moves.push(format!("shift by {k}"));
                Complex64::new(cur.re + *k as f64, cur.im)
            }
            LatticeMove::Invert => {
                moves.push("invert: τ ↦ −1/τ".to_string());
                -cur.inv()
            }
            LatticeMove::Reflect => {
                moves.push("reflect: τ ↦ −conj(τ)".to_string());
                Complex64::new(-cur.re, cur.im)
            }
        };
        path.push([cur.re, cur.im]);
    }
    let out = LatticeReduction {
        a: norm.lattice.a,
        b: norm.lattice.b,
        conjugated: norm.conjugated,
        basis_det: norm.basis_det(),
        moves,
        path,
        error: None,
    };
    serde_json::to_string(&out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_eps_payload_carries_the_family_values() {
        let v: serde_json::Value = serde_json::from_str(&f_eps_profile(0.5, 48)).unwrap();
        let total = v["total_a"].as_f64().unwrap();
        let exact = v["total_a_exact"].as_f64().unwrap();
        assert!((exact - 4.0 * std::f64::consts::PI / 1.25).abs() < 1e-12);
        assert!((total - exact).abs() < 1e-4, "{total} vs {exact}");
        let u0 = v["u_at_0"].as_f64().unwrap();
        assert!((u0 - 0.5f64.ln()).abs() < 1e-3);
        assert_eq!(
            v["r"].as_array().unwrap().len(),
            v["u"].as_array().unwrap().len()
        );
    }

    #[test]
    fn collar_payload_matches_closed_forms() {
        let v: serde_json::Value = serde_json::from_str(&collar_profile(0.1, 128)).unwrap();
        let t_max = v["t_max"].as_f64().unwrap();
        assert!((t_max - 15.2084).abs() < 1e-3);
        let k = v["curvature"].as_array().unwrap();
        // κ is odd in t and bounded by 1
        assert!(k.iter().all(|x| x.as_f64().unwrap().abs() <= 1.0));
    }

    #[test]
    fn lattice_payload_replays_the_walk() {
        let v: serde_json::Value = serde_json::from_str(&lattice_reduce(0.6, 0.9)).unwrap();
        assert!((v["a"].as_f64().unwrap() - 0.41237).abs() < 1e-4);
        assert!((v["b"].as_f64().unwrap() - 0.92784).abs() < 1e-4);
        let path = v["path"].as_array().unwrap();
        // the replayed endpoint equals the reported lattice
        let last = path.last().unwrap().as_array().unwrap();
        assert!((last[0].as_f64().unwrap() - v["a"].as_f64().unwrap()).abs() < 1e-12);
        assert!(v["error"].is_null());

        let bad: serde_json::Value = serde_json::from_str(&lattice_reduce(0.0, -1.0)).unwrap();
        assert!(!bad["error"].is_null());
    }
}
