//! Property tests for the invariants that hold for whole parameter
//! ranges rather than single worked examples.

use confsurf::catalog::{instantiate_with, GridStyle, SurfaceSpec};
use confsurf::geometry::build_surface_geometry;
use confsurf::jet::Jet2;
use confsurf::moduli::{collar_geometry, collar_half_length, normalize_lattice, Lattice};
use num_complex::Complex64;
use proptest::prelude::*;

/// Independent modular-reduction oracle: Lagrange-Gauss reduction of
/// the basis {(1,0), (a,b)} followed by canonical placement.
fn gauss_reduction_oracle(tau: Complex64) -> Lattice {
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
    let z1 = Complex64::new(v1[0], v1[1]);
    let z2 = Complex64::new(v2[0], v2[1]);
    let mut t = z2 / z1;
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
    Lattice { a: t.re, b: t.im }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Lattice reduction lands in the fundamental domain, composes to a
    /// unimodular basis change, and agrees with the Gauss oracle.
    #[test]
    fn lattice_normalization_matches_oracle(re in -5.0f64..5.0, im in 0.05f64..5.0) {
        let tau = Complex64::new(re, im);
        let n = normalize_lattice(tau).unwrap();
        prop_assert!(n.lattice.is_normalized(), "{:?}", n.lattice);
        prop_assert_eq!(n.basis_det().abs(), 1);
        let o = gauss_reduction_oracle(tau);
        prop_assert!(
            (n.lattice.a - o.a).abs() < 1e-11 && (n.lattice.b - o.b).abs() < 1e-11,
            "tau {} + {}i: ({}, {}) vs oracle ({}, {})",
            re, im, n.lattice.a, n.lattice.b, o.a, o.b
        );
    }

    /// κ² + (ℓ/L)² = 1 and L·cos(ℓt) = ℓ across the collar.
    #[test]
    fn collar_pointwise_identities(l in 1e-3f64..2.0, frac in -0.999f64..0.999) {
        let t = frac * collar_half_length(l);
        let g = collar_geometry(l, t).unwrap();
        let pyth = g.curvature * g.curvature + (l / g.length) * (l / g.length);
        prop_assert!((pyth - 1.0).abs() < 1e-12);
        prop_assert!((g.length * (l * t).cos() - l).abs() < 1e-12);
        prop_assert!(g.metric_factor >= l * l - 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Jets agree with central differences for a composite expression.
    #[test]
    fn jets_match_finite_differences(x0 in -1.2f64..1.2, y0 in -1.2f64..1.2) {
        let f = |x: Jet2, y: Jet2| {
            (x * x + y * y + 0.5).ln() * (x * 0.7).sin() + (y * y * x) / (x * x + 1.0)
        };
        let j = f(Jet2::var_x(x0), Jet2::var_y(y0));
        let v = |x: f64, y: f64| f(Jet2::constant(x), Jet2::constant(y)).v;
        let h = 1e-5;
        let fx = (v(x0 + h, y0) - v(x0 - h, y0)) / (2.0 * h);
        let fyy = (v(x0, y0 + h) - 2.0 * v(x0, y0) + v(x0, y0 - h)) / (h * h);
        prop_assert!((j.dx - fx).abs() < 1e-7 * (1.0 + fx.abs()));
        prop_assert!((j.dyy - fyy).abs() < 1e-4 * (1.0 + fyy.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// Ball masses grow monotonically in the radius for any center.
    #[test]
    fn ball_mass_is_monotone(cx in -1.2f64..1.2, cy in -1.2f64..1.2, cz in -1.2f64..1.2, cw in -1.2f64..1.2) {
        let s = instantiate_with(SurfaceSpec::CliffordTorus, 24, GridStyle::Midpoint).unwrap();
        let geoms = build_surface_geometry(&s).unwrap();
        let radii: Vec<f64> = (1..=12).map(|k| 0.2 * k as f64).collect();
        let prof = confsurf::varifold::ball_profile(&s, &geoms, &[cx, cy, cz, cw], &radii).unwrap();
        for w in prof.mass.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-13, "mass dropped: {:?}", w);
        }
    }
}
