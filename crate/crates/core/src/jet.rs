//! Second-order two-dimensional jets.
//!
//! Catalog surfaces are defined by closed-form chart maps. Evaluating
//! those maps on [`Jet2`] values propagates exact first and second
//! derivatives with respect to the chart coordinates, so sampled
//! immersions carry analytic `df`/`d2f` without hand-derived formulas.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value together with gradient and Hessian w.r.t. chart coordinates (x, y).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2::constant(0.0);

    pub const fn constant(v: f64) -> Self {
        Jet2 {
            v,
            dx: 0.0,
            dy: 0.0,
            dxx: 0.0,
            dxy: 0.0,
            dyy: 0.0,
        }
    }

    /// The first chart coordinate as a jet.
    pub fn var_x(v: f64) -> Self {
        Jet2 {
            v,
            dx: 1.0,
            ..Jet2::ZERO
        }
    }

    /// The second chart coordinate as a jet.
    pub fn var_y(v: f64) -> Self {
        Jet2 {
            v,
            dy: 1.0,
            ..Jet2::ZERO
        }
    }

    /// Chain rule for a scalar function with value `u`, derivative `du`
    /// and second derivative `ddu` at `self.v`.
    fn chain(self, u: f64, du: f64, ddu: f64) -> Self {
        Jet2 {
            v: u,
            dx: du * self.dx,
            dy: du * self.dy,
            dxx: ddu * self.dx * self.dx + du * self.dxx,
            dxy: ddu * self.dx * self.dy + du * self.dxy,
            dyy: ddu * self.dy * self.dy + du * self.dyy,
        }
    }

    pub fn recip(self) -> Self {
        let iv = 1.0 / self.v;
        self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let iv = 1.0 / self.v;
        self.chain(self.v.ln(), iv, -iv * iv)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn powi(self, k: i32) -> Self {
        match k {
            0 => Jet2::constant(1.0),
            k if k < 0 => self.powi(-k).recip(),
            _ => {
                let p = self.v.powi(k - 2);
                self.chain(
                    p * self.v * self.v,
                    k as f64 * p * self.v,
                    (k * (k - 1)) as f64 * p,
                )
            }
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + 2.0 * self.dy * o.dy + self.v * o.dyy,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, s: f64) -> Jet2 {
        Jet2 {
            v: self.v * s,
            dx: self.dx * s,
            dy: self.dy * s,
            dxx: self.dxx * s,
            dxy: self.dxy * s,
            dyy: self.dyy * s,
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, s: f64) -> Jet2 {
        Jet2 {
            v: self.v + s,
            ..self
        }
    }
}

/// Complex-valued jet, `z = re + i im`.
#[derive(Clone, Copy, Debug)]
pub struct CJet {
    pub re: Jet2,
    pub im: Jet2,
}

impl CJet {
    /// The chart coordinate `z = x + i y` as a complex jet.
    pub fn var(x: f64, y: f64) -> Self {
        CJet {
            re: Jet2::var_x(x),
            im: Jet2::var_y(y),
        }
    }

    pub fn constant(re: f64, im: f64) -> Self {
        CJet {
            re: Jet2::constant(re),
            im: Jet2::constant(im),
        }
    }

    pub fn conj(self) -> Self {
        CJet {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Jet2 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, s: f64) -> Self {
        CJet {
            re: self.re * s,
            im: self.im * s,
        }
    }

    pub fn powu(self, k: u32) -> Self {
        let mut acc = CJet::constant(1.0, 0.0);
        for _ in 0..k {
            acc = acc * self;
        }
        acc
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, o: CJet) -> CJet {
        CJet {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for CJet {
    type Output = CJet;
    fn sub(self, o: CJet) -> CJet {
        CJet {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, o: CJet) -> CJet {
        CJet {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    /// Sample function with easily hand-checked jets:
    /// g(x, y) = exp(x) * sin(y) + x^3 / (1 + y^2).
    fn sample(x: Jet2, y: Jet2) -> Jet2 {
        x.exp() * y.sin() + x.powi(3) / (y.powi(2) + 1.0)
    }

    #[test]
    fn jets_match_central_differences() {
        let (x0, y0) = (0.7, -0.4);
        let j = sample(Jet2::var_x(x0), Jet2::var_y(y0));
        let h = 1e-5;
        let f = |x: f64, y: f64| sample(Jet2::constant(x), Jet2::constant(y)).v;
        let fx = (f(x0 + h, y0) - f(x0 - h, y0)) / (2.0 * h);
        let fy = (f(x0, y0 + h) - f(x0, y0 - h)) / (2.0 * h);
        let fxx = (f(x0 + h, y0) - 2.0 * f(x0, y0) + f(x0 - h, y0)) / (h * h);
        let fyy = (f(x0, y0 + h) - 2.0 * f(x0, y0) + f(x0, y0 - h)) / (h * h);
        let fxy = (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h) + f(x0 - h, y0 - h))
            / (4.0 * h * h);
        assert!(close(j.dx, fx, 1e-8), "dx {} vs {}", j.dx, fx);
        assert!(close(j.dy, fy, 1e-8));
        assert!(close(j.dxx, fxx, 1e-4));
        assert!(close(j.dxy, fxy, 1e-4));
        assert!(close(j.dyy, fyy, 1e-4));
    }

    #[test]
    fn complex_power_is_holomorphic() {
        // z^3 at a generic point: Cauchy-Riemann for the jet components.
        let z = CJet::var(0.3, 1.1).powu(3);
        assert!(close(z.re.dx, z.im.dy, 1e-12));
        assert!(close(z.re.dy, -z.im.dx, 1e-12));
        // |z^3| = |z|^3
        let r2 = z.norm_sqr().v;
        assert!(close(r2, (0.3f64 * 0.3 + 1.1 * 1.1).powi(3), 1e-12));
    }

    #[test]
    fn division_and_log_round_trip() {
        let x = Jet2::var_x(1.3);
        let y = Jet2::var_y(0.2);
        let g = (x * x + y * y + 1.0).ln().exp();
        let target = x * x + y * y + 1.0;
        assert!(close(g.v, target.v, 1e-14));
        assert!(close(g.dx, target.dx, 1e-12));
        assert!(close(g.dxx, target.dxx, 1e-12));
        assert!(close(g.dxy, target.dxy, 1e-12));
    }
}
