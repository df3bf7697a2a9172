//! Sampled immersions: chart grids carrying position and derivative data.

use serde::Serialize;

use crate::fd;
use crate::grid::ParamGrid;

/// Small dense vector helpers for points of `R^n` stored in flat slices.
pub mod vecn {
    pub fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn norm_sq(a: &[f64]) -> f64 {
        dot(a, a)
    }

    pub fn norm(a: &[f64]) -> f64 {
        norm_sq(a).sqrt()
    }

    pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }
}

/// Whether derivative fields are closed-form or rebuilt by stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// One conformal chart of a surface, sampled on a [`ParamGrid`].
///
/// `f` and the derivative fields are node-major: component `k` of node
/// `i` lives at `i * n + k`.
#[derive(Clone, Debug)]
pub struct SampledImmersion {
    pub grid: ParamGrid,
    /// Ambient dimension (≥ 3).
    pub n: usize,
    pub f: Vec<f64>,
    /// First derivatives (∂₁f, ∂₂f).
    pub df: [Vec<f64>; 2],
    /// Second derivatives (∂²₁₁f, ∂²₁₂f, ∂²₂₂f).
    pub d2f: [Vec<f64>; 3],
    pub source: DerivativeSource,
    /// Partition-of-unity weight when this chart is one of several
    /// covering a closed surface; `None` means weight 1 everywhere.
    pub chart_weight: Option<Vec<f64>>,
}

impl SampledImmersion {
    /// Builds an immersion from positions only, deriving `df`/`d2f`
    /// with grid stencils.
    pub fn from_positions(grid: ParamGrid, n: usize, f: Vec<f64>) -> SampledImmersion {
        let mut imm = SampledImmersion {
            grid,
            n,
            f,
            df: [Vec::new(), Vec::new()],
            d2f: [Vec::new(), Vec::new(), Vec::new()],
            source: DerivativeSource::FiniteDifference,
            chart_weight: None,
        };
        imm.rebuild_derivatives();
        imm
    }

    /// Recomputes `df` and `d2f` from `f` by finite differences
    /// (periodic wrap on torus directions) and marks the source.
    pub fn rebuild_derivatives(&mut self) {
        let nn = self.grid.node_count();
        let n = self.n;
        let mut d1 = vec![0.0; nn * n];
        let mut d2 = vec![0.0; nn * n];
        let mut comp = vec![0.0; nn];
        for k in 0..n {
            for i in 0..nn {
                comp[i] = self.f[i * n + k];
            }
            let (fx, fy) = fd::gradient(&self.grid, &comp);
            for i in 0..nn {
                d1[i * n + k] = fx[i];
                d2[i * n + k] = fy[i];
            }
        }
        // second derivatives from the first-derivative fields
        let mut d11 = vec![0.0; nn * n];
        let mut d12 = vec![0.0; nn * n];
        let mut d22 = vec![0.0; nn * n];
        for k in 0..n {
            for i in 0..nn {
                comp[i] = d1[i * n + k];
            }
            let (fxx, fxy) = fd::gradient(&self.grid, &comp);
            for i in 0..nn {
                comp[i] = d2[i * n + k];
            }
            let (fyx, fyy) = fd::gradient(&self.grid, &comp);
            for i in 0..nn {
                d11[i * n + k] = fxx[i];
                d12[i * n + k] = 0.5 * (fxy[i] + fyx[i]);
                d22[i * n + k] = fyy[i];
            }
        }
        self.df = [d1, d2];
        self.d2f = [d11, d12, d22];
        self.source = DerivativeSource::FiniteDifference;
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    /// Position of node `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.f[i * self.n..(i + 1) * self.n]
    }

    /// Partition-of-unity weight of node `i`.
    pub fn pou(&self, i: usize) -> f64 {
        self.chart_weight.as_ref().map_or(1.0, |w| w[i])
    }

    /// Conformality residual: max over nodes of
    /// `(|g11 − g22| + 2 |g12|) / (g11 + g22)`; 0 means exactly conformal.
    pub fn conformality_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..self.node_count() {
            let t1 = &self.df[0][i * n..(i + 1) * n];
            let t2 = &self.df[1][i * n..(i + 1) * n];
            let g11 = vecn::norm_sq(t1);
            let g22 = vecn::norm_sq(t2);
            let g12 = vecn::dot(t1, t2);
            worst = worst.max(((g11 - g22).abs() + 2.0 * g12.abs()) / (g11 + g22));
        }
        worst
    }
}

/// A surface assembled from one or more charts. Integral quantities sum
/// chart contributions through each chart's partition-of-unity weights.
#[derive(Clone, Debug)]
pub struct Surface {
    pub name: String,
    pub charts: Vec<SampledImmersion>,
    pub euler_char: Option<i32>,
    pub closed: bool,
}

impl Surface {
    pub fn single(name: impl Into<String>, chart: SampledImmersion) -> Surface {
        Surface {
            name: name.into(),
            euler_char: chart.grid.euler_char,
            closed: chart.grid.euler_char.is_some(),
            charts: vec![chart],
        }
    }

    /// Worst conformality residual across charts.
    pub fn conformality_residual(&self) -> f64 {
        self.charts
            .iter()
            .map(|c| c.conformality_residual())
            .fold(0.0, f64::max)
    }
}
