//! Run configuration: CLI flags layered over the optional JSON config
//! file (flags win, the `CONFSURF_OUT` env var sits between them for
//! the output directory).

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub surface: Option<String>,
    pub grid: Option<usize>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub out: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub surface: Option<String>,
    pub grid: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub threads: usize,
}

pub struct Overrides {
    pub surface: Option<String>,
    pub grid: Option<usize>,
    pub tol: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub config: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(ov: Overrides) -> anyhow::Result<RunConfig> {
        let file: FileConfig = match &ov.config {
            None => FileConfig::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?
            }
        };
        let mut tolerances = file.tolerances.unwrap_or_default();
        for spec in &ov.tol {
            let Some((name, value)) = spec.split_once('=') else {
                bail!("--tol expects name=value, got '{spec}'");
            };
            let value: f64 = value
                .parse()
                .with_context(|| format!("tolerance '{name}' is not a number"))?;
            tolerances.insert(name.trim().to_string(), value);
        }
        for (name, value) in &tolerances {
            if !(*value > 0.0) {
                bail!("tolerance '{name}' must be positive, got {value}");
            }
        }
        let out = ov
            .out
            .or_else(|| std::env::var("CONFSURF_OUT").ok().map(PathBuf::from))
            .or(file.out.map(PathBuf::from));
        let grid = ov.grid.or(file.grid).unwrap_or(128);
        if grid < 16 {
            bail!("grid resolution must be at least 16, got {grid}");
        }
        Ok(RunConfig {
            surface: ov.surface.or(file.surface),
            grid,
            tolerances,
            out,
            seed: ov.seed.or(file.seed).unwrap_or(0),
            threads: ov.threads.or(file.threads).unwrap_or(0),
        })
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn surface_spec(&self) -> anyhow::Result<confsurf::catalog::SurfaceSpec> {
        let Some(s) = &self.surface else {
            bail!("this experiment needs --surface");
        };
        Ok(confsurf::catalog::SurfaceSpec::parse(s)?)
    }
}
