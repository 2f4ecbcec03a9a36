//! Command-line surface and validation.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "xychern", version, about = "Topological phase diagram of the rotated XY chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chern number by quadrature and on a plaquette grid, over a λ range.
    ScanChern(ScanArgs),
    /// Spectral gap over a (γ, λ) grid; γ runs from 0 to --gamma.
    GapMap(ScanArgs),
    /// Metric components and curvature versus λ at fixed γ.
    MetricScan(ScanArgs),
    /// Exact diagonalization against the fast paths on seeded random samples.
    OracleVerify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub lambda_max: f64,
    /// Grid points per axis, endpoints included.
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    /// Fixed anisotropy (metric-scan, default 1) or upper γ bound (gap-map, default 2).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Chain length (scan-chern default 1024, metric-scan default 2048).
    #[arg(long)]
    pub n_sites: Option<usize>,
    /// Relative tolerance of the outer Chern quadrature.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Plaquette grid `N_PHIxN_BETA` for the discrete Chern number.
    #[arg(long, default_value = "64x64")]
    pub grid: Grid,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub n_sites: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub n_phi: usize,
    pub n_beta: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size {t:?}: {e}"));
        Ok(Grid { n_phi: parse(a)?, n_beta: parse(b)? })
    }
}

/// Validated scan settings.
#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub steps: usize,
    pub gamma: f64,
    pub n_sites: usize,
    pub tol: f64,
    pub grid: Grid,
}

impl ScanArgs {
    pub fn validate(&self, default_gamma: f64, default_sites: usize) -> Result<ScanConfig, String> {
        let cfg = ScanConfig {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            steps: self.steps,
            gamma: self.gamma.unwrap_or(default_gamma),
            n_sites: self.n_sites.unwrap_or(default_sites),
            tol: self.tol,
            grid: self.grid,
        };
        if !(cfg.lambda_min.is_finite() && cfg.lambda_max.is_finite() && cfg.lambda_min >= 0.0) {
            return Err("lambda bounds must be finite and non-negative".into());
        }
        if cfg.lambda_min >= cfg.lambda_max {
            return Err(format!("--lambda-min {} must be below --lambda-max {}", cfg.lambda_min, cfg.lambda_max));
        }
        if cfg.steps < 2 {
            return Err(format!("--steps must be at least 2, got {}", cfg.steps));
        }
        if !(cfg.gamma.is_finite() && cfg.gamma >= 0.0) {
            return Err(format!("--gamma must be finite and non-negative, got {}", cfg.gamma));
        }
        if cfg.n_sites < 4 || !cfg.n_sites.is_multiple_of(2) {
            return Err(format!("--n-sites must be even and at least 4, got {}", cfg.n_sites));
        }
        if !(1e-12..=1e-3).contains(&cfg.tol) {
            return Err(format!("--tol must lie in [1e-12, 1e-3], got {}", cfg.tol));
        }
        if cfg.grid.n_phi < 2 || cfg.grid.n_beta < 2 {
            return Err("--grid sizes must be at least 2".into());
        }
        Ok(cfg)
    }
}

/// Reads the worker-count override; `None` leaves rayon's default.
pub fn worker_override(var: Option<String>) -> Result<Option<usize>, String> {
    match var {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("XYCHERN_WORKERS must be a positive integer, got {v:?}")),
        },
    }
}
