//! The four subcommands. Rows are computed in parallel and kept in input order.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use xychern::geometry::{self, Coordinate, DEFAULT_STEP};
use xychern::model::{self, ModelParams};
use xychern::oracle::{self, spectral, LoopBackend};
use xychern::topology::{self, ChernConfig, DiscreteSettings, CRITICAL_MARGIN, MIN_DISCRETE_GRID, MIN_DISCRETE_SITES};
use xychern::Error;

use crate::args::{ScanConfig, VerifyArgs};
use crate::table::{number, Cell, Table};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    VerificationFailed = 1,
    ConfigError = 2,
    NonConvergence = 3,
}

/// A finished command: table, config echo, summary and exit status.
pub struct Report {
    pub table: Table,
    pub config: Value,
    pub summary: Value,
    pub exit: Exit,
}

/// Short machine-readable tag for a library error.
fn kind(e: &Error) -> &'static str {
    match e {
        Error::StencilCrossesCritical { .. } => "stencil_crosses_critical",
        Error::BandMismatch { .. } => "band_mismatch",
        Error::RichardsonMismatch { .. } => "richardson_mismatch",
        Error::VortexOnPlaquette { .. } => "vortex_on_plaquette",
        Error::GaplessOnGrid { .. } => "gapless_on_grid",
        Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
        Error::DegenerateGroundState { .. } => "degenerate_ground_state",
        Error::CriticalPoint { .. } => "critical_point",
        Error::ZeroOverlap { .. } => "zero_overlap",
        _ => "error",
    }
}

fn lambda_axis(cfg: &ScanConfig) -> Vec<f64> {
    model::linspace(cfg.lambda_min, cfg.lambda_max, cfg.steps)
}

fn near_critical(lambda: f64) -> bool {
    (lambda - 1.0).abs() <= CRITICAL_MARGIN
}

pub fn validate_discrete(cfg: &ScanConfig) -> Result<(), String> {
    if cfg.grid.n_phi < MIN_DISCRETE_GRID || cfg.grid.n_beta < MIN_DISCRETE_GRID {
        return Err(format!("--grid sides must be at least {MIN_DISCRETE_GRID}"));
    }
    if cfg.n_sites < MIN_DISCRETE_SITES {
        return Err(format!("--n-sites must be at least {MIN_DISCRETE_SITES} for the plaquette method"));
    }
    Ok(())
}

pub fn scan_chern(cfg: &ScanConfig) -> Report {
    let mut chern_cfg = ChernConfig::default();
    chern_cfg.outer.rel_tol = cfg.tol;
    let settings = DiscreteSettings { n_phi: cfg.grid.n_phi, n_beta: cfg.grid.n_beta, n_sites: cfg.n_sites };

    let (skipped, lambdas): (Vec<f64>, Vec<f64>) = lambda_axis(cfg).into_iter().partition(|&l| near_critical(l));
    let results: Vec<_> = lambdas
        .par_iter()
        .map(|&l| (l, topology::chern_number(l, &chern_cfg), topology::chern_discrete(l, &settings)))
        .collect();

    let mut table = Table::new(vec!["lambda", "chern_quadrature", "chern_error", "chern_discrete", "label", "status"]);
    let mut failures = Vec::new();
    let mut quadrature_failed = false;
    for (l, quad, disc) in results {
        let mut status = Vec::new();
        let (value, error, label) = match &quad {
            Ok(c) => (Some(c.value), Some(c.abs_error_estimate), Cell::Int(c.nearest_integer)),
            Err(e) => {
                quadrature_failed = true;
                status.push(format!("quadrature_{}", kind(e)));
                failures.push(json!({ "lambda": number(l), "stage": "quadrature", "error": e.to_string() }));
                (None, None, Cell::Text(String::new()))
            }
        };
        let discrete = match &disc {
            Ok(c) => Cell::Int(c.nearest_integer),
            Err(e) => {
                status.push(format!("discrete_{}", kind(e)));
                failures.push(json!({ "lambda": number(l), "stage": "discrete", "error": e.to_string() }));
                Cell::Text(String::new())
            }
        };
        let status = if status.is_empty() { "ok".to_owned() } else { status.join(";") };
        table.push(vec![l.into(), value.into(), error.into(), discrete, label, status.into()]);
    }

    let summary = json!({
        "rows": table.rows.len(),
        "skipped_near_critical": skipped.iter().map(|&l| number(l)).collect::<Vec<_>>(),
        "critical_margin": CRITICAL_MARGIN,
        "failures": failures,
    });
    Report {
        table,
        config: json!({ "command": "scan-chern", "scan": cfg }),
        summary,
        exit: if quadrature_failed { Exit::NonConvergence } else { Exit::Ok },
    }
}

pub fn gap_map(cfg: &ScanConfig) -> Report {
    let gammas = model::linspace(0.0, cfg.gamma, cfg.steps);
    let lambdas = lambda_axis(cfg);
    let mut table = Table::new(vec!["gamma", "lambda", "gap", "zero"]);
    let (mut zeros, mut mismatches) = (0usize, 0usize);
    for s in model::gap_grid(&gammas, &lambdas) {
        let zero = s.gap <= 1e-12;
        let critical = s.lambda == 1.0 || (s.gamma == 0.0 && s.lambda <= 1.0);
        zeros += zero as usize;
        mismatches += (zero != critical) as usize;
        table.push(vec![s.gamma.into(), s.lambda.into(), s.gap.into(), zero.into()]);
    }
    let summary = json!({
        "points": table.rows.len(),
        "zero_points": zeros,
        "zero_threshold": 1e-12,
        "zero_set_matches_critical_lines": mismatches == 0,
    });
    Report { table, config: json!({ "command": "gap-map", "scan": cfg }), summary, exit: Exit::Ok }
}

/// Strictly monotone in the given direction.
fn strictly(values: &[f64], increasing: bool) -> bool {
    values.windows(2).all(|w| if increasing { w[0] < w[1] } else { w[0] > w[1] })
}

pub fn metric_scan(cfg: &ScanConfig) -> Report {
    let lambdas = lambda_axis(cfg);
    let results: Vec<_> = lambdas
        .par_iter()
        .map(|&l| {
            if near_critical(l) {
                return None;
            }
            Some(
                ModelParams::new(0.0, cfg.gamma, l)
                    .and_then(|p| geometry::qgt_finite_diff(&p, cfg.n_sites, DEFAULT_STEP)),
            )
        })
        .collect();

    let mut table = Table::new(vec![
        "lambda",
        "g_lambda_lambda",
        "g_gamma_gamma",
        "g_phi_phi",
        "curvature_phi_gamma",
        "hermiticity_defect",
        "status",
    ]);
    let (mut below, mut above) = (Vec::new(), Vec::new());
    for (&l, r) in lambdas.iter().zip(results) {
        match r {
            None => table.push(vec![
                l.into(),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                "skipped_critical".into(),
            ]),
            Some(Err(e)) => table.push(vec![
                l.into(),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                Cell::Num(None),
                kind(&e).into(),
            ]),
            Some(Ok(g)) => {
                let m = g.metric();
                let g_ll = m[2][2];
                if l < 1.0 {
                    below.push(g_ll)
                } else {
                    above.push(g_ll)
                }
                table.push(vec![
                    l.into(),
                    g_ll.into(),
                    m[1][1].into(),
                    m[0][0].into(),
                    (-2.0 * g.get(Coordinate::Phi, Coordinate::Gamma).im).into(),
                    g.hermiticity_defect().into(),
                    "ok".into(),
                ]);
            }
        }
    }
    let marked = table.rows.iter().filter(|r| r[6] != Cell::Text("ok".into())).count();
    let summary = json!({
        "rows": table.rows.len(),
        "marked_rows": marked,
        "g_lambda_lambda_increasing_below_critical": strictly(&below, true),
        "g_lambda_lambda_decreasing_above_critical": strictly(&above, false),
    });
    Report { table, config: json!({ "command": "metric-scan", "scan": cfg }), summary, exit: Exit::Ok }
}

pub const ENERGY_TOLERANCE: f64 = 1e-10;
pub const QGT_TOLERANCE: f64 = 1e-6;
/// Relative tolerance of the small-loop phase against curvature × area.
pub const LOOP_TOLERANCE: f64 = 1e-3;
const LOOP_SIDE: f64 = 0.02;
const LOOP_POINTS_PER_EDGE: usize = 20;

/// Counter-clockwise square in the (φ, γ) plane starting at `p`.
fn square(p: &ModelParams) -> xychern::Result<Vec<ModelParams>> {
    let m = LOOP_POINTS_PER_EDGE;
    let t = |i: usize| LOOP_SIDE * i as f64 / m as f64;
    let (phi, gamma, l) = (p.phi, p.gamma, p.lambda);
    (0..m)
        .map(|i| (phi + t(i), gamma))
        .chain((0..m).map(|i| (phi + LOOP_SIDE, gamma + t(i))))
        .chain((0..m).map(|i| (phi + LOOP_SIDE - t(i), gamma + LOOP_SIDE)))
        .chain((0..m).map(|i| (phi, gamma + LOOP_SIDE - t(i))))
        .map(|(a, b)| ModelParams::new(a, b, l))
        .collect()
}

struct SampleCheck {
    energy: Result<f64, String>,
    qgt: Option<Result<f64, String>>,
    /// `(absolute, relative)` deviation, or the refusal tag.
    wilson: Result<(f64, f64), String>,
}

fn check_sample(p: &ModelParams, n: usize) -> SampleCheck {
    let energy = (|| {
        let ed = oracle::ed_ground(p, n)?.ground_energy();
        let ff = oracle::free_fermion_parity_spectrum(p, n)?.ground_energy;
        Ok::<_, Error>((ed - ff).abs())
    })()
    .map_err(|e| kind(&e).to_owned());

    let qgt = (n <= spectral::MAX_SPECTRAL_SITES).then(|| {
        let a = spectral::spectral_sum(p, n)?;
        let b = spectral::ed_qgt_finite_diff(p, n, 1e-4)?;
        Ok::<_, Error>(a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    });
    let qgt = qgt.map(|r| r.map_err(|e| kind(&e).to_owned()));

    let wilson = (|| {
        let phase = oracle::wilson_loop_berry_phase(&square(p)?, n, LoopBackend::FastPath)?;
        let centre = ModelParams::new(p.phi + LOOP_SIDE / 2.0, p.gamma + LOOP_SIDE / 2.0, p.lambda)?;
        let f = geometry::qgt_finite_diff(&centre, n, 1e-4)?.curvature(Coordinate::Phi, Coordinate::Gamma);
        let expected = f.im * LOOP_SIDE * LOOP_SIDE;
        let dev = (phase - expected).abs();
        Ok::<_, Error>((dev, dev / expected.abs().max(1e-300)))
    })()
    .map_err(|e| kind(&e).to_owned());

    SampleCheck { energy, qgt, wilson }
}

/// Draws `(φ, γ, λ)` away from the critical field so every check is defined.
fn draw(rng: &mut ChaCha8Rng) -> ModelParams {
    loop {
        let (phi, gamma, lambda) = (rng.gen_range(0.0..PI), rng.gen_range(0.2..1.5), rng.gen_range(0.0..2.0f64));
        if (lambda - 1.0).abs() >= 0.05 {
            return ModelParams::new(phi, gamma, lambda).expect("drawn inside the parameter domain");
        }
    }
}

pub fn validate_verify(args: &VerifyArgs) -> Result<(), String> {
    let n = args.n_sites;
    if !n.is_multiple_of(2) || !(4..=oracle::spin::MAX_ED_SITES).contains(&n) {
        return Err(format!("--n-sites must be even and in [4, {}], got {n}", oracle::spin::MAX_ED_SITES));
    }
    if args.samples == 0 {
        return Err("--samples must be at least 1".into());
    }
    Ok(())
}

pub fn oracle_verify(args: &VerifyArgs) -> Report {
    let n = args.n_sites;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let samples: Vec<ModelParams> = (0..args.samples).map(|_| draw(&mut rng)).collect();
    let checks: Vec<SampleCheck> = samples.par_iter().map(|p| check_sample(p, n)).collect();

    let mut table = Table::new(vec![
        "sample",
        "phi",
        "gamma",
        "lambda",
        "energy_deviation",
        "qgt_deviation",
        "wilson_deviation",
        "wilson_relative",
        "pass",
        "status",
    ]);
    let (mut max_e, mut max_q, mut max_w) = (0.0f64, 0.0f64, 0.0f64);
    let (mut failed, mut refused) = (0usize, 0usize);
    for (i, (p, c)) in samples.iter().zip(&checks).enumerate() {
        let mut notes = Vec::new();
        let mut pass = true;
        let energy = match &c.energy {
            Ok(d) => {
                max_e = max_e.max(*d);
                pass &= *d < ENERGY_TOLERANCE;
                Some(*d)
            }
            Err(k) => {
                pass = false;
                notes.push(format!("energy_{k}"));
                None
            }
        };
        let qgt = match &c.qgt {
            None => None,
            Some(Ok(d)) => {
                max_q = max_q.max(*d);
                pass &= *d < QGT_TOLERANCE;
                Some(*d)
            }
            // an ED degeneracy is a refusal of the oracle, not a disagreement
            Some(Err(k)) if k == "degenerate_ground_state" => {
                refused += 1;
                notes.push(format!("qgt_{k}"));
                None
            }
            Some(Err(k)) => {
                pass = false;
                notes.push(format!("qgt_{k}"));
                None
            }
        };
        let (w_abs, w_rel) = match &c.wilson {
            Ok((a, r)) => {
                max_w = max_w.max(*r);
                pass &= *r < LOOP_TOLERANCE;
                (Some(*a), Some(*r))
            }
            // a Fermi-level crossing inside the loop has no smooth curvature to compare against
            Err(k) if k == "band_mismatch" => {
                refused += 1;
                notes.push(format!("wilson_{k}"));
                (None, None)
            }
            Err(k) => {
                pass = false;
                notes.push(format!("wilson_{k}"));
                (None, None)
            }
        };
        failed += !pass as usize;
        let status = if notes.is_empty() { "ok".to_owned() } else { notes.join(";") };
        table.push(vec![
            (i as i64).into(),
            p.phi.into(),
            p.gamma.into(),
            p.lambda.into(),
            energy.into(),
            qgt.into(),
            w_abs.into(),
            w_rel.into(),
            pass.into(),
            status.into(),
        ]);
    }
    let summary = json!({
        "samples": args.samples,
        "failed": failed,
        "refused_checks": refused,
        "max_energy_deviation": number(max_e),
        "max_qgt_deviation": if n <= spectral::MAX_SPECTRAL_SITES { number(max_q) } else { Value::Null },
        "max_wilson_relative_deviation": number(max_w),
        "tolerances": { "energy": ENERGY_TOLERANCE, "qgt": QGT_TOLERANCE, "wilson_relative": LOOP_TOLERANCE },
        "pass": failed == 0,
    });
    Report {
        table,
        config: json!({ "command": "oracle-verify", "n_sites": n, "samples": args.samples, "seed": args.seed }),
        summary,
        exit: if failed == 0 { Exit::Ok } else { Exit::VerificationFailed },
    }
}
