//! First Chern number of the ground-state bundle over the `(φ, γ)` plane.
//!
//! `C₁(λ) = (i/2π) ∫₀^π dφ ∫₀^∞ dγ F_{φγ}`, with `F` normalised as
//! `(2i/π) ∫₀^π s(α) f(α) dα`. Two independent evaluations:
//!
//! - [`chern_number`]: `F` is φ-independent, so the φ integral is the factor
//!   π; the γ half-line is mapped to `β ∈ [0, π/2)` by `γ = tan β`.
//! - [`chern_discrete`]: link-variable plaquette sums on a `(φ, β)` grid of
//!   finite-`N` ground states, capped at `γ = 0` and at the `γ → ∞` limit.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::curvature_integral;
use crate::ground_state::GroundState;
use crate::model::{self, ModelParams};
use crate::oracle::wilson::principal_arg;
use crate::quadrature::{integrate_breakpoints, QuadratureConfig};

/// Direct evaluation is refused within this distance of `λ = 1`.
pub const CRITICAL_MARGIN: f64 = 1e-3;
/// Plaquette phases this close to `±π` are ambiguous.
pub const VORTEX_MARGIN: f64 = 1e-9;
/// Pair overlaps with a smaller modulus cannot be normalised.
pub const MIN_LINK_MODULUS: f64 = 1e-12;
/// Smallest accepted plaquette grid side.
pub const MIN_DISCRETE_GRID: usize = 16;
/// Smallest accepted chain length for the plaquette method.
pub const MIN_DISCRETE_SITES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChernMethod {
    Quadrature,
    DiscretePlaquette,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub nearest_integer: i64,
    pub residual: f64,
    pub method: ChernMethod,
    /// Outer quadrature nodes, or grid points.
    pub node_count: usize,
}

impl ChernResult {
    fn new(value: f64, abs_error_estimate: f64, method: ChernMethod, node_count: usize) -> Self {
        let nearest = value.round();
        Self {
            value,
            abs_error_estimate,
            nearest_integer: nearest as i64,
            residual: (value - nearest).abs(),
            method,
            node_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseLabel {
    ChernMinusOne,
    Boundary,
    ChernZero,
}

impl PhaseLabel {
    pub fn from_chern(c: i64) -> Result<Self> {
        match c {
            -1 => Ok(Self::ChernMinusOne),
            0 => Ok(Self::ChernZero),
            other => Err(Error::UnlabeledChern(other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub lambda: f64,
    /// `None` at the boundary, where nothing is evaluated.
    pub chern: Option<ChernResult>,
    pub gap_at_gamma_one: f64,
    pub label: PhaseLabel,
}

/// Nested quadrature settings for [`chern_number`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernConfig {
    /// Over β. The default absolute tolerance keeps the error on `C₁` below 1e-6.
    pub outer: QuadratureConfig,
    /// Over α, at each β node.
    pub inner: QuadratureConfig,
}

impl Default for ChernConfig {
    fn default() -> Self {
        Self {
            outer: QuadratureConfig { rel_tol: 1e-9, abs_tol: 1e-7, max_subdivisions: 2000 },
            inner: QuadratureConfig { rel_tol: 1e-11, abs_tol: 1e-14, max_subdivisions: 2000 },
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!("lambda = {lambda} must be finite and >= 0")));
    }
    if (lambda - 1.0).abs() <= CRITICAL_MARGIN {
        return Err(Error::TooCloseToCritical { lambda, margin: CRITICAL_MARGIN });
    }
    Ok(())
}

/// `∫₀^π s(α) f(α) dα` at anisotropy `gamma`; zero on the gapless `γ = 0` line.
pub fn gamma_integrand(gamma: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(curvature_integral(gamma, lambda, cfg)?.value)
}

/// Points in β where the Fermi split `α_F(γ)` has a kink or jump.
fn beta_breakpoints(lambda: f64) -> Vec<f64> {
    let mut pts = vec![0.0, FRAC_PI_2, PI / 4.0, (1.0 + lambda).sqrt().atan()];
    if lambda < 1.0 {
        pts.push((1.0 - lambda).sqrt().atan());
    }
    pts
}

/// Continuum `C₁(λ) = -(1/π) ∫₀^∞ dγ ∫₀^π s(α) f(α) dα`.
pub fn chern_number(lambda: f64, config: &ChernConfig) -> Result<ChernResult> {
    check_lambda(lambda)?;
    // the β-integrand is evaluated inside a closure that cannot return errors
    let failure = std::sync::Mutex::new(None);
    let integrand = |beta: f64| {
        let gamma = beta.tan();
        let cos = beta.cos();
        match gamma_integrand(gamma, lambda, &config.inner) {
            Ok(v) => v / (cos * cos),
            Err(e) => {
                failure.lock().expect("unpoisoned").get_or_insert(e);
                0.0
            }
        }
    };
    let q = integrate_breakpoints(integrand, &beta_breakpoints(lambda), &config.outer)?;
    if let Some(e) = failure.into_inner().expect("unpoisoned") {
        return Err(e);
    }
    Ok(ChernResult::new(-q.value / PI, q.abs_error / PI, ChernMethod::Quadrature, q.evaluations))
}

/// Log-log slope of `|∫ s f dα|` between `γ = 10³` and `10⁴`. The compactified
/// integrand `sec²β · I(tan β)` stays integrable at `β → π/2` when this is
/// near `-2` (the exact tail is `O(log γ / γ²)`).
pub fn tail_decay_exponent(lambda: f64) -> Result<f64> {
    let cfg = ChernConfig::default().inner;
    let a = gamma_integrand(1e3, lambda, &cfg)?.abs();
    let b = gamma_integrand(1e4, lambda, &cfg)?.abs();
    Ok((b / a).log10())
}

/// Grid and chain length for [`chern_discrete`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiscreteSettings {
    pub n_phi: usize,
    pub n_beta: usize,
    pub n_sites: usize,
}

impl Default for DiscreteSettings {
    fn default() -> Self {
        Self { n_phi: 64, n_beta: 64, n_sites: 1024 }
    }
}

/// Plaquette Chern number on an `n_phi × n_beta` grid with `N`-site states.
pub fn chern_discrete(lambda: f64, settings: &DiscreteSettings) -> Result<ChernResult> {
    chern_discrete_gauged(lambda, settings, |_, _, _| 0.0)
}

/// [`chern_discrete`] with every stored pair factor at grid point `(i, j)`
/// and momentum `k` multiplied by `exp(i·gauge(i, j, k))`.
pub fn chern_discrete_gauged(
    lambda: f64,
    settings: &DiscreteSettings,
    gauge: impl Fn(usize, usize, i64) -> f64 + Sync,
) -> Result<ChernResult> {
    let DiscreteSettings { n_phi, n_beta, n_sites } = *settings;
    if n_phi < MIN_DISCRETE_GRID || n_beta < MIN_DISCRETE_GRID || n_sites < MIN_DISCRETE_SITES {
        return Err(Error::InvalidParams(format!(
            "grid {n_phi}x{n_beta} with N = {n_sites}: need both sizes >= {MIN_DISCRETE_GRID} and N >= {MIN_DISCRETE_SITES}"
        )));
    }
    check_lambda(lambda)?;

    // rows j < n_beta at γ = tan(jπ/2n_beta); row n_beta is the γ → ∞ limit
    let nodes: Vec<(usize, usize)> = (0..=n_beta).flat_map(|j| (0..n_phi).map(move |i| (i, j))).collect();
    let states = nodes
        .par_iter()
        .map(|&(i, j)| {
            let phi = PI * i as f64 / n_phi as f64;
            grid_state(phi, j, n_beta, lambda, n_sites).map(|s| s.regauged(|k| gauge(i, j, k)))
        })
        .collect::<Result<Vec<_>>>()?;
    let at = |i: usize, j: usize| &states[j * n_phi + i % n_phi];

    let link = |a: &GroundState, b: &GroundState| unit_link(a, b);
    let checked = |i: usize, j: usize, z: Complex64| -> Result<f64> {
        let phase = principal_arg(z);
        if phase.abs() >= PI - VORTEX_MARGIN {
            return Err(Error::VortexOnPlaquette { i, j, phase });
        }
        Ok(phase)
    };

    let cells: Vec<(usize, usize)> = (0..n_beta).flat_map(|j| (0..n_phi).map(move |i| (i, j))).collect();
    let plaquettes = cells
        .par_iter()
        .map(|&(i, j)| {
            let u = link(at(i, j), at(i + 1, j))?
                * link(at(i + 1, j), at(i + 1, j + 1))?
                * link(at(i + 1, j + 1), at(i, j + 1))?
                * link(at(i, j + 1), at(i, j))?;
            checked(i, j, u)
        })
        .collect::<Result<Vec<_>>>()?;

    // caps close the strip: the γ = 0 loop runs against increasing φ, the
    // γ → ∞ loop along it; both are reported with column index n_phi
    let mut bottom = Complex64::new(1.0, 0.0);
    let mut top = Complex64::new(1.0, 0.0);
    for i in 0..n_phi {
        bottom *= link(at(i + 1, 0), at(i, 0))?;
        top *= link(at(i, n_beta), at(i + 1, n_beta))?;
    }
    let caps = [checked(n_phi, 0, bottom)?, checked(n_phi, n_beta, top)?];

    // fixed summation order for reproducibility
    let total: f64 = plaquettes.iter().sum::<f64>() + caps.iter().sum::<f64>();
    let value = -total / (2.0 * PI);
    let nearest = value.round();
    Ok(ChernResult::new(value, (value - nearest).abs(), ChernMethod::DiscretePlaquette, nodes.len()))
}

/// `⟨a|b⟩/|⟨a|b⟩|`, accumulated as a product of per-pair unit phases: the
/// many-body overlap itself can be far below `f64` range at large `N`.
fn unit_link(a: &GroundState, b: &GroundState) -> Result<Complex64> {
    if a.unpaired.iter().zip(&b.unpaired).any(|(x, y)| x.occupied != y.occupied) {
        return Err(Error::ZeroOverlap { modulus: 0.0 });
    }
    let mut z = Complex64::new(1.0, 0.0);
    for (x, y) in a.pairs.iter().zip(&b.pairs) {
        let w = x.amplitudes.inner(&y.amplitudes);
        if w.norm() < MIN_LINK_MODULUS {
            return Err(Error::ZeroOverlap { modulus: w.norm() });
        }
        z *= w / w.norm();
    }
    Ok(z)
}

fn grid_state(phi: f64, j: usize, n_beta: usize, lambda: f64, n_sites: usize) -> Result<GroundState> {
    if j == n_beta {
        // γ → ∞: every angle tends to π/2 and k_T to N/4
        let params = ModelParams { phi, gamma: f64::INFINITY, lambda, n_sites: Some(n_sites) };
        return GroundState::with_cutoff(&params, n_sites, n_sites / 4, |_| Ok(FRAC_PI_2));
    }
    let gamma = (FRAC_PI_2 * j as f64 / n_beta as f64).tan();
    let params = ModelParams::new(phi, gamma, lambda)?;
    GroundState::on_lattice(&params, n_sites).map_err(|e| match e {
        Error::GaplessMode { .. } => Error::GaplessOnGrid { phi, gamma },
        other => other,
    })
}

/// Quadrature label of `λ`; [`PhaseLabel::Boundary`] within the critical margin.
pub fn classify_phase(lambda: f64) -> Result<PhasePoint> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParams(format!("lambda = {lambda} must be finite and >= 0")));
    }
    let gap_at_gamma_one = model::gap(1.0, lambda);
    if (lambda - 1.0).abs() <= CRITICAL_MARGIN {
        return Ok(PhasePoint { lambda, chern: None, gap_at_gamma_one, label: PhaseLabel::Boundary });
    }
    let chern = chern_number(lambda, &ChernConfig::default())?;
    let label = PhaseLabel::from_chern(chern.nearest_integer)?;
    Ok(PhasePoint { lambda, chern: Some(chern), gap_at_gamma_one, label })
}

/// Bracket `[lo, hi]` of a jump in the discrete Chern number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionInterval {
    pub lo: f64,
    pub hi: f64,
}

impl TransitionInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

/// [`detect_transition_with`] on the default 64×64, `N = 1024` grid.
pub fn detect_transition(lambda_lo: f64, lambda_hi: f64, tol: f64) -> Result<TransitionInterval> {
    detect_transition_with(lambda_lo, lambda_hi, tol, &DiscreteSettings::default())
}

/// Bisects on the integer [`chern_discrete`] label until the bracket is at
/// most `tol` wide. The endpoints must carry different quadrature labels.
pub fn detect_transition_with(
    lambda_lo: f64,
    lambda_hi: f64,
    tol: f64,
    settings: &DiscreteSettings,
) -> Result<TransitionInterval> {
    // negated so that NaN bounds are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lambda_lo < lambda_hi) || !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("need lo < hi and tol > 0, got [{lambda_lo}, {lambda_hi}], {tol}")));
    }
    let (a, b) = (classify_phase(lambda_lo)?, classify_phase(lambda_hi)?);
    if a.label == PhaseLabel::Boundary || b.label == PhaseLabel::Boundary {
        return Err(Error::InvalidParams("transition endpoints must not be boundary points".into()));
    }
    if a.label == b.label {
        return Err(Error::NoJumpFound { lo: lambda_lo, hi: lambda_hi });
    }
    let (mut lo, mut hi) = (lambda_lo, lambda_hi);
    let c_lo = chern_discrete(lo, settings)?.nearest_integer;
    if chern_discrete(hi, settings)?.nearest_integer == c_lo {
        return Err(Error::NoJumpFound { lo, hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if chern_discrete(mid, settings)?.nearest_integer == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(TransitionInterval { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_limit_reproduces_minus_one_at_zero_field() {
        // the only point where the quadrature value is known in closed form
        let c = chern_number(0.0, &ChernConfig::default()).unwrap();
        assert!((c.value + 1.0).abs() < 1e-6, "{c:?}");
        assert!(c.abs_error_estimate < 1e-6);
    }

    #[test]
    fn quadrature_matches_independent_values() {
        // adaptive nested quadrature evaluated separately in double precision
        for (l, v) in [(0.5, -0.772), (1.5, -0.241), (3.0, -0.038)] {
            let c = chern_number(l, &ChernConfig::default()).unwrap();
            assert!((c.value - v).abs() < 2e-3, "{l}: {}", c.value);
        }
    }

    #[test]
    fn refuses_critical_field() {
        let cfg = ChernConfig::default();
        assert!(matches!(chern_number(1.0005, &cfg), Err(Error::TooCloseToCritical { .. })));
        assert!(matches!(chern_number(-0.1, &cfg), Err(Error::InvalidParams(_))));
        assert!(chern_number(1.002, &cfg).is_ok());
    }

    #[test]
    fn tail_decays_like_inverse_square_up_to_log() {
        for l in [0.3, 2.0] {
            let slope = tail_decay_exponent(l).unwrap();
            // O(log γ / γ²): slightly shallower than -2
            assert!(slope < -1.75 && slope > -2.05, "{l}: {slope}");
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_phase(1.0).unwrap().label, PhaseLabel::Boundary);
        assert!(classify_phase(1.0).unwrap().chern.is_none());
        assert_eq!(classify_phase(0.3).unwrap().label, PhaseLabel::ChernMinusOne);
        assert_eq!(classify_phase(3.0).unwrap().label, PhaseLabel::ChernZero);
        assert_eq!(classify_phase(0.3).unwrap().gap_at_gamma_one, 0.7);
    }

    #[test]
    fn same_phase_has_no_jump() {
        assert!(matches!(detect_transition(0.1, 0.9, 1e-3), Err(Error::NoJumpFound { .. })));
        assert!(matches!(detect_transition(1.1, 2.0, 1e-3), Err(Error::NoJumpFound { .. })));
    }

    #[test]
    fn discrete_input_validation() {
        let small = DiscreteSettings { n_phi: 8, n_beta: 64, n_sites: 1024 };
        assert!(matches!(chern_discrete(0.5, &small), Err(Error::InvalidParams(_))));
        let short = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 128 };
        assert!(matches!(chern_discrete(0.5, &short), Err(Error::InvalidParams(_))));
        let ok = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 256 };
        assert!(matches!(chern_discrete(0.9995, &ok), Err(Error::TooCloseToCritical { .. })));
    }

    #[test]
    fn discrete_reports_gapless_grid_rows() {
        // λ = 0: the γ = 0 row has an exactly gapless mode at k = N/4
        let s = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 256 };
        assert!(matches!(chern_discrete(0.0, &s), Err(Error::GaplessOnGrid { gamma, .. }) if gamma == 0.0));
    }

    #[test]
    fn top_cap_is_ambiguous_for_odd_pair_count() {
        // N = 256 has 127 pairs; the γ → ∞ loop picks up π per pair
        let s = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 256 };
        let r = chern_discrete(2.0, &s);
        assert!(matches!(r, Err(Error::VortexOnPlaquette { i: 16, j: 16, .. })), "{r:?}");
    }

    #[test]
    fn discrete_value_is_gauge_invariant() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        // N = 258 (128 pairs) closes both caps unambiguously
        let s = DiscreteSettings { n_phi: 16, n_beta: 16, n_sites: 258 };
        let plain = chern_discrete(2.0, &s).unwrap();
        assert!(plain.residual < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phases: Vec<f64> = (0..17 * 16 * 260).map(|_| rng.gen_range(-PI..PI)).collect();
        let gauged = chern_discrete_gauged(2.0, &s, |i, j, k| phases[(j * 16 + i) * 260 + k as usize]).unwrap();
        assert_eq!(plain.nearest_integer, gauged.nearest_integer);
        assert!((plain.value - gauged.value).abs() < 1e-9);
    }
}
