//! Closed-form single-mode quantities of the rotated XY chain.
//!
//! The chain Hamiltonian is
//!
//! ```text
//! H(φ, γ, λ) = R(φ) H(γ, λ) R†(φ),
//! H(γ, λ)    = -1/2 Σ_j [ (1+γ)/2 σˣ_j σˣ_{j+1} + (1-γ)/2 σʸ_j σʸ_{j+1} + λ σᶻ_j ],
//! R(φ)       = Π_j exp(i φ σᶻ_j / 2).
//! ```
//!
//! After Jordan-Wigner, Fourier and Bogoliubov transforms each momentum
//! α = 2πk/N carries a quasiparticle of energy
//! `|Λ(α)| = sqrt((cos α - λ)² + γ² sin² α)` at Bogoliubov angle θ(α) with
//! `|Λ| cos θ = λ - cos α` and `|Λ| sin θ = γ sin α`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energies below this are treated as a closed gap.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// Absorbs round-off in `floor(N/2π · arccos r)` when the product is an exact integer.
const CUTOFF_SLACK: f64 = 1e-9;

/// A point `(φ, γ, λ)` on the parameter manifold, optionally with a chain length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub phi: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub n_sites: Option<usize>,
}

impl ModelParams {
    /// Validated point in the thermodynamic limit. `phi` must already lie in `[0, π)`.
    pub fn new(phi: f64, gamma: f64, lambda: f64) -> Result<Self> {
        if !(phi.is_finite() && gamma.is_finite() && lambda.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(0.0..PI).contains(&phi) {
            return Err(Error::InvalidParams(format!("phi = {phi} outside [0, pi)")));
        }
        if gamma < 0.0 || lambda < 0.0 {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma}, lambda = {lambda}: only the gamma, lambda >= 0 quadrant is supported"
            )));
        }
        Ok(Self { phi, gamma, lambda, n_sites: None })
    }

    /// Same as [`ModelParams::new`] but maps `phi` into `[0, π)` first; the
    /// Hamiltonian is π-periodic in φ.
    pub fn wrapped(phi: f64, gamma: f64, lambda: f64) -> Result<Self> {
        Self::new(wrap_phi(phi), gamma, lambda)
    }

    pub fn with_sites(mut self, n: usize) -> Result<Self> {
        check_size(n)?;
        self.n_sites = Some(n);
        Ok(self)
    }
}

/// Reduce an angle modulo π into `[0, π)`.
pub fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(PI);
    if w >= PI {
        0.0
    } else {
        w
    }
}

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        Err(Error::BadSize(n))
    } else {
        Ok(())
    }
}

/// Particle/hole role of a momentum pair in the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Band {
    Particle,
    Hole,
}

impl Band {
    pub fn flipped(self) -> Self {
        match self {
            Band::Particle => Band::Hole,
            Band::Hole => Band::Particle,
        }
    }

    /// +1 for particles, -1 for holes.
    pub fn sign(self) -> f64 {
        match self {
            Band::Particle => 1.0,
            Band::Hole => -1.0,
        }
    }
}

/// One momentum sector of the diagonalized chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: i64,
    pub alpha: f64,
    pub energy: f64,
    pub theta: f64,
    pub band: Band,
}

impl Mode {
    pub fn new(k: i64, alpha: f64, gamma: f64, lambda: f64, band: Band) -> Result<Self> {
        Ok(Self {
            k,
            alpha,
            energy: dispersion(alpha, gamma, lambda),
            theta: bogoliubov_angle(alpha, gamma, lambda)?,
            band,
        })
    }
}

/// Quasiparticle energy `|Λ(α)|`.
pub fn dispersion(alpha: f64, gamma: f64, lambda: f64) -> f64 {
    (alpha.cos() - lambda).hypot(gamma * alpha.sin())
}

/// Bogoliubov angle `θ = atan2(γ sin α, λ - cos α)`, in `(-π, π]`.
pub fn bogoliubov_angle(alpha: f64, gamma: f64, lambda: f64) -> Result<f64> {
    let y = gamma * alpha.sin();
    let x = lambda - alpha.cos();
    if x.hypot(y) < GAP_TOLERANCE {
        return Err(Error::GaplessMode { alpha });
    }
    let theta = y.atan2(x);
    // atan2(-0.0, x < 0) = -π
    Ok(if theta <= -PI { PI } else { theta })
}

/// Analytic `∂θ/∂γ = (λ - cos α) sin α / |Λ|²`.
pub fn bogoliubov_angle_dgamma(alpha: f64, gamma: f64, lambda: f64) -> Result<f64> {
    let e2 = dispersion(alpha, gamma, lambda).powi(2);
    if e2.sqrt() < GAP_TOLERANCE {
        return Err(Error::GaplessMode { alpha });
    }
    Ok((lambda - alpha.cos()) * alpha.sin() / e2)
}

/// The ratio `λ / (1 - γ²)` whose arccosine is the Fermi momentum.
fn fermi_ratio(gamma: f64, lambda: f64) -> Result<f64> {
    let denom = 1.0 - gamma * gamma;
    if denom == 0.0 {
        return Err(Error::DegenerateRatio);
    }
    Ok(lambda / denom)
}

/// Fermi cutoff index `k_T = floor(N/2π · arccos(λ/(1-γ²)))` when the ratio
/// lies in `[-1, 1]`, otherwise 0.
///
/// At `γ = 1` the ratio is singular; see [`fermi_cutoff_or_limit`].
pub fn fermi_cutoff(gamma: f64, lambda: f64, n_sites: usize) -> Result<usize> {
    check_size(n_sites)?;
    let ratio = fermi_ratio(gamma, lambda)?;
    Ok(cutoff_from_ratio(ratio, n_sites))
}

fn cutoff_from_ratio(ratio: f64, n_sites: usize) -> usize {
    if ratio.abs() > 1.0 {
        return 0;
    }
    let x = n_sites as f64 * ratio.acos() / (2.0 * PI);
    (x + CUTOFF_SLACK).floor() as usize
}

/// [`fermi_cutoff`] with the `γ = 1` limit filled in: `k_T = 0` for `λ > 0`
/// and `k_T = floor(N/4)` at `λ = 0`.
pub fn fermi_cutoff_or_limit(gamma: f64, lambda: f64, n_sites: usize) -> Result<usize> {
    match fermi_cutoff(gamma, lambda, n_sites) {
        Err(Error::DegenerateRatio) if lambda > 0.0 => Ok(0),
        Err(Error::DegenerateRatio) => Ok(n_sites / 4),
        other => other,
    }
}

/// Continuum Fermi momentum `α_F ∈ [0, π]`: pairs with `α ≤ α_F` are holes.
/// Returns 0 when no hole region exists. Same clipping and `γ = 1` rules as
/// [`fermi_cutoff_or_limit`].
pub fn fermi_momentum(gamma: f64, lambda: f64) -> f64 {
    match fermi_ratio(gamma, lambda) {
        Ok(r) if r.abs() <= 1.0 => r.acos(),
        Ok(_) => 0.0,
        Err(_) if lambda > 0.0 => 0.0,
        Err(_) => PI / 2.0,
    }
}

/// Spectral gap `min_α |Λ(α)|`.
///
/// `|Λ|² = (1-γ²) x² - 2λx + λ² + γ²` with `x = cos α ∈ [-1, 1]`; the
/// minimum sits either at the vertex `x* = λ/(1-γ²)` or at an endpoint.
pub fn gap(gamma: f64, lambda: f64) -> f64 {
    let a = 1.0 - gamma * gamma;
    let at_plus = (1.0 - lambda).powi(2);
    let at_minus = (1.0 + lambda).powi(2);
    let mut min_sq = at_plus.min(at_minus);
    if a > 0.0 {
        let vertex = lambda / a;
        if (-1.0..=1.0).contains(&vertex) {
            // γ²(1 - γ² - λ²)/(1 - γ²), written so γ = 0 gives an exact zero
            let v = gamma * gamma * (a - lambda * lambda) / a;
            min_sq = min_sq.min(v.max(0.0));
        }
    }
    min_sq.sqrt()
}

/// A lattice momentum `α_k = 2πk/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMomentum {
    pub k: i64,
    pub alpha: f64,
}

/// The `N` momenta `k ∈ {-N/2+1, …, N/2}`, ascending.
pub fn momentum_grid(n_sites: usize) -> Result<Vec<GridMomentum>> {
    check_size(n_sites)?;
    let half = (n_sites / 2) as i64;
    Ok(((-half + 1)..=half).map(|k| GridMomentum { k, alpha: momentum(k, n_sites) }).collect())
}

pub(crate) fn momentum(k: i64, n_sites: usize) -> f64 {
    2.0 * PI * k as f64 / n_sites as f64
}

/// `n ≥ 2` evenly spaced points from `lo` to `hi`, computed as
/// `lo + (hi - lo)·i/(n - 1)` so that both endpoints and exactly
/// representable interior values (such as λ = 1 on `[0, 2]`) come out exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub gamma: f64,
    pub lambda: f64,
    pub gap: f64,
}

/// [`gap`] over the rectangular grid `gammas × lambdas`, γ varying fastest.
pub fn gap_grid(gammas: &[f64], lambdas: &[f64]) -> Vec<GapSample> {
    lambdas
        .iter()
        .flat_map(|&lambda| gammas.iter().map(move |&gamma| GapSample { gamma, lambda, gap: gap(gamma, lambda) }))
        .collect()
}
