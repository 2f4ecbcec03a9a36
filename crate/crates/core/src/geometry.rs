//! Quantum geometric tensor and Berry curvature on the `(φ, γ, λ)` manifold.
//!
//! `G_{μν} = ⟨∂_μψ|∂_νψ⟩ - ⟨∂_μψ|ψ⟩⟨ψ|∂_νψ⟩`. Its real part is the
//! Fubini-Study metric; `F_{μν} = G_{μν} - G_{νμ} = 2i Im G_{μν}` is the
//! curvature two-form `⟨∂_μψ|∂_νψ⟩ - c.c.`, purely imaginary.
//!
//! The product ground state makes `G` additive over momentum pairs, so the
//! finite-difference tensor is assembled pair by pair in a two-dimensional
//! space instead of on the full many-body state.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground_state::{build_ground_state, ModeAmplitudes};
use crate::model::{self, bogoliubov_angle, fermi_cutoff_or_limit, fermi_momentum, Band, ModelParams, GAP_TOLERANCE};
use crate::oracle::spectral::{self, Tensor3};
use crate::quadrature::{integrate_breakpoints, QuadratureConfig, QuadratureResult};

pub const DEFAULT_STEP: f64 = 1e-5;
/// Stencil points with a smaller continuum gap are refused.
pub const STENCIL_GAP_TOLERANCE: f64 = 1e-10;
/// `h` and `h/2` estimates must agree to this, relative to `1 + max|G|`.
pub const RICHARDSON_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coordinate {
    Phi,
    Gamma,
    Lambda,
}

pub const COORDINATES: [Coordinate; 3] = [Coordinate::Phi, Coordinate::Gamma, Coordinate::Lambda];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricTensor {
    pub coords: [Coordinate; 3],
    pub g: Tensor3,
}

impl GeometricTensor {
    pub fn new(g: Tensor3) -> Self {
        Self { coords: COORDINATES, g }
    }

    pub fn get(&self, mu: Coordinate, nu: Coordinate) -> Complex64 {
        self.g[mu as usize][nu as usize]
    }

    /// Symmetric real part.
    pub fn metric(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (self.g[i][j].re + self.g[j][i].re)))
    }

    /// `F_{μν} = G_{μν} - G_{νμ}`.
    pub fn curvature(&self, mu: Coordinate, nu: Coordinate) -> Complex64 {
        self.get(mu, nu) - self.get(nu, mu)
    }

    /// `max |G_{μν} - conj(G_{νμ})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.g[i][j] - self.g[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn combine(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self::new(std::array::from_fn(|i| std::array::from_fn(|j| f(self.g[i][j], other.g[i][j]))))
    }
}

/// Thermodynamic-limit `F_{φγ}` per unit of momentum measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureDensity {
    pub value: Complex64,
    pub gamma: f64,
    pub lambda: f64,
    pub abs_error: f64,
}

/// `F_{φγ}` of one pair: `±i sin θ ∂θ/∂γ`, `+` for particles.
pub fn berry_curvature_mode(alpha: f64, params: &ModelParams, band: Band) -> Result<Complex64> {
    let theta = bogoliubov_angle(alpha, params.gamma, params.lambda)?;
    let dtheta = model::bogoliubov_angle_dgamma(alpha, params.gamma, params.lambda)?;
    Ok(Complex64::new(0.0, band.sign() * theta.sin() * dtheta))
}

/// Signed real integrand `s(α) γ sin²α (λ - cos α) / |Λ|³`, with `s = -1` on
/// the hole side `α ≤ α_F`.
pub fn curvature_integrand(alpha: f64, gamma: f64, lambda: f64, alpha_f: f64) -> f64 {
    let e = model::dispersion(alpha, gamma, lambda);
    if e == 0.0 {
        return 0.0;
    }
    let s = alpha.sin();
    let f = gamma * s * s * (lambda - alpha.cos()) / (e * e * e);
    if alpha <= alpha_f {
        -f
    } else {
        f
    }
}

/// Kinks and peak locations of [`curvature_integrand`] on `[0, π]`.
pub(crate) fn alpha_breakpoints(gamma: f64, lambda: f64) -> Vec<f64> {
    let mut pts = vec![0.0, PI];
    let alpha_f = fermi_momentum(gamma, lambda);
    if alpha_f > 0.0 && alpha_f < PI {
        pts.push(alpha_f);
    }
    if lambda <= 1.0 {
        pts.push(lambda.acos());
    }
    // for large γ the weight concentrates within |1 ∓ λ|/γ of the band edges
    if gamma > 0.0 {
        let near = ((1.0 - lambda).abs() / gamma).min(1.0).asin();
        let far = ((1.0 + lambda) / gamma).min(1.0).asin();
        pts.extend([near, PI - far]);
    }
    pts
}

/// `∫_0^π s(α) f(α) dα` with its quadrature error.
pub fn curvature_integral(gamma: f64, lambda: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    let alpha_f = fermi_momentum(gamma, lambda);
    integrate_breakpoints(|a| curvature_integrand(a, gamma, lambda, alpha_f), &alpha_breakpoints(gamma, lambda), cfg)
}

/// `F_{φγ}(γ, λ) = i ∫_0^π s(α) f(α) dα`, the `N → ∞` limit of
/// `(2π/N) Σ_pairs` of [`berry_curvature_mode`].
pub fn berry_curvature_density(gamma: f64, lambda: f64) -> Result<CurvatureDensity> {
    let g = model::gap(gamma, lambda);
    if g < GAP_TOLERANCE {
        return Err(Error::CriticalPoint { gamma, lambda, gap: g });
    }
    let q = curvature_integral(gamma, lambda, &QuadratureConfig::default())?;
    Ok(CurvatureDensity { value: Complex64::new(0.0, q.value), gamma, lambda, abs_error: q.abs_error })
}

/// `(2π/N) Σ_pairs` of [`berry_curvature_mode`] over the ground state's bands.
pub fn berry_curvature_sum(params: &ModelParams, n_sites: usize) -> Result<Complex64> {
    let gs = build_ground_state(params, n_sites)?;
    let total =
        gs.pairs.iter().map(|p| berry_curvature_mode(p.mode.alpha, params, p.mode.band)).sum::<Result<Complex64>>()?;
    Ok(total * (2.0 * PI / n_sites as f64))
}

fn shifted(params: &ModelParams, axis: usize, d: f64) -> ModelParams {
    // unchecked on purpose: the stencil may step to γ < 0 around γ = 0
    let mut p = *params;
    match axis {
        0 => p.phi += d,
        1 => p.gamma += d,
        _ => p.lambda += d,
    }
    p
}

/// Pair amplitudes with the band fixed, phase-aligned to `reference`.
fn aligned(alpha: f64, p: &ModelParams, band: Band, reference: &ModeAmplitudes) -> Result<ModeAmplitudes> {
    let a = ModeAmplitudes::from_angle(bogoliubov_angle(alpha, p.gamma, p.lambda)?, p.phi, band);
    let z = reference.inner(&a);
    Ok(a.with_phase(-z.arg()))
}

fn qgt_at_step(params: &ModelParams, n_sites: usize, h: f64) -> Result<GeometricTensor> {
    let gs = build_ground_state(params, n_sites)?;
    let stencil: Vec<ModelParams> = (0..3).flat_map(|axis| [h, -h].map(|d| shifted(params, axis, d))).collect();
    let mut cutoffs = Vec::with_capacity(6);
    for p in &stencil {
        let gap = model::gap(p.gamma.abs(), p.lambda);
        if gap < STENCIL_GAP_TOLERANCE {
            return Err(Error::StencilCrossesCritical { gap });
        }
        cutoffs.push(fermi_cutoff_or_limit(p.gamma, p.lambda, n_sites)?);
        let unpaired_flip = gs.unpaired.iter().any(|m| (p.lambda - m.alpha.cos() < 0.0) != m.occupied);
        if unpaired_flip {
            return Err(Error::StencilCrossesCritical { gap });
        }
    }

    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    for pair in &gs.pairs {
        let (k, alpha, band) = (pair.mode.k, pair.mode.alpha, pair.mode.band);
        if cutoffs.iter().any(|&kt| (k as usize <= kt) != (band == Band::Hole)) {
            return Err(Error::BandMismatch { k });
        }
        let centre = pair.amplitudes;
        let mut d = [[Complex64::new(0.0, 0.0); 2]; 3];
        for (axis, slot) in d.iter_mut().enumerate() {
            let plus = aligned(alpha, &stencil[2 * axis], band, &centre)?;
            let minus = aligned(alpha, &stencil[2 * axis + 1], band, &centre)?;
            *slot = [(plus.u - minus.u) / (2.0 * h), (plus.v - minus.v) / (2.0 * h)];
        }
        let inner = |a: &[Complex64; 2], b: &[Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
        let c = [centre.u, centre.v];
        let conn: Vec<Complex64> = d.iter().map(|x| inner(&c, x)).collect();
        for mu in 0..3 {
            for nu in 0..3 {
                g[mu][nu] += inner(&d[mu], &d[nu]) - conn[mu].conj() * conn[nu];
            }
        }
    }
    Ok(GeometricTensor::new(g))
}

/// Central-difference geometric tensor of the `N`-site ground state, checked
/// and improved by Richardson extrapolation from `h` and `h/2`.
pub fn qgt_finite_diff(params: &ModelParams, n_sites: usize, step: f64) -> Result<GeometricTensor> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(Error::InvalidParams(format!("finite-difference step {step} outside [1e-6, 1e-3]")));
    }
    let coarse = qgt_at_step(params, n_sites, step)?;
    let fine = qgt_at_step(params, n_sites, step / 2.0)?;
    let deviation = coarse.combine(&fine, |a, b| a - b).max_abs();
    if deviation > RICHARDSON_TOLERANCE * (1.0 + fine.max_abs()) {
        return Err(Error::RichardsonMismatch { deviation });
    }
    Ok(fine.combine(&coarse, |f, c| (4.0 * f - c) / 3.0))
}

/// Fubini-Study metric at the default step.
pub fn metric_real(params: &ModelParams, n_sites: usize) -> Result<[[f64; 3]; 3]> {
    Ok(qgt_finite_diff(params, n_sites, DEFAULT_STEP)?.metric())
}

/// Excited-state sum over the exact spectrum, `N ≤ 10`.
pub fn qgt_spectral(params: &ModelParams, n_sites: usize) -> Result<GeometricTensor> {
    Ok(GeometricTensor::new(spectral::spectral_sum(params, n_sites)?))
}
