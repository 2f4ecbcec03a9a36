//! Product-form ground states of the rotated XY chain.
//!
//! Each momentum pair `(k, -k)` with `0 < k < N/2` contributes a factor in
//! `span{|0⟩_k|0⟩_{-k}, |1⟩_k|1⟩_{-k}}`:
//!
//! ```text
//! particle:  cos(θ/2) |00⟩ + i e^{-2iφ} sin(θ/2) |11⟩
//! hole:      cos(θ/2) |11⟩ - i e^{+2iφ} sin(θ/2) |00⟩
//! ```
//!
//! Pairs with `k ≤ k_T` are holes. The self-conjugate momenta `k = 0` and
//! `k = N/2` are single fermion modes, filled when `λ - cos α < 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    self, bogoliubov_angle, check_size, dispersion, fermi_cutoff_or_limit, momentum, Band, Mode, ModelParams,
    GAP_TOLERANCE,
};

/// Amplitudes of one pair factor: `u` on `|00⟩`, `v` on `|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitudes {
    pub u: Complex64,
    pub v: Complex64,
    pub band: Band,
}

impl ModeAmplitudes {
    pub fn from_angle(theta: f64, phi: f64, band: Band) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        match band {
            Band::Particle => {
                Self { u: Complex64::new(c, 0.0), v: Complex64::i() * Complex64::from_polar(s, -2.0 * phi), band }
            }
            Band::Hole => {
                Self { u: -Complex64::i() * Complex64::from_polar(s, 2.0 * phi), v: Complex64::new(c, 0.0), band }
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// `⟨self|other⟩` inside the pair subspace.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.u.conj() * other.u + self.v.conj() * other.v
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        let z = Complex64::from_polar(1.0, phase);
        Self { u: self.u * z, v: self.v * z, band: self.band }
    }
}

/// Pair amplitudes of the mode at momentum `alpha`.
pub fn mode_amplitudes(alpha: f64, params: &ModelParams, band: Band) -> Result<ModeAmplitudes> {
    let theta = bogoliubov_angle(alpha, params.gamma, params.lambda)?;
    Ok(ModeAmplitudes::from_angle(theta, params.phi, band))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairMode {
    pub mode: Mode,
    pub amplitudes: ModeAmplitudes,
}

/// `k = 0` or `k = N/2`: a single fermion mode without a `-k` partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnpairedMode {
    pub k: i64,
    pub alpha: f64,
    pub occupied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub params: ModelParams,
    pub n_sites: usize,
    pub fermi_cutoff: usize,
    /// Pairs `k = 1, …, N/2 - 1`.
    pub pairs: Vec<PairMode>,
    /// `k = 0` then `k = N/2`.
    pub unpaired: [UnpairedMode; 2],
    /// Occupations over [`model::momentum_grid`] order, set for the isotropic Fock state.
    pub occupation_mask: Option<Vec<bool>>,
}

/// Ground state of `H(φ, γ, λ)` on `n_sites` sites. Refuses critical points.
pub fn build_ground_state(params: &ModelParams, n_sites: usize) -> Result<GroundState> {
    let g = model::gap(params.gamma, params.lambda);
    if g < GAP_TOLERANCE {
        return Err(Error::CriticalPoint { gamma: params.gamma, lambda: params.lambda, gap: g });
    }
    GroundState::on_lattice(params, n_sites)
}

/// Isotropic (`γ = 0`) Fock ground state: modes with `|k| ≤ k_T` filled for
/// `λ ≤ 1`, all empty for `λ > 1`.
pub fn isotropic_ground_state(lambda: f64, n_sites: usize) -> Result<GroundState> {
    check_size(n_sites)?;
    let params = ModelParams::new(0.0, 0.0, lambda)?.with_sites(n_sites)?;
    let k_t = model::fermi_cutoff(0.0, lambda, n_sites)? as i64;
    let filled = |k: i64| lambda <= 1.0 && k.abs() <= k_t;

    let mask = model::momentum_grid(n_sites)?.iter().map(|m| filled(m.k)).collect();
    let pairs = (1..(n_sites / 2) as i64)
        .map(|k| {
            let alpha = momentum(k, n_sites);
            let (theta, band, amplitudes) = if filled(k) {
                (std::f64::consts::PI, Band::Hole, (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
            } else {
                (0.0, Band::Particle, (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)))
            };
            PairMode {
                mode: Mode { k, alpha, energy: (lambda - alpha.cos()).abs(), theta, band },
                amplitudes: ModeAmplitudes { u: amplitudes.0, v: amplitudes.1, band },
            }
        })
        .collect();
    let half = (n_sites / 2) as i64;
    Ok(GroundState {
        params,
        n_sites,
        fermi_cutoff: k_t as usize,
        pairs,
        unpaired: [
            UnpairedMode { k: 0, alpha: 0.0, occupied: filled(0) },
            UnpairedMode { k: half, alpha: momentum(half, n_sites), occupied: filled(half) },
        ],
        occupation_mask: Some(mask),
    })
}

impl GroundState {
    /// Builds the state checking only the `N` lattice momenta for gaplessness,
    /// so that points on the continuum critical line `γ = 0, λ < 1` remain
    /// usable at finite `N`.
    pub fn on_lattice(params: &ModelParams, n_sites: usize) -> Result<Self> {
        check_size(n_sites)?;
        let k_t = fermi_cutoff_or_limit(params.gamma, params.lambda, n_sites)?;
        Self::with_cutoff(params, n_sites, k_t, |alpha| bogoliubov_angle(alpha, params.gamma, params.lambda))
    }

    /// Builds the state from an explicit angle function; used for the
    /// `γ → ∞` limiting state where every angle is `π/2`.
    pub(crate) fn with_cutoff(
        params: &ModelParams,
        n_sites: usize,
        k_t: usize,
        angle: impl Fn(f64) -> Result<f64>,
    ) -> Result<Self> {
        let (gamma, lambda) = (params.gamma, params.lambda);
        let half = (n_sites / 2) as i64;
        let pairs = (1..half)
            .map(|k| {
                let alpha = momentum(k, n_sites);
                let band = if k as usize <= k_t { Band::Hole } else { Band::Particle };
                let theta = angle(alpha)?;
                let mode = Mode { k, alpha, energy: dispersion(alpha, gamma, lambda), theta, band };
                Ok(PairMode { mode, amplitudes: ModeAmplitudes::from_angle(theta, params.phi, band) })
            })
            .collect::<Result<Vec<_>>>()?;
        let single = |k: i64| {
            let alpha = momentum(k, n_sites);
            let xi = lambda - alpha.cos();
            if xi.abs() < GAP_TOLERANCE {
                return Err(Error::GaplessMode { alpha });
            }
            Ok(UnpairedMode { k, alpha, occupied: xi < 0.0 })
        };
        Ok(Self {
            params: ModelParams { n_sites: Some(n_sites), ..*params },
            n_sites,
            fermi_cutoff: k_t,
            pairs,
            unpaired: [single(0)?, single(half)?],
            occupation_mask: None,
        })
    }

    pub fn norm(&self) -> f64 {
        self.pairs.iter().map(|p| p.amplitudes.norm_sqr()).product()
    }

    /// Number of hole pairs.
    pub fn hole_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.mode.band == Band::Hole).count()
    }

    /// Copy with every pair factor multiplied by `exp(i·phase(k))`.
    pub fn regauged(&self, phase: impl Fn(i64) -> f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.pairs {
            p.amplitudes = p.amplitudes.with_phase(phase(p.mode.k));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Record {
            k: i64,
            alpha: f64,
            theta: f64,
            band: Band,
            u: [f64; 2],
            v: [f64; 2],
        }
        let mut modes: Vec<Record> = self
            .pairs
            .iter()
            .map(|p| Record {
                k: p.mode.k,
                alpha: p.mode.alpha,
                theta: p.mode.theta,
                band: p.mode.band,
                u: [p.amplitudes.u.re, p.amplitudes.u.im],
                v: [p.amplitudes.v.re, p.amplitudes.v.im],
            })
            .collect();
        for m in &self.unpaired {
            let (u, v) = if m.occupied { ([0.0, 0.0], [1.0, 0.0]) } else { ([1.0, 0.0], [0.0, 0.0]) };
            let band = if m.occupied { Band::Hole } else { Band::Particle };
            let theta = if m.occupied { std::f64::consts::PI } else { 0.0 };
            modes.push(Record { k: m.k, alpha: m.alpha, theta, band, u, v });
        }
        modes.sort_by_key(|r| r.k);
        serde_json::json!({
            "phi": self.params.phi,
            "gamma": self.params.gamma,
            "lambda": self.params.lambda,
            "n_sites": self.n_sites,
            "fermi_cutoff": self.fermi_cutoff,
            "modes": modes,
        })
    }
}

/// `⟨a|b⟩` for states on the same grid with the same band assignment.
pub fn overlap(a: &GroundState, b: &GroundState) -> Result<Complex64> {
    if let Some(p) = a.pairs.iter().zip(&b.pairs).find(|(x, y)| x.mode.band != y.mode.band) {
        check_grid(a, b)?;
        return Err(Error::BandMismatch { k: p.0.mode.k });
    }
    pair_space_overlap(a, b)
}

/// `⟨a|b⟩` without the band check. Both band factors of a pair live in the
/// same two-dimensional subspace, so the product is well-defined for any
/// band assignment.
pub fn pair_space_overlap(a: &GroundState, b: &GroundState) -> Result<Complex64> {
    check_grid(a, b)?;
    if a.unpaired.iter().zip(&b.unpaired).any(|(x, y)| x.occupied != y.occupied) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(a.pairs.iter().zip(&b.pairs).map(|(x, y)| x.amplitudes.inner(&y.amplitudes)).product())
}

fn check_grid(a: &GroundState, b: &GroundState) -> Result<()> {
    if a.n_sites != b.n_sites {
        Err(Error::GridMismatch(a.n_sites, b.n_sites))
    } else {
        Ok(())
    }
}

/// `-1/2 Σ_k |Λ_k|` over the `N`-momentum grid.
pub fn ground_energy(params: &ModelParams, n_sites: usize) -> Result<f64> {
    Ok(-0.5
        * model::momentum_grid(n_sites)?.iter().map(|m| dispersion(m.alpha, params.gamma, params.lambda)).sum::<f64>())
}

/// Thermodynamic ground-state energy per site, `-(1/2π) ∫_0^π |Λ(α)| dα`.
pub fn ground_energy_density(gamma: f64, lambda: f64) -> Result<f64> {
    let mut breaks = vec![0.0, std::f64::consts::PI];
    let alpha_f = model::fermi_momentum(gamma, lambda);
    if alpha_f > 0.0 {
        breaks.push(alpha_f);
    }
    if lambda <= 1.0 {
        breaks.push(lambda.acos());
    }
    let q = crate::quadrature::integrate_breakpoints(
        |a| dispersion(a, gamma, lambda),
        &breaks,
        &crate::quadrature::QuadratureConfig::default(),
    )?;
    Ok(-q.value / (2.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn params(phi: f64, gamma: f64, lambda: f64) -> ModelParams {
        ModelParams::new(phi, gamma, lambda).unwrap()
    }

    #[test]
    fn amplitude_examples() {
        let p = params(0.0, 0.0, 2.0);
        let a = mode_amplitudes(1.0, &p, Band::Particle).unwrap();
        assert!((a.u - 1.0).norm() < 1e-15 && a.v.norm() < 1e-15);

        let p = params(0.0, 1.0, 0.0);
        let r = (PI / 4.0).cos();
        let a = mode_amplitudes(PI / 2.0, &p, Band::Particle).unwrap();
        assert!((a.u - r).norm() < 1e-14);
        assert!((a.v - Complex64::new(0.0, r)).norm() < 1e-14);

        let h = mode_amplitudes(PI / 2.0, &p, Band::Hole).unwrap();
        assert!((h.v - r).norm() < 1e-14);
        assert!((h.u - Complex64::new(0.0, -r)).norm() < 1e-14);
    }

    #[test]
    fn transverse_ising_holes() {
        let s = build_ground_state(&params(0.0, 1.0, 0.0), 8).unwrap();
        assert_eq!(s.fermi_cutoff, 2);
        let bands: Vec<(i64, Band)> = s.pairs.iter().map(|p| (p.mode.k, p.mode.band)).collect();
        assert_eq!(bands, vec![(1, Band::Hole), (2, Band::Hole), (3, Band::Particle)]);
        assert!(s.unpaired[0].occupied);
        assert!(!s.unpaired[1].occupied);
    }

    #[test]
    fn strong_field_all_particles() {
        let s = build_ground_state(&params(0.3, 0.5, 2.0), 8).unwrap();
        assert_eq!(s.hole_pairs(), 0);
        assert!(!s.unpaired[0].occupied);
    }

    #[test]
    fn critical_field_refused() {
        for g in [0.0, 0.4, 1.0, 2.5] {
            assert!(matches!(build_ground_state(&params(0.0, g, 1.0), 8), Err(Error::CriticalPoint { .. })));
        }
    }

    #[test]
    fn isotropic_examples() {
        let s = isotropic_ground_state(0.0, 100).unwrap();
        let grid = model::momentum_grid(100).unwrap();
        let mask = s.occupation_mask.as_ref().unwrap();
        let filled: Vec<i64> = grid.iter().zip(mask).filter(|(_, &f)| f).map(|(m, _)| m.k).collect();
        assert_eq!(filled, (-25..=25).collect::<Vec<_>>());

        let s = isotropic_ground_state(2.0, 100).unwrap();
        assert!(s.occupation_mask.unwrap().iter().all(|&f| !f));

        let s = isotropic_ground_state(1.0, 100).unwrap();
        let mask = s.occupation_mask.unwrap();
        let filled: Vec<i64> = grid.iter().zip(&mask).filter(|(_, &f)| f).map(|(m, _)| m.k).collect();
        assert_eq!(filled, vec![0]);
    }

    #[test]
    fn energy_examples() {
        assert!((ground_energy(&params(0.0, 1.0, 0.0), 8).unwrap() + 4.0).abs() < 1e-12);
        assert!((ground_energy_density(1.0, 0.0).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let s = build_ground_state(&params(0.4, 0.7, 0.3), 16).unwrap();
        assert!((overlap(&s, &s).unwrap() - 1.0).norm() < 1e-12);

        // single mode at θ = π/2, φ = 0 vs φ = π/2
        let p0 = params(0.0, 1.0, 0.0);
        let p1 = params(PI / 2.0, 1.0, 0.0);
        let a = mode_amplitudes(PI / 2.0, &p0, Band::Particle).unwrap();
        let b = mode_amplitudes(PI / 2.0, &p1, Band::Particle).unwrap();
        // cos²(π/4) + e^{-iπ} sin²(π/4)
        assert!(a.inner(&b).norm() < 1e-15);

        let a = build_ground_state(&params(0.0, 1.0, 0.1), 8).unwrap();
        let b = build_ground_state(&params(0.0, 1.0, 0.0), 8).unwrap();
        // band assignment differs (k_T = 0 vs 2): the checked overlap refuses
        assert!(matches!(overlap(&a, &b), Err(Error::BandMismatch { .. })));
        let m = pair_space_overlap(&a, &b).unwrap().norm();
        assert!(m < 1.0);

        let c = build_ground_state(&params(0.0, 1.0, 0.1), 10).unwrap();
        assert_eq!(overlap(&a, &c), Err(Error::GridMismatch(8, 10)));
    }

    #[test]
    fn json_shape() {
        let s = build_ground_state(&params(0.2, 0.5, 0.5), 8).unwrap();
        let j = s.to_json();
        let modes = j["modes"].as_array().unwrap();
        assert_eq!(modes.len(), 3 + 2);
        assert_eq!(modes[0]["k"], 0);
        assert!(modes[1]["u"].as_array().unwrap().len() == 2);
        assert!(modes.iter().any(|m| m["band"] == "Hole"));
    }

    proptest! {
        #[test]
        fn normalized(phi in 0.0..PI, g in 0.05..3.0f64, l in 0.0..3.0f64, half in 2usize..40) {
            prop_assume!((l - 1.0).abs() > 1e-3);
            let s = build_ground_state(&params(phi, g, l), 2 * half).unwrap();
            for p in &s.pairs {
                prop_assert!((p.amplitudes.norm_sqr() - 1.0).abs() < 1e-12);
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn pi_periodic_up_to_phase(phi in 0.0..PI, g in 0.05..3.0f64, l in 0.0..3.0f64) {
            prop_assume!((l - 1.0).abs() > 1e-3);
            let a = GroundState::on_lattice(&params(phi, g, l), 24).unwrap();
            let shifted = ModelParams { phi: phi + PI, ..params(phi, g, l) };
            let b = GroundState::on_lattice(&shifted, 24).unwrap();
            prop_assert!((overlap(&a, &b).unwrap().norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn band_flip_swaps_moduli(a in 0.01..3.1f64, phi in 0.0..PI, g in 0.05..3.0f64, l in 0.0..3.0f64) {
            let p = params(phi, g, l);
            prop_assume!(dispersion(a, g, l) > 1e-6);
            let x = mode_amplitudes(a, &p, Band::Particle).unwrap();
            let y = mode_amplitudes(a, &p, Band::Hole).unwrap();
            prop_assert!((x.u.norm() - y.v.norm()).abs() < 1e-15);
            prop_assert!((x.v.norm() - y.u.norm()).abs() < 1e-15);
        }
    }
}
