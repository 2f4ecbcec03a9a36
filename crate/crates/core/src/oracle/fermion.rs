//! Free-fermion solution of the chain with the Jordan-Wigner boundary term kept.
//!
//! With fermions on down spins the string operator makes the fermion boundary
//! condition depend on the particle-number parity: even parity sees
//! antiperiodic momenta `2π(m + 1/2)/N`, odd parity periodic momenta `2πm/N`.
//! Within each sector the Hamiltonian is `Σ_k ξ_k n_k + pairing - Nλ/2` with
//! `ξ_k = λ - cos k` and pairing amplitude of modulus `γ sin k`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground_state::GroundState;
use crate::model::{check_size, dispersion, ModelParams};

pub const MAX_PARITY_SITES: usize = 4096;
pub const MAX_FOCK_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParitySectorResult {
    pub even_sector_energy: f64,
    pub odd_sector_energy: f64,
    /// Antiperiodic momenta.
    pub momenta_even: Vec<f64>,
    /// Periodic momenta.
    pub momenta_odd: Vec<f64>,
    pub ground_energy: f64,
}

/// Lowest energies of both fermion-parity sectors.
pub fn free_fermion_parity_spectrum(params: &ModelParams, n_sites: usize) -> Result<ParitySectorResult> {
    check_size(n_sites)?;
    if n_sites > MAX_PARITY_SITES {
        return Err(Error::BadSize(n_sites));
    }
    let (gamma, lambda) = (params.gamma, params.lambda);
    let n = n_sites as f64;
    let offset = -0.5 * n * lambda;
    let pair_energy = |k: f64| (lambda - k.cos()) - dispersion(k, gamma, lambda);

    let momenta_even: Vec<f64> = (0..n_sites).map(|m| 2.0 * PI * (m as f64 + 0.5) / n).collect();
    // pairs (m, N-1-m): every antiperiodic momentum has a distinct partner
    let even_sector_energy = offset + momenta_even[..n_sites / 2].iter().map(|&k| pair_energy(k)).sum::<f64>();

    let momenta_odd: Vec<f64> = (0..n_sites).map(|m| 2.0 * PI * m as f64 / n).collect();
    let paired = &momenta_odd[1..n_sites / 2];
    let vacuum = offset + paired.iter().map(|&k| pair_energy(k)).sum::<f64>();
    let (xi_zero, xi_pi) = (lambda - 1.0, lambda + 1.0);
    let cheapest = paired.iter().map(|&k| dispersion(k, gamma, lambda)).fold(f64::INFINITY, f64::min);
    // odd total parity: one unpaired mode, or one quasiparticle with both or neither
    let odd_excitation = xi_zero.min(xi_pi).min(cheapest).min(xi_zero + xi_pi + cheapest);
    let odd_sector_energy = vacuum + odd_excitation;

    Ok(ParitySectorResult {
        even_sector_energy,
        odd_sector_energy,
        momenta_even,
        momenta_odd,
        ground_energy: even_sector_energy.min(odd_sector_energy),
    })
}

/// Fock space of the `N` periodic momentum modes, ordered as
/// [`crate::model::momentum_grid`]. Bit `m` of a basis index is the
/// occupation of mode `m`.
#[derive(Debug, Clone, Copy)]
struct MomentumFock {
    n_sites: usize,
}

impl MomentumFock {
    fn slot(&self, k: i64) -> usize {
        (k + self.n_sites as i64 / 2 - 1) as usize
    }

    /// `c†_slot |state⟩` as `(sign, state')`, or `None` if occupied.
    fn create(state: usize, slot: usize) -> Option<(f64, usize)> {
        if state & (1 << slot) != 0 {
            return None;
        }
        let sign = if (state & ((1 << slot) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((sign, state | (1 << slot)))
    }

    /// `P_k = c†_k c†_{-k}`.
    fn pair_create(&self, state: usize, k: i64) -> Option<(f64, usize)> {
        let (s1, a) = Self::create(state, self.slot(-k))?;
        let (s2, b) = Self::create(a, self.slot(k))?;
        Some((s1 * s2, b))
    }
}

/// Quadratic fermion Hamiltonian on periodic momenta, boundary term dropped,
/// as a dense `2^N` matrix in the momentum-occupation basis.
pub fn momentum_fock_hamiltonian(params: &ModelParams, n_sites: usize) -> Result<DMatrix<Complex64>> {
    check_fock(n_sites)?;
    let fock = MomentumFock { n_sites };
    let half = (n_sites / 2) as i64;
    let dim = 1usize << n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    let offset = -0.5 * n_sites as f64 * params.lambda;
    let xi = |k: i64| params.lambda - crate::model::momentum(k, n_sites).cos();
    for s in 0..dim {
        let diag: f64 = ((-half + 1)..=half).filter(|&k| s & (1 << fock.slot(k)) != 0).map(xi).sum();
        h[(s, s)] += Complex64::new(diag + offset, 0.0);
        for k in 1..half {
            if let Some((sign, t)) = fock.pair_create(s, k) {
                let delta = pairing(params, crate::model::momentum(k, n_sites));
                h[(t, s)] += delta * sign;
                h[(s, t)] += delta.conj() * sign;
            }
        }
    }
    Ok(h)
}

/// Pairing amplitude `Δ_k = -iγ e^{-2iφ} sin k` multiplying `c†_k c†_{-k}`.
fn pairing(params: &ModelParams, alpha: f64) -> Complex64 {
    -Complex64::i() * Complex64::from_polar(params.gamma * alpha.sin(), -2.0 * params.phi)
}

/// Product state `Π_k (u_k + v_k c†_k c†_{-k})` on top of the unpaired
/// occupations, in the basis of [`momentum_fock_hamiltonian`].
pub fn embed_ground_state(state: &GroundState) -> Result<DVector<Complex64>> {
    let n = state.n_sites;
    check_fock(n)?;
    let fock = MomentumFock { n_sites: n };
    let mut base = 0usize;
    let mut sign = 1.0;
    for m in &state.unpaired {
        if m.occupied {
            let (s, t) = MomentumFock::create(base, fock.slot(m.k)).expect("distinct unpaired modes");
            sign *= s;
            base = t;
        }
    }
    let mut v = DVector::zeros(1 << n);
    v[base] = Complex64::new(sign, 0.0);
    for p in &state.pairs {
        let mut next = DVector::zeros(1 << n);
        for (s, &c) in v.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            next[s] += c * p.amplitudes.u;
            if let Some((sg, t)) = fock.pair_create(s, p.mode.k) {
                next[t] += c * p.amplitudes.v * sg;
            }
        }
        v = next;
    }
    Ok(v)
}

fn check_fock(n: usize) -> Result<()> {
    check_size(n)?;
    if n > MAX_FOCK_SITES {
        return Err(Error::SizeLimit { n, max: MAX_FOCK_SITES });
    }
    Ok(())
}
