//! Discrete Berry phase `arg Π ⟨ψ_i|ψ_{i+1}⟩` around a closed loop.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ground_state::{build_ground_state, pair_space_overlap, GroundState};
use crate::model::ModelParams;
use crate::oracle::spin::ed_ground;

/// Overlaps below this modulus mean the loop is too coarse.
pub const MIN_LINK_MODULUS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopBackend {
    /// Product ground states at any chain length.
    FastPath,
    /// Exact-diagonalization ground vectors, `N ≤ 12`.
    ExactDiagonalization,
}

/// Berry phase in `(-π, π]` of the loop `points[0] → points[1] → … → points[0]`.
/// The closing link is implied; repeating the first point at the end is harmless.
pub fn wilson_loop_berry_phase(points: &[ModelParams], n_sites: usize, backend: LoopBackend) -> Result<f64> {
    match backend {
        LoopBackend::FastPath => {
            let states = points.iter().map(|p| build_ground_state(p, n_sites)).collect::<Result<Vec<_>>>()?;
            loop_phase_from_states(&states)
        }
        LoopBackend::ExactDiagonalization => {
            let vectors = points
                .iter()
                .map(|p| ed_ground(p, n_sites).map(|s| DVector::from_vec(s.ground_vector)))
                .collect::<Result<Vec<_>>>()?;
            loop_phase_from_vectors(&vectors)
        }
    }
}

pub fn loop_phase_from_states(states: &[GroundState]) -> Result<f64> {
    closed_product(states.len(), |i, j| pair_space_overlap(&states[i], &states[j]))
}

pub fn loop_phase_from_vectors(vectors: &[DVector<Complex64>]) -> Result<f64> {
    closed_product(vectors.len(), |i, j| Ok(vectors[i].dotc(&vectors[j])))
}

fn closed_product(len: usize, link: impl Fn(usize, usize) -> Result<Complex64>) -> Result<f64> {
    let mut product = Complex64::new(1.0, 0.0);
    for i in 0..len {
        let z = link(i, (i + 1) % len)?;
        if z.norm() < MIN_LINK_MODULUS {
            return Err(Error::ZeroOverlap { modulus: z.norm() });
        }
        // normalize per link so long loops do not underflow
        product *= z / z.norm();
    }
    Ok(principal_arg(product))
}

/// `arg z` in `(-π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}
