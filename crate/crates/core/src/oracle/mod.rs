//! Independent ground-truth engines for small chains.
//!
//! - [`spin`]: exact diagonalization of the rotated spin Hamiltonian.
//! - [`fermion`]: parity-resolved free-fermion energies and a momentum-space
//!   Fock representation for embedding product ground states.
//! - [`spectral`]: excited-state sums for the geometric tensor.
//! - [`wilson`]: discrete Berry phases around closed loops.

pub mod fermion;
pub mod spectral;
pub mod spin;
pub mod wilson;

pub use fermion::{free_fermion_parity_spectrum, ParitySectorResult};
pub use spectral::{qgt_matrix_elements, QgtTerm};
pub use spin::{build_spin_hamiltonian, ed_ground, SpinSpectrum};
pub use wilson::{wilson_loop_berry_phase, LoopBackend};
