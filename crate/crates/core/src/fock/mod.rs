//! Exact diagonalization of the square on a truncated Fock space.
//!
//! Basis order is cavity-major, spin-minor: the composite index is
//! `photon_index · 16 + spin_bits`, where `photon_index` reads the photon
//! numbers `(n1, n2, n3, n4)` as base-`n_c` digits with `n1` most
//! significant and `spin_bits` reads `(s1, s2, s3, s4)` as bits with `s1`
//! most significant and `1 = ↑`.

pub mod dump;
pub mod ed;
pub mod eigen;
pub mod hamiltonian;
pub mod operator;
pub mod space;
pub mod state;
pub mod symmetry;
pub mod transform;

pub use eigen::{ground_state, ground_state_with, EigenOptions, Method, SpectralResult};
pub use hamiltonian::{build_displaced_hamiltonian, build_hamiltonian};
pub use operator::{CsrMatrix, OperatorMatrix};
pub use space::FockSpace;
pub use state::{fidelity, meanfield_state, observables, Frame, MeanFieldPhase, QuantumState};
pub use symmetry::{cyclic_shift_operator, parity_operator};
pub use transform::{displacement_operator, momentum_squeeze_operator};
