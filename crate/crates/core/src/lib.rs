//! Analytic solutions and an exact-diagonalization oracle for the quantum
//! Rabi square: four Rabi models on the corners of a square with edge
//! hopping `J1` and diagonal hopping `J2`.

pub mod error;
pub mod fock;
pub mod gauge;
pub mod meanfield;
pub mod model;
pub mod optimize;
pub mod report;
pub mod runs;
pub mod spin;

pub use error::{QrsError, Result};
pub use model::{ModelParams, MomentumBranch};
