//! Exact-diagonalization study of the spin entanglement of two electrons in a
//! double quantum dot attached to metallic leads.
//!
//! The dots are modelled as Anderson impurities with an interdot hopping `t`,
//! on-site repulsion `U` and level position `eps_d`; each lead is a finite
//! tight-binding chain with hopping `t0`. Three wiring geometries are
//! supported (series, side-coupled, parallel) plus a custom bond map. The
//! crate builds the Hamiltonian per `(N, S_z)` sector, diagonalizes it
//! (dense or Lanczos), forms a grand-canonical ensemble at `mu = 0`, and
//! extracts dot-dot spin correlators and the two-qubit concurrence by two
//! independent routes that are cross-checked against each other.

pub mod eigen;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod model;
pub mod observables;
pub mod pipeline;
pub mod scales;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
