//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong while building or solving a model.
#[derive(Debug, Error)]
pub enum Error {
    /// Site count outside the bitmask-supported range.
    #[error("site count {0} outside supported range 1..=16")]
    SiteCountOutOfRange(usize),

    /// A model parameter fails validation; the message names the parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Basis and model disagree on the number of sites.
    #[error("sector basis is for {basis} sites but the model has {model}")]
    SectorSpecMismatch { basis: usize, model: usize },

    /// Dense diagonalization refused; the caller should switch to the
    /// iterative path or raise the cap.
    #[error("sector dimension {dim} exceeds dense cap {cap}; use the iterative ground-state path or raise the cap")]
    DenseCapExceeded { dim: usize, cap: usize },

    /// The Lanczos iteration did not reach the requested residual.
    #[error("iterative solver stalled at residual {residual:.3e} after {restarts} restarts")]
    NoConvergence { residual: f64, restarts: usize },

    /// A thermal ensemble was requested from spectra that do not cover
    /// every particle-number / spin sector.
    #[error("spectra incomplete: missing sector (N={particles}, 2Sz={two_sz})")]
    MissingSector { particles: u32, two_sz: i32 },

    /// A positive-temperature ensemble needs every eigenvalue of a sector,
    /// not just its ground state.
    #[error("sector (N={particles}, 2Sz={two_sz}) carries only a partial spectrum; a T > 0 ensemble needs all eigenvalues")]
    PartialSpectrum { particles: u32, two_sz: i32 },

    /// The dots carry no singly-occupied weight, so the two-qubit
    /// concurrence does not exist. Deliberately not coerced to zero.
    #[error("concurrence undefined: singly-occupied weight {weight:.3e} is negligible")]
    UndefinedConcurrence { weight: f64 },

    /// A density matrix handed to the entanglement routines violates a
    /// precondition beyond tolerance.
    #[error("density matrix violates {what} by {value:.3e}")]
    InvalidDensityMatrix { what: &'static str, value: f64 },

    /// An operator expression touches a site the model does not have.
    #[error("operator references site {site} outside the {sites}-site lattice")]
    OrbitalOutOfRange { site: usize, sites: usize },

    /// The requested system size is beyond the configured gate for the
    /// chosen solve path.
    #[error("{path} path gated to {cap} sites, got {sites}; raise max_sites to override")]
    SiteGateExceeded {
        path: &'static str,
        sites: usize,
        cap: usize,
    },

    /// The sampled concurrence values are not monotone across the
    /// bisection bracket, so the located crossing is unreliable.
    #[error("concurrence is not monotone across the bisection bracket near t = {t:.6e}")]
    NonMonotonicCrossing { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
