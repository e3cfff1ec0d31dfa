//! Two-qubit concurrence of the dot spins, computed two independent ways.
//!
//! The closed form consumes spin correlators and singly-occupied projector
//! probabilities: with antiparallel and parallel channel terms
//!
//! ```text
//! C_ud  = 2|<S+_A S-_B>| - 2 sqrt(<P_up_A P_up_B> <P_dn_A P_dn_B>)
//! C_par = 2|<S+_A S+_B>| - 2 sqrt(<P_up_A P_dn_B> <P_dn_A P_up_B>)
//! C     = max(0, C_ud, C_par) / (P_ud + P_par)
//! ```
//!
//! which is exact for density matrices that are block diagonal in the dot
//! `S_z` (the only kind this model produces). The oracle route applies the
//! general spin-flip construction to the singly-occupied 4x4 block: with
//! `rho~ = (sy (x) sy) rho* (sy (x) sy)`, the concurrence is
//! `max(0, l1 - l2 - l3 - l4)` where `l_i` are the square roots of the
//! eigenvalues of `rho rho~`, evaluated here as singular values of a
//! factored form that stays accurate when members of the quadruple nearly
//! vanish.

use crate::eigen::{hermitian_eigen4, singular_values4};
use crate::error::{Error, Result};
use crate::observables::{CorrelatorSet, ReducedDensityMatrix};
use nalgebra::{Complex, Matrix4};
use rand::Rng;

/// Singly-occupied weight below which the two-qubit state, and with it the
/// concurrence, is declared undefined.
pub const WEIGHT_FLOOR: f64 = 1e-14;

type CMatrix4 = Matrix4<Complex<f64>>;

/// Concurrence of the dot-spin qubit pair together with its ingredients.
#[derive(Copy, Clone, Debug)]
pub struct ConcurrenceReport {
    /// Normalized concurrence in [0, 1].
    pub concurrence: f64,
    /// Antiparallel channel term (unnormalized).
    pub c_antiparallel: f64,
    /// Parallel channel term (unnormalized).
    pub c_parallel: f64,
    /// Weight of antiparallel singly-occupied configurations.
    pub p_antiparallel: f64,
    /// Weight of parallel singly-occupied configurations.
    pub p_parallel: f64,
    /// Total singly-occupied weight, the normalization denominator.
    pub single_occupancy_weight: f64,
    /// Independent spin-flip evaluation of the same quantity.
    pub oracle: f64,
}

/// Closed-form concurrence from the correlator set. The oracle field is
/// filled by running the spin-flip construction on the two-qubit density
/// matrix implied by the correlators.
pub fn concurrence_closed_form(cs: &CorrelatorSet) -> Result<ConcurrenceReport> {
    let p_ud = cs.p_antiparallel();
    let p_par = cs.p_parallel();
    let weight = p_ud + p_par;
    if weight < WEIGHT_FLOOR {
        return Err(Error::UndefinedConcurrence { weight });
    }
    let c_ud = 2.0 * cs.s_plus_minus.abs() - 2.0 * (cs.p[0][0] * cs.p[1][1]).max(0.0).sqrt();
    let c_par = 2.0 * cs.s_plus_plus.abs() - 2.0 * (cs.p[0][1] * cs.p[1][0]).max(0.0).sqrt();
    let concurrence = (c_ud.max(c_par).max(0.0)) / weight;

    let rho4 = implied_two_qubit_state(cs, weight);
    let oracle = wootters_concurrence(&rho4)?;

    Ok(ConcurrenceReport {
        concurrence,
        c_antiparallel: c_ud,
        c_parallel: c_par,
        p_antiparallel: p_ud,
        p_parallel: p_par,
        single_occupancy_weight: weight,
        oracle,
    })
}

/// The normalized two-qubit density matrix consistent with a correlator
/// set, in the basis `{up-up, up-down, down-up, down-down}`.
fn implied_two_qubit_state(cs: &CorrelatorSet, weight: f64) -> CMatrix4 {
    let mut rho = CMatrix4::zeros();
    let re = |x: f64| Complex::new(x, 0.0);
    rho[(0, 0)] = re(cs.p[0][0] / weight);
    rho[(1, 1)] = re(cs.p[0][1] / weight);
    rho[(2, 2)] = re(cs.p[1][0] / weight);
    rho[(3, 3)] = re(cs.p[1][1] / weight);
    // <S+_A S-_B> = rho[down-up, up-down]; real model, so no phase.
    rho[(2, 1)] = re(cs.s_plus_minus / weight);
    rho[(1, 2)] = re(cs.s_plus_minus / weight);
    // <S+_A S+_B> = rho[down-down, up-up].
    rho[(3, 0)] = re(cs.s_plus_plus / weight);
    rho[(0, 3)] = re(cs.s_plus_plus / weight);
    rho
}

/// Project a two-dot reduced density matrix onto its singly-occupied
/// block and renormalize. Returns the normalized complex 4x4 block and
/// the weight it carried.
pub fn project_single_occupancy(rdm: &ReducedDensityMatrix) -> Result<(CMatrix4, f64)> {
    let (block, weight) = rdm.single_occupancy_block();
    if weight < WEIGHT_FLOOR {
        return Err(Error::UndefinedConcurrence { weight });
    }
    let mut rho = CMatrix4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            rho[(r, c)] = Complex::new(block[(r, c)] / weight, 0.0);
        }
    }
    Ok((rho, weight))
}

/// Spin-flip concurrence of an arbitrary two-qubit density matrix in the
/// basis `{up-up, up-down, down-up, down-down}`.
///
/// Preconditions (enforced to 1e-9): Hermitian, unit trace, positive
/// semidefinite.
pub fn wootters_concurrence(rho: &CMatrix4) -> Result<f64> {
    let herm = (rho - rho.adjoint()).norm();
    if herm > 1e-9 {
        return Err(Error::InvalidDensityMatrix {
            what: "hermiticity",
            value: herm,
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidDensityMatrix {
            what: "unit trace",
            value: (tr - Complex::new(1.0, 0.0)).norm(),
        });
    }

    let (eigenvalues, eigenvectors) = hermitian_eigen4(rho);
    let min_eig = eigenvalues[0];
    if min_eig < -1e-9 {
        return Err(Error::InvalidDensityMatrix {
            what: "positivity",
            value: min_eig,
        });
    }

    // sy (x) sy is real: antidiagonal (-1, 1, 1, -1).
    let mut yy = CMatrix4::zeros();
    yy[(0, 3)] = Complex::new(-1.0, 0.0);
    yy[(1, 2)] = Complex::new(1.0, 0.0);
    yy[(2, 1)] = Complex::new(1.0, 0.0);
    yy[(3, 0)] = Complex::new(-1.0, 0.0);

    // With rho = V diag(p) V^H, the quadruple l_i equals the singular
    // values of G = diag(sqrt p) V^H (sy (x) sy) V* diag(sqrt p): the
    // Hermitian product sqrt(rho) rho~ sqrt(rho) is B B^H for
    // B = V G V^T. Taking singular values of G instead of square roots of
    // eigenvalues of B B^H keeps near-zero members of the quadruple at
    // machine accuracy; tiny negative eigenvalues of rho are clamped.
    let middle = eigenvectors.adjoint() * yy * eigenvectors.map(|z| z.conj());
    let mut g = CMatrix4::zeros();
    for r in 0..4 {
        for c in 0..4 {
            let scale = (eigenvalues[r].max(0.0) * eigenvalues[c].max(0.0)).sqrt();
            g[(r, c)] = middle[(r, c)] * Complex::new(scale, 0.0);
        }
    }
    let lambdas = singular_values4(&g);
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Concurrence of a pure two-qubit state with amplitudes ordered
/// `{up-up, up-down, down-up, down-down}`:
/// `C0 = 2 |a_ud a_du - a_uu a_dd|`. The amplitudes must be normalized to
/// 1e-12.
pub fn pure_state_concurrence(amps: &[Complex<f64>; 4]) -> Result<f64> {
    let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDensityMatrix {
            what: "pure-state normalization",
            value: norm2 - 1.0,
        });
    }
    Ok(2.0 * (amps[1] * amps[2] - amps[0] * amps[3]).norm())
}

/// Random density matrix that is block diagonal in the total qubit `S_z`:
/// diagonal probabilities from a flat simplex draw (four unit exponentials,
/// normalized) and an up-down/down-up coherence with magnitude uniform in
/// `[0, sqrt(p_ud p_du)]` and uniform phase. Used by the oracle
/// equivalence check; reproducible from the caller's seeded generator.
pub fn random_axial_rho4<R: Rng>(rng: &mut R) -> CMatrix4 {
    let mut p = [0.0f64; 4];
    let mut total = 0.0;
    for v in &mut p {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        *v = -u.ln();
        total += *v;
    }
    for v in &mut p {
        *v /= total;
    }
    let bound = (p[1] * p[2]).sqrt();
    let mag = rng.gen_range(0.0..=1.0) * bound;
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let coh = Complex::from_polar(mag, phase);

    let mut rho = CMatrix4::zeros();
    for k in 0..4 {
        rho[(k, k)] = Complex::new(p[k], 0.0);
    }
    rho[(1, 2)] = coh;
    rho[(2, 1)] = coh.conj();
    rho
}

/// Closed-form concurrence read directly off an axially symmetric 4x4
/// density matrix (unit trace). Errors if the matrix has coherences
/// outside the two `S_z`-preserving slots beyond 1e-10.
pub fn closed_form_from_rho4(rho: &CMatrix4) -> Result<f64> {
    for r in 0..4 {
        for c in 0..4 {
            let allowed = r == c || (r, c) == (1, 2) || (r, c) == (2, 1) || (r, c) == (0, 3) || (r, c) == (3, 0);
            if !allowed && rho[(r, c)].norm() > 1e-10 {
                return Err(Error::InvalidDensityMatrix {
                    what: "axial block structure",
                    value: rho[(r, c)].norm(),
                });
            }
        }
    }
    let p = [rho[(0, 0)].re, rho[(1, 1)].re, rho[(2, 2)].re, rho[(3, 3)].re];
    let c_ud = 2.0 * rho[(2, 1)].norm() - 2.0 * (p[0] * p[3]).max(0.0).sqrt();
    let c_par = 2.0 * rho[(3, 0)].norm() - 2.0 * (p[1] * p[2]).max(0.0).sqrt();
    Ok(c_ud.max(c_par).max(0.0))
}
