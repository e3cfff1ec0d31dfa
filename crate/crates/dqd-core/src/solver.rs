//! Eigensolvers for sector Hamiltonians and the grand-canonical ensemble
//! built from their spectra.
//!
//! Two routes: full dense diagonalization for anything below a configurable
//! dimension cap, and a restarted Lanczos iteration with full
//! reorthogonalization for ground states of larger sectors. Statistical
//! weights are grand canonical at `mu = 0` (the chemical potential is
//! absorbed into `eps_d`), taken over every `(N, S_z)` sector.

use crate::eigen::{symmetric_eigen_dense, tridiagonal_eigen};
use crate::error::{Error, Result};
use crate::fock::{all_sector_keys, SectorBasis, SectorKey};
use crate::model::SectorMatrix;
use crate::sparse::CsrMatrix;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Default refusal threshold for the dense path.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Two eigenlevels closer than this (relative to `max(1, |E|)`) are treated
/// as degenerate when the zero-temperature ensemble is assembled.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Ensemble weights below this are dropped after normalization.
const WEIGHT_FLOOR: f64 = 1e-16;

/// Eigenvalues (ascending) and matching eigenvectors of one sector.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub key: SectorKey,
    pub energies: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    /// Whether `energies` covers the whole sector or only its bottom.
    pub complete: bool,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

/// Full eigendecomposition of a sector matrix, refused above `cap`.
pub fn diagonalize_dense(matrix: &SectorMatrix, cap: usize) -> Result<Spectrum> {
    let dim = matrix.dim();
    if dim > cap {
        return Err(Error::DenseCapExceeded { dim, cap });
    }
    if dim == 0 {
        return Ok(Spectrum {
            key: matrix.key(),
            energies: Vec::new(),
            states: Vec::new(),
            complete: true,
        });
    }
    let (energies, vectors) = symmetric_eigen_dense(&matrix.to_dense());
    let states: Vec<DVector<f64>> = (0..dim).map(|i| vectors.column(i).into_owned()).collect();
    Ok(Spectrum {
        key: matrix.key(),
        energies,
        states,
        complete: true,
    })
}

const LANCZOS_BLOCK: usize = 200;
const LANCZOS_RESTARTS: usize = 50;

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization
/// against the stored Krylov block. Deterministic: the start vector comes
/// from a generator seeded by the sector key.
pub fn ground_state_iterative(matrix: &SectorMatrix, tol: f64) -> Result<(f64, DVector<f64>)> {
    let dim = matrix.dim();
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "cannot take a ground state of an empty sector".into(),
        ));
    }
    let csr = matrix.to_csr();
    if dim == 1 {
        let mut y = vec![0.0];
        csr.matvec(&[1.0], &mut y);
        return Ok((y[0], DVector::from_element(1, 1.0)));
    }

    let key = matrix.key();
    let seed = 0x9e37_79b9_7f4a_7c15u64
        ^ ((key.particles as u64) << 32)
        ^ (key.two_sz as u64 & 0xffff_ffff)
        ^ ((key.sites as u64) << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
    v /= v.norm();

    let mut best_residual = f64::INFINITY;
    for restart in 0..LANCZOS_RESTARTS {
        let (energy, ritz, residual) = lanczos_pass(&csr, &v);
        if residual <= tol {
            return Ok((energy, ritz));
        }
        best_residual = best_residual.min(residual);
        v = ritz;
        if restart + 1 == LANCZOS_RESTARTS {
            return Err(Error::NoConvergence {
                residual: best_residual,
                restarts: LANCZOS_RESTARTS,
            });
        }
    }
    unreachable!()
}

/// One Lanczos sweep from start vector `v0`: builds up to `LANCZOS_BLOCK`
/// Krylov vectors, returns the best Ritz pair and its explicit residual
/// norm `|H x - E x|`.
fn lanczos_pass(csr: &CsrMatrix, v0: &DVector<f64>) -> (f64, DVector<f64>, f64) {
    let dim = csr.dim();
    let steps = LANCZOS_BLOCK.min(dim);
    let mut basis: Vec<DVector<f64>> = vec![v0.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut w = DVector::zeros(dim);
    for j in 0..steps {
        csr.matvec(basis[j].as_slice(), w.as_mut_slice());
        let alpha = basis[j].dot(&w);
        alphas.push(alpha);
        // Full reorthogonalization, applied twice for stability.
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dot(&w);
                w.axpy(-proj, q, 1.0);
            }
        }
        let beta = w.norm();
        if beta < 1e-13 || j + 1 == steps {
            break;
        }
        betas.push(beta);
        basis.push(&w / beta);
    }

    // Ritz pair from the tridiagonal projection; eigenvalues are ascending.
    let k = alphas.len();
    let (tri_vals, tri_vecs) = tridiagonal_eigen(&alphas, &betas);
    let energy = tri_vals[0];
    let coeffs = tri_vecs.column(0);
    let mut x = DVector::zeros(dim);
    for (j, q) in basis.iter().enumerate().take(k) {
        x.axpy(coeffs[j], q, 1.0);
    }
    x /= x.norm();

    csr.matvec(x.as_slice(), w.as_mut_slice());
    let residual = (&w - &x * energy).norm();
    (energy, x, residual)
}

/// A solved sector: its basis and whatever part of its spectrum is known.
#[derive(Clone, Debug)]
pub struct SolvedSector {
    pub basis: SectorBasis,
    pub spectrum: Spectrum,
}

/// All solved sectors of a lattice, ordered by sector key.
#[derive(Clone, Debug, Default)]
pub struct SectorSet {
    items: BTreeMap<SectorKey, SolvedSector>,
}

impl SectorSet {
    pub fn new() -> Self {
        SectorSet {
            items: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, basis: SectorBasis, spectrum: Spectrum) {
        debug_assert_eq!(basis.key(), spectrum.key);
        self.items.insert(basis.key(), SolvedSector { basis, spectrum });
    }

    pub fn get(&self, key: SectorKey) -> Option<&SolvedSector> {
        self.items.get(&key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SectorKey, &SolvedSector)> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// One member of a statistical mixture: eigenstate `state` of sector
/// `sector`, carrying probability `weight`.
#[derive(Copy, Clone, Debug)]
pub struct EnsembleEntry {
    pub sector: SectorKey,
    pub state: usize,
    pub weight: f64,
}

/// Grand-canonical mixture at `mu = 0` over every sector of the lattice.
#[derive(Clone, Debug)]
pub struct ThermalEnsemble {
    pub temperature: f64,
    pub entries: Vec<EnsembleEntry>,
    /// Global ground energy across all sectors.
    pub ground_energy: f64,
    /// Number of states inside the degeneracy window at `T = 0`; 1 at
    /// positive temperature.
    pub ground_degeneracy: usize,
    /// `ln sum_n exp(-(E_n - E_0)/T)`, the partition function with the
    /// ground energy factored out; `ln(degeneracy)` at `T = 0`.
    pub log_z_shifted: f64,
}

/// Build the mixture for `temperature` from solved sectors covering every
/// `(N, S_z)` sector of a `sites`-site lattice.
///
/// At `T = 0` all states within the degeneracy window around the global
/// minimum enter with equal weight. At `T > 0` every sector must carry a
/// complete spectrum and weights are `exp(-(E - E_min)/T)`, normalized;
/// negligible weights are dropped.
pub fn thermal_ensemble(sectors: &SectorSet, sites: usize, temperature: f64) -> Result<ThermalEnsemble> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature = {temperature} must be >= 0"
        )));
    }
    for key in all_sector_keys(sites) {
        let solved = sectors.get(key).ok_or(Error::MissingSector {
            particles: key.particles,
            two_sz: key.two_sz,
        })?;
        if temperature > 0.0 && !solved.spectrum.complete {
            return Err(Error::PartialSpectrum {
                particles: key.particles,
                two_sz: key.two_sz,
            });
        }
        if solved.spectrum.energies.is_empty() {
            return Err(Error::MissingSector {
                particles: key.particles,
                two_sz: key.two_sz,
            });
        }
    }

    let e_min = sectors
        .iter()
        .map(|(_, s)| s.spectrum.ground_energy())
        .fold(f64::INFINITY, f64::min);

    if temperature == 0.0 {
        let window = DEGENERACY_TOL * e_min.abs().max(1.0);
        let mut entries = Vec::new();
        for (key, solved) in sectors.iter() {
            for (i, &e) in solved.spectrum.energies.iter().enumerate() {
                if e - e_min <= window {
                    entries.push(EnsembleEntry {
                        sector: *key,
                        state: i,
                        weight: 1.0,
                    });
                } else {
                    break;
                }
            }
        }
        let g = entries.len();
        for entry in &mut entries {
            entry.weight = 1.0 / g as f64;
        }
        return Ok(ThermalEnsemble {
            temperature,
            entries,
            ground_energy: e_min,
            ground_degeneracy: g,
            log_z_shifted: (g as f64).ln(),
        });
    }

    let mut entries = Vec::new();
    let mut z = 0.0;
    for (key, solved) in sectors.iter() {
        for (i, &e) in solved.spectrum.energies.iter().enumerate() {
            let w = (-(e - e_min) / temperature).exp();
            z += w;
            entries.push(EnsembleEntry {
                sector: *key,
                state: i,
                weight: w,
            });
        }
    }
    let log_z_shifted = z.ln();
    for entry in &mut entries {
        entry.weight /= z;
    }
    entries.retain(|e| e.weight >= WEIGHT_FLOOR);
    let renorm: f64 = entries.iter().map(|e| e.weight).sum();
    for entry in &mut entries {
        entry.weight /= renorm;
    }
    Ok(ThermalEnsemble {
        temperature,
        entries,
        ground_energy: e_min,
        ground_degeneracy: 1,
        log_z_shifted,
    })
}
