//! Solver cross-checks: the Lanczos path against full dense spectra on a
//! large sector, and the production eigensolver against an independently
//! coded Jacobi iteration on real sector Hamiltonians.

use dqd_core::fock::{all_sector_keys, enumerate_sector};
use dqd_core::model::{build_hamiltonian, ModelSpec, Topology};
use dqd_core::solver::{diagonalize_dense, ground_state_iterative, DEFAULT_DENSE_CAP};
use nalgebra::DMatrix;

/// Cyclic Jacobi eigenvalues, written without reference to the production
/// path so the two can serve as oracles for each other.
fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let scale = a.norm().max(1.0);
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[(p, q)].abs() <= 1e-300 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[test]
fn production_spectra_match_jacobi_on_all_small_sectors() {
    let spec = ModelSpec {
        b_field: 0.04,
        ..ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 1)
    };
    for key in all_sector_keys(spec.sites()) {
        let basis = enumerate_sector(key.sites, key.particles, key.two_sz).unwrap();
        let m = build_hamiltonian(&spec, &basis).unwrap();
        let dense = m.to_dense();
        let spectrum = diagonalize_dense(&m, DEFAULT_DENSE_CAP).unwrap();
        let reference = jacobi_eigenvalues(&dense);
        let scale = dense.norm().max(1.0);
        for (x, y) in spectrum.energies.iter().zip(&reference) {
            assert!((x - y).abs() <= 1e-12 * scale, "sector {key:?}: {x} vs {y}");
        }
        for (e, v) in spectrum.energies.iter().zip(&spectrum.states) {
            let r = (&dense * v - v * *e).norm();
            assert!(r <= 1e-12 * scale, "sector {key:?} residual {r}");
        }
    }
}

#[test]
fn lanczos_matches_dense_on_a_large_half_filled_sector() {
    // Eight sites (series, two dots, three lead sites per side): the
    // (N = 8, 2 S_z = 4) sector has dimension 28 * 28 = 784.
    let spec = ModelSpec::half_filled(Topology::Series, 0.1, 0.4, 0.2, 3);
    let basis = enumerate_sector(spec.sites(), 8, 4).unwrap();
    assert_eq!(basis.dim(), 784);
    let m = build_hamiltonian(&spec, &basis).unwrap();

    let dense = diagonalize_dense(&m, DEFAULT_DENSE_CAP).unwrap();
    let (e0, v0) = ground_state_iterative(&m, 1e-10).unwrap();
    assert!(
        (e0 - dense.ground_energy()).abs() <= 1e-9,
        "iterative {} vs dense {}",
        e0,
        dense.ground_energy()
    );
    let h = m.to_dense();
    let r = (&h * &v0 - &v0 * e0).norm();
    assert!(r <= 1e-9, "residual {r}");
}
