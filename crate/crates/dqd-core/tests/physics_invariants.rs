//! Model-level invariants that hold across geometries and temperatures:
//! particle-hole symmetry of half-filled bipartite lattices, the spectrum
//! reflection it implies, axial selection rules at zero field, and the
//! Heisenberg-limit form of the antiparallel channel.

use dqd_core::eigen::symmetric_eigen_dense;
use dqd_core::fock::enumerate_sector;
use dqd_core::model::{build_hamiltonian, ModelSpec, Topology};
use dqd_core::pipeline::{solve, SolveOptions};

/// Half-filled specs whose lattice graph is bipartite, so the
/// particle-hole-plus-spin-flip map is a symmetry even at nonzero field.
/// The parallel geometry closes a three-site loop unless the interdot
/// hopping vanishes, hence `t = 0` there.
fn symmetric_specs() -> Vec<ModelSpec> {
    vec![
        ModelSpec {
            b_field: 0.08,
            temperature: 0.21,
            ..ModelSpec::half_filled(Topology::Series, 0.17, 0.9, 0.33, 2)
        },
        ModelSpec {
            b_field: 0.08,
            ..ModelSpec::half_filled(Topology::Series, 0.17, 0.9, 0.33, 2)
        },
        ModelSpec {
            temperature: 0.15,
            ..ModelSpec::half_filled(Topology::SideCoupled, 0.2, 1.1, 0.4, 1)
        },
        ModelSpec {
            b_field: 0.05,
            temperature: 0.1,
            ..ModelSpec::half_filled(Topology::Parallel, 0.0, 0.8, 0.3, 1)
        },
    ]
}

#[test]
fn half_filled_symmetric_specs_pin_dot_occupancy_to_one() {
    for spec in symmetric_specs() {
        let point = solve(&spec, &SolveOptions::default()).unwrap();
        assert!(
            (point.correlators.n_a - 1.0).abs() <= 1e-10,
            "n_A = {} for {:?}",
            point.correlators.n_a,
            spec.topology
        );
        assert!(
            (point.correlators.n_b - 1.0).abs() <= 1e-10,
            "n_B = {} for {:?}",
            point.correlators.n_b,
            spec.topology
        );
    }
}

#[test]
fn particle_hole_map_reflects_sector_spectra() {
    // The map sends (N, S_z) to (2 L - N, S_z) and preserves the energy
    // multiset for half-filled bipartite specs, field included.
    let spec = ModelSpec {
        b_field: 0.07,
        ..ModelSpec::half_filled(Topology::Series, 0.15, 1.0, 0.3, 1)
    };
    let sites = spec.sites();
    let total = 2 * sites as u32;
    for n in 0..=total {
        let max_sz = n.min(total - n) as i32;
        let mut two_sz = -max_sz;
        while two_sz <= max_sz {
            let basis = enumerate_sector(sites, n, two_sz).unwrap();
            let partner = enumerate_sector(sites, total - n, two_sz).unwrap();
            if basis.dim() == 0 {
                two_sz += 2;
                continue;
            }
            assert_eq!(basis.dim(), partner.dim());
            let h_a = build_hamiltonian(&spec, &basis).unwrap().to_dense();
            let h_b = build_hamiltonian(&spec, &partner).unwrap().to_dense();
            let (ev_a, _) = symmetric_eigen_dense(&h_a);
            let (ev_b, _) = symmetric_eigen_dense(&h_b);
            for (x, y) in ev_a.iter().zip(&ev_b) {
                assert!(
                    (x - y).abs() <= 1e-10,
                    "sector ({n},{two_sz}): {x} vs {y}"
                );
            }
            two_sz += 2;
        }
    }
}

#[test]
fn zero_field_selection_rules_hold_in_all_geometries() {
    for topology in [Topology::Series, Topology::SideCoupled, Topology::Parallel] {
        let spec = ModelSpec {
            temperature: 0.15,
            ..ModelSpec::half_filled(topology, 0.2, 0.8, 1.0 / 20f64.sqrt(), 2)
        };
        let point = solve(&spec, &SolveOptions::default()).unwrap();
        // Sector-diagonal ensembles cannot sustain a double spin raise.
        assert!(
            point.correlators.s_plus_plus.abs() <= 1e-14,
            "{topology:?}: <S+S+> = {}",
            point.correlators.s_plus_plus
        );
        // Spin-flip symmetry at B = 0.
        let diff = (point.correlators.p[0][1] - point.correlators.p[1][0]).abs();
        assert!(diff <= 1e-12, "{topology:?}: p updown asymmetry {diff}");
    }
}

#[test]
fn entanglement_dies_when_temperature_or_field_dominates_the_exchange() {
    // Isolated pair with J fixed: on a 5x5 grid of (T, B) where
    // max(T, B) >= 2 J, the thermal or field suppression has won and the
    // concurrence must be exactly zero.
    let base = ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.0, 0);
    let j = 4.0 * base.t * base.t / base.u;
    let scales = [2.0, 3.5, 5.0, 8.0, 12.0];
    for &st in &scales {
        for &sb in &scales {
            let spec = ModelSpec {
                temperature: st * j,
                b_field: sb * j,
                ..base
            };
            let point = solve(&spec, &SolveOptions::default()).unwrap();
            assert_eq!(
                point.report.concurrence, 0.0,
                "C > 0 at T = {} J, B = {} J",
                st, sb
            );
        }
    }
    // Control: with both scales well below J the pair stays entangled.
    let spec = ModelSpec {
        temperature: 0.05 * j,
        b_field: 0.05 * j,
        ..base
    };
    let point = solve(&spec, &SolveOptions::default()).unwrap();
    assert!(point.report.concurrence > 0.5);
}

#[test]
fn antiparallel_channel_approaches_heisenberg_form_at_strong_coupling() {
    // With every site singly occupied and full rotational symmetry the
    // antiparallel channel reduces to 2(-<S_A.S_B> - 1/4); the residual is
    // controlled by the charge fluctuations on the dots.
    for temperature in [0.0, 0.04] {
        let spec = ModelSpec {
            temperature,
            ..ModelSpec::half_filled(Topology::Series, 0.4, 8.0, 0.3, 1)
        };
        let point = solve(&spec, &SolveOptions::default()).unwrap();
        let heisenberg = 2.0 * (-point.correlators.spin_dot - 0.25);
        let residual = (point.report.c_antiparallel - heisenberg).abs();
        let bound = 5.0 * point.correlators.dn2_a + 1e-12;
        assert!(
            residual <= bound,
            "T = {temperature}: residual {residual} exceeds {bound}"
        );
    }
}
