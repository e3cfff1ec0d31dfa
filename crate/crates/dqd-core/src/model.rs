//! The two-impurity Anderson model on finite tight-binding leads, and the
//! derived single-particle scales (hybridization width, exchange).
//!
//! Site layout on a chain of `L = 2 + 2*lead_len` sites: left lead
//! `0..lead_len`, dot A at `lead_len`, dot B at `lead_len + 1`, right lead
//! after that. Both leads have the same length; dots carry `U`, `eps_d` and
//! the Zeeman shift `+B * S_z`, leads are non-interacting with hopping `t0`.

use crate::error::{Error, Result};
use crate::fock::{
    apply_annihilation, apply_creation, OrbitalIndex, SectorBasis, SectorKey, Spin, MAX_SITES,
};
use crate::sparse::CsrMatrix;
use nalgebra::DMatrix;

/// How the two dots are wired to the leads. The four bond slots are
/// (left-A, right-A, left-B, right-B), each connecting a dot to the lead
/// site adjacent to the dot block.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Topology {
    /// left - A - B - right; the interdot bond is the only path.
    Series,
    /// Both leads attach to dot A; dot B hangs off A via `t` only.
    SideCoupled,
    /// Both dots attach to both leads.
    Parallel,
    /// Explicit amplitudes for the four dot-lead bonds.
    Custom {
        left_a: f64,
        right_a: f64,
        left_b: f64,
        right_b: f64,
    },
}

impl Topology {
    /// Amplitudes of the four dot-lead bonds given the common coupling.
    pub fn bond_amplitudes(&self, t_prime: f64) -> [f64; 4] {
        match *self {
            Topology::Series => [t_prime, 0.0, 0.0, t_prime],
            Topology::SideCoupled => [t_prime, t_prime, 0.0, 0.0],
            Topology::Parallel => [t_prime; 4],
            Topology::Custom {
                left_a,
                right_a,
                left_b,
                right_b,
            } => [left_a, right_a, left_b, right_b],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Topology::Series => "series",
            Topology::SideCoupled => "side_coupled",
            Topology::Parallel => "parallel",
            Topology::Custom { .. } => "custom",
        }
    }
}

/// Full parameter set of one model instance.
#[derive(Copy, Clone, Debug)]
pub struct ModelSpec {
    pub topology: Topology,
    /// Interdot hopping.
    pub t: f64,
    /// On-dot Coulomb repulsion.
    pub u: f64,
    /// Dot-lead coupling fed through the topology's bond map.
    pub t_prime: f64,
    /// Hopping inside each lead; the half bandwidth is `2 t0`.
    pub t0: f64,
    /// Sites per lead.
    pub lead_len: usize,
    /// Dot level position; `-U/2` puts the model at the particle-hole
    /// symmetric point.
    pub eps_d: f64,
    /// Magnetic field on the dots, entering as `+B (S^z_A + S^z_B)` so the
    /// `S_z = -1` triplet component is favored for `B > 0`.
    pub b_field: f64,
    /// Ensemble temperature (k_B = 1).
    pub temperature: f64,
}

impl ModelSpec {
    /// A spec at the particle-hole symmetric point `eps_d = -U/2`.
    pub fn half_filled(topology: Topology, t: f64, u: f64, t_prime: f64, lead_len: usize) -> Self {
        ModelSpec {
            topology,
            t,
            u,
            t_prime,
            t0: 1.0,
            lead_len,
            eps_d: -0.5 * u,
            b_field: 0.0,
            temperature: 0.0,
        }
    }

    pub fn sites(&self) -> usize {
        2 + 2 * self.lead_len
    }

    pub fn dot_a(&self) -> usize {
        self.lead_len
    }

    pub fn dot_b(&self) -> usize {
        self.lead_len + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites() > MAX_SITES {
            return Err(Error::SiteCountOutOfRange(self.sites()));
        }
        if !(self.u >= 0.0) {
            return Err(Error::InvalidParameter(format!("u = {} must be >= 0", self.u)));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "temperature = {} must be >= 0",
                self.temperature
            )));
        }
        if self.lead_len > 0 && !(self.t0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t0 = {} must be > 0 when leads are present",
                self.t0
            )));
        }
        for v in [self.t, self.t_prime, self.eps_d, self.b_field] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter("non-finite parameter".into()));
            }
        }
        Ok(())
    }

    /// Every hopping bond `(i, j, amplitude)`; the Hamiltonian gets
    /// `-amplitude * (c^dag_i c_j + h.c.)` per spin. Zero-amplitude bonds
    /// are dropped.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let l = self.lead_len;
        let mut out = Vec::new();
        // Chains inside each lead.
        for i in 0..l.saturating_sub(1) {
            out.push((i, i + 1, self.t0));
            out.push((l + 2 + i, l + 2 + i + 1, self.t0));
        }
        // Interdot bond.
        if self.t != 0.0 {
            out.push((self.dot_a(), self.dot_b(), self.t));
        }
        // Dot-lead bonds; the lead sites adjacent to the dot block.
        if l > 0 {
            let left_edge = l - 1;
            let right_edge = l + 2;
            let [la, ra, lb, rb] = self.topology.bond_amplitudes(self.t_prime);
            for (i, j, amp) in [
                (left_edge, self.dot_a(), la),
                (right_edge, self.dot_a(), ra),
                (left_edge, self.dot_b(), lb),
                (right_edge, self.dot_b(), rb),
            ] {
                if amp != 0.0 {
                    out.push((i, j, amp));
                }
            }
        }
        out
    }
}

/// Hamiltonian of one symmetry sector in triplet form. Real symmetric by
/// construction: both directions of every hop are emitted explicitly.
#[derive(Clone, Debug)]
pub struct SectorMatrix {
    key: SectorKey,
    dim: usize,
    triplets: Vec<(u32, u32, f64)>,
}

impl SectorMatrix {
    pub fn key(&self) -> SectorKey {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triplets(&self) -> &[(u32, u32, f64)] {
        &self.triplets
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.dim, &self.triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.triplets {
            m[(r as usize, c as usize)] += v;
        }
        m
    }
}

/// Build the Hamiltonian of `spec` restricted to the sector spanned by
/// `basis`. Hopping enters with a global minus sign; diagonal terms are
/// `U n_up n_down + eps_d n + (B/2)(n_up - n_down)` on the two dots.
pub fn build_hamiltonian(spec: &ModelSpec, basis: &SectorBasis) -> Result<SectorMatrix> {
    spec.validate()?;
    if basis.key().sites != spec.sites() {
        return Err(Error::SectorSpecMismatch {
            basis: basis.key().sites,
            model: spec.sites(),
        });
    }
    let dim = basis.dim();
    let bonds = spec.bonds();
    let mut triplets: Vec<(u32, u32, f64)> = Vec::new();

    for col in 0..dim {
        let state = basis.state(col);
        let mut diag = 0.0;
        for dot in [spec.dot_a(), spec.dot_b()] {
            let up = state.occupied(OrbitalIndex::new(dot, Spin::Up));
            let down = state.occupied(OrbitalIndex::new(dot, Spin::Down));
            if up && down {
                diag += spec.u;
            }
            let n = up as u32 + down as u32;
            diag += spec.eps_d * n as f64;
            diag += 0.5 * spec.b_field * (up as i32 - down as i32) as f64;
        }
        if diag != 0.0 {
            triplets.push((col as u32, col as u32, diag));
        }

        for &(i, j, amp) in &bonds {
            for spin in [Spin::Up, Spin::Down] {
                // -amp * (c^dag_i c_j + c^dag_j c_i), each direction applied
                // annihilation first.
                for (from, to) in [(j, i), (i, j)] {
                    if let Some((mid, s1)) =
                        apply_annihilation(state, OrbitalIndex::new(from, spin))
                    {
                        if let Some((fin, s2)) = apply_creation(mid, OrbitalIndex::new(to, spin)) {
                            let row = basis
                                .index_of(fin)
                                .expect("hopping conserves (N, S_z) so the image stays in-sector");
                            triplets.push((row as u32, col as u32, -amp * s1 * s2));
                        }
                    }
                }
            }
        }
    }

    Ok(SectorMatrix {
        key: basis.key(),
        dim,
        triplets,
    })
}

/// Hybridization width `Gamma = sum over attached bonds of t_bond^2 / t0`
/// for each dot separately.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct HybridizationWidth {
    pub dot_a: f64,
    pub dot_b: f64,
}

impl HybridizationWidth {
    /// The single number quoted for the named geometries: the larger of
    /// the two per-dot widths (they coincide for series and parallel).
    pub fn value(&self) -> f64 {
        self.dot_a.max(self.dot_b)
    }
}

/// Per-dot hybridization width of the model wiring. Requires `t0 > 0`.
pub fn hybridization_width(spec: &ModelSpec) -> Result<HybridizationWidth> {
    if !(spec.t0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t0 = {} must be > 0 to define a hybridization width",
            spec.t0
        )));
    }
    let [la, ra, lb, rb] = spec.topology.bond_amplitudes(spec.t_prime);
    Ok(HybridizationWidth {
        dot_a: (la * la + ra * ra) / spec.t0,
        dot_b: (lb * lb + rb * rb) / spec.t0,
    })
}

/// Interdot exchange scales of the isolated dimer.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ExchangeScales {
    /// Superexchange `J = 4 t^2 / U`; `None` in the splitting-only mode
    /// `U = 0` where the quotient is undefined.
    pub j: Option<f64>,
    /// Exact singlet-triplet splitting of the two-site Hubbard dimer,
    /// `(sqrt(U^2 + 16 t^2) - U) / 2`.
    pub singlet_triplet_splitting: f64,
}

/// Exchange coupling and exact singlet-triplet splitting for the model
/// `(t, U)`.
pub fn effective_exchange(spec: &ModelSpec) -> ExchangeScales {
    let t = spec.t;
    let u = spec.u;
    let delta = 0.5 * ((u * u + 16.0 * t * t).sqrt() - u);
    let j = if u > 0.0 { Some(4.0 * t * t / u) } else { None };
    ExchangeScales {
        j,
        singlet_triplet_splitting: delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_sector;
    use approx::assert_relative_eq;

    #[test]
    fn site_layout() {
        let spec = ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 2);
        assert_eq!(spec.sites(), 6);
        assert_eq!(spec.dot_a(), 2);
        assert_eq!(spec.dot_b(), 3);
    }

    #[test]
    fn series_bond_map() {
        let spec = ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 1);
        let bonds = spec.bonds();
        // Interdot + two dot-lead bonds; no intra-lead bonds at length 1.
        assert_eq!(bonds.len(), 3);
        assert!(bonds.contains(&(1, 2, 0.1)));
        assert!(bonds.contains(&(0, 1, 0.2)));
        assert!(bonds.contains(&(3, 2, 0.2)) || bonds.contains(&(2, 3, 0.2)));
    }

    #[test]
    fn side_coupled_leaves_dot_b_dangling() {
        let spec = ModelSpec::half_filled(Topology::SideCoupled, 0.1, 1.0, 0.2, 1);
        for (i, j, _) in spec.bonds() {
            let touches_b = i == spec.dot_b() || j == spec.dot_b();
            if touches_b {
                // Only the interdot bond may reach dot B.
                assert!(
                    (i, j) == (spec.dot_a(), spec.dot_b()) || (j, i) == (spec.dot_a(), spec.dot_b())
                );
            }
        }
    }

    #[test]
    fn hermitian_in_every_sector() {
        let spec = ModelSpec {
            b_field: 0.3,
            ..ModelSpec::half_filled(Topology::Parallel, 0.13, 0.9, 0.21, 1)
        };
        for key in crate::fock::all_sector_keys(spec.sites()) {
            let basis = enumerate_sector(key.sites, key.particles, key.two_sz).unwrap();
            let h = build_hamiltonian(&spec, &basis).unwrap().to_dense();
            assert_relative_eq!(h, h.transpose(), epsilon = 0.0);
        }
    }

    #[test]
    fn single_particle_dimer_eigenvalues() {
        // Isolated dimer, U = 0, eps_d = 0, t = 1: the (N=1, Sz=+1/2)
        // block is the 2x2 hopping matrix with eigenvalues -t and +t.
        let spec = ModelSpec {
            eps_d: 0.0,
            ..ModelSpec::half_filled(Topology::Series, 1.0, 0.0, 0.0, 0)
        };
        let basis = enumerate_sector(2, 1, 1).unwrap();
        let h = build_hamiltonian(&spec, &basis).unwrap().to_dense();
        let (ev, _) = crate::eigen::symmetric_eigen_dense(&h);
        assert_relative_eq!(ev[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zeeman_favors_down_polarized_dots() {
        // B > 0 must raise the energy of the up-polarized dot pair.
        let spec = ModelSpec {
            b_field: 0.5,
            t: 0.0,
            ..ModelSpec::half_filled(Topology::Series, 0.0, 1.0, 0.0, 0)
        };
        let up = enumerate_sector(2, 2, 2).unwrap();
        let down = enumerate_sector(2, 2, -2).unwrap();
        let e_up = build_hamiltonian(&spec, &up).unwrap().to_dense()[(0, 0)];
        let e_down = build_hamiltonian(&spec, &down).unwrap().to_dense()[(0, 0)];
        assert_relative_eq!(e_up - e_down, 1.0, epsilon = 1e-12);
        assert!(e_down < e_up);
    }

    #[test]
    fn hybridization_widths_per_topology() {
        let t_prime = 1.0 / 20f64.sqrt();
        let mut spec = ModelSpec::half_filled(Topology::Series, 0.1, 0.4, t_prime, 2);
        assert_relative_eq!(
            hybridization_width(&spec).unwrap().value(),
            0.05,
            epsilon = 1e-15
        );
        spec.topology = Topology::SideCoupled;
        let w = hybridization_width(&spec).unwrap();
        assert_relative_eq!(w.dot_a, 0.1, epsilon = 1e-15);
        assert_eq!(w.dot_b, 0.0);
        assert_relative_eq!(w.value(), 0.1, epsilon = 1e-15);
        spec.topology = Topology::Parallel;
        let w = hybridization_width(&spec).unwrap();
        assert_relative_eq!(w.dot_a, 0.1, epsilon = 1e-15);
        assert_relative_eq!(w.dot_b, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn exchange_scales() {
        let spec = ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.0, 0);
        let ex = effective_exchange(&spec);
        assert_relative_eq!(ex.j.unwrap(), 0.04, epsilon = 1e-15);
        assert_relative_eq!(
            ex.singlet_triplet_splitting,
            0.5 * (1.16f64.sqrt() - 1.0),
            epsilon = 1e-15
        );
        // U = 0: splitting-only mode, exact value 2t.
        let free = ModelSpec::half_filled(Topology::Series, 0.1, 0.0, 0.0, 0);
        let ex = effective_exchange(&free);
        assert!(ex.j.is_none());
        assert_relative_eq!(ex.singlet_triplet_splitting, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn oversized_or_bad_specs_rejected() {
        let spec = ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 8);
        assert!(matches!(
            spec.validate(),
            Err(Error::SiteCountOutOfRange(18))
        ));
        let spec = ModelSpec {
            u: -1.0,
            ..ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 1)
        };
        assert!(spec.validate().is_err());
        let spec = ModelSpec {
            t0: 0.0,
            ..ModelSpec::half_filled(Topology::Series, 0.1, 1.0, 0.2, 1)
        };
        assert!(spec.validate().is_err());
        assert!(hybridization_width(&spec).is_err());
    }
}
