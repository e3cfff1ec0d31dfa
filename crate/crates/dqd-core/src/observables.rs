//! Thermal expectation values of dot operators, taken two ways: directly in
//! the sector Fock bases, and through the reduced density matrix of the two
//! dots obtained by a fermionic partial trace over the leads.
//!
//! The reduced matrix lives in the 16-dimensional product basis
//! `|a> (x) |b>` with local states ordered `{empty, up, down, updown}` and
//! index `4*a + b`; the doubly occupied local state is `c^dag_up c^dag_down
//! |0>`. Everything here is real: the Hamiltonian is real symmetric, so
//! eigenvectors and all matrix elements below are real.

use crate::error::{Error, Result};
use crate::fock::{apply_annihilation, apply_creation, OrbitalIndex, SectorBasis, Spin};
use crate::model::ModelSpec;
use crate::solver::{SectorSet, ThermalEnsemble};
use nalgebra::{DMatrix, DVector, Matrix4, SMatrix};
use std::collections::BTreeMap;

/// One creation or annihilation factor of a normal-ordered product.
#[derive(Copy, Clone, Debug)]
pub enum Factor {
    Create(OrbitalIndex),
    Annihilate(OrbitalIndex),
}

impl Factor {
    fn site(&self) -> usize {
        match self {
            Factor::Create(o) | Factor::Annihilate(o) => o.site,
        }
    }
}

/// A product of fermionic factors with a scalar coefficient. Factors are
/// stored in written (left-to-right) order and applied right first.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub coeff: f64,
    pub factors: Vec<Factor>,
}

/// A sum of monomials.
#[derive(Clone, Debug, Default)]
pub struct Operator {
    terms: Vec<Monomial>,
}

impl Operator {
    pub fn new() -> Self {
        Operator { terms: Vec::new() }
    }

    pub fn monomial(coeff: f64, factors: Vec<Factor>) -> Self {
        Operator {
            terms: vec![Monomial { coeff, factors }],
        }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn plus(mut self, other: Operator) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, k: f64) -> Self {
        for m in &mut self.terms {
            m.coeff *= k;
        }
        self
    }

    /// Operator product: `self * other`, with `other` acting first.
    pub fn times(&self, other: &Operator) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().copied());
                terms.push(Monomial {
                    coeff: a.coeff * b.coeff,
                    factors,
                });
            }
        }
        Operator { terms }
    }

    /// Number operator `n_{site,spin}`.
    pub fn number(site: usize, spin: Spin) -> Self {
        let o = OrbitalIndex::new(site, spin);
        Operator::monomial(1.0, vec![Factor::Create(o), Factor::Annihilate(o)])
    }

    /// Charge `n_site = n_up + n_down`.
    pub fn occupancy(site: usize) -> Self {
        Operator::number(site, Spin::Up).plus(Operator::number(site, Spin::Down))
    }

    /// Spin raising `S^+ = c^dag_up c_down`.
    pub fn spin_raise(site: usize) -> Self {
        Operator::monomial(
            1.0,
            vec![
                Factor::Create(OrbitalIndex::new(site, Spin::Up)),
                Factor::Annihilate(OrbitalIndex::new(site, Spin::Down)),
            ],
        )
    }

    /// Spin lowering `S^- = c^dag_down c_up`.
    pub fn spin_lower(site: usize) -> Self {
        Operator::monomial(
            1.0,
            vec![
                Factor::Create(OrbitalIndex::new(site, Spin::Down)),
                Factor::Annihilate(OrbitalIndex::new(site, Spin::Up)),
            ],
        )
    }

    /// `S^z = (n_up - n_down) / 2`.
    pub fn spin_z(site: usize) -> Self {
        Operator::number(site, Spin::Up)
            .scaled(0.5)
            .plus(Operator::number(site, Spin::Down).scaled(-0.5))
    }

    /// Single-occupancy projector `P^s = n_s (1 - n_{-s})`.
    pub fn single_occupancy(site: usize, spin: Spin) -> Self {
        let n_s = Operator::number(site, spin);
        let n_other = Operator::number(site, spin.flip());
        let cross = n_s.times(&n_other).scaled(-1.0);
        n_s.plus(cross)
    }

    fn max_site(&self) -> Option<usize> {
        self.terms
            .iter()
            .flat_map(|m| m.factors.iter().map(Factor::site))
            .max()
    }

    /// `<v| self |v>` for a vector over `basis`. Monomials whose image
    /// leaves the sector contribute nothing.
    pub fn expectation_state(&self, basis: &SectorBasis, v: &DVector<f64>) -> Result<f64> {
        let sites = basis.key().sites;
        if let Some(m) = self.max_site() {
            if m >= sites {
                return Err(Error::OrbitalOutOfRange { site: m, sites });
            }
        }
        let mut acc = 0.0;
        for m in &self.terms {
            for j in 0..basis.dim() {
                let amp = v[j];
                if amp == 0.0 {
                    continue;
                }
                let mut state = basis.state(j);
                let mut sign = 1.0;
                let mut alive = true;
                for f in m.factors.iter().rev() {
                    let step = match f {
                        Factor::Create(o) => apply_creation(state, *o),
                        Factor::Annihilate(o) => apply_annihilation(state, *o),
                    };
                    match step {
                        Some((s, sg)) => {
                            state = s;
                            sign *= sg;
                        }
                        None => {
                            alive = false;
                            break;
                        }
                    }
                }
                if !alive {
                    continue;
                }
                if let Some(k) = basis.index_of(state) {
                    acc += m.coeff * sign * v[k] * amp;
                }
            }
        }
        Ok(acc)
    }
}

/// Weighted expectation over a thermal ensemble.
pub fn ensemble_expectation(
    op: &Operator,
    ensemble: &ThermalEnsemble,
    sectors: &SectorSet,
) -> Result<f64> {
    let mut total = 0.0;
    for entry in &ensemble.entries {
        let solved = sectors.get(entry.sector).ok_or(Error::MissingSector {
            particles: entry.sector.particles,
            two_sz: entry.sector.two_sz,
        })?;
        let v = &solved.spectrum.states[entry.state];
        total += entry.weight * op.expectation_state(&solved.basis, v)?;
    }
    Ok(total)
}

/// The dot-dot correlators the concurrence formula consumes, plus charge
/// diagnostics. All entries are real; the model has no complex couplings.
#[derive(Copy, Clone, Debug)]
pub struct CorrelatorSet {
    /// `<S^+_A S^-_B>`.
    pub s_plus_minus: f64,
    /// `<S^+_A S^+_B>`; nonzero only if the ensemble mixed different
    /// `S_z` sectors coherently, so it vanishes identically here.
    pub s_plus_plus: f64,
    /// `p[a][b] = <P^a_A P^b_B>` with 0 = up, 1 = down.
    pub p: [[f64; 2]; 2],
    /// `<S_A . S_B>`.
    pub spin_dot: f64,
    /// Charge fluctuation `<n_A^2> - <n_A>^2` on dot A.
    pub dn2_a: f64,
    pub n_a: f64,
    pub n_b: f64,
}

impl CorrelatorSet {
    /// Probability of antiparallel singly-occupied dots.
    pub fn p_antiparallel(&self) -> f64 {
        self.p[0][1] + self.p[1][0]
    }

    /// Probability of parallel singly-occupied dots.
    pub fn p_parallel(&self) -> f64 {
        self.p[0][0] + self.p[1][1]
    }

    /// Sanity bounds: probabilities in range and coherences within their
    /// Cauchy-Schwarz bounds.
    pub fn validate(&self) -> Result<()> {
        for row in &self.p {
            for &v in row {
                if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(Error::InvalidDensityMatrix {
                        what: "projector probability range",
                        value: v,
                    });
                }
            }
        }
        let total = self.p_antiparallel() + self.p_parallel();
        if total > 1.0 + 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                what: "single-occupancy weight <= 1",
                value: total,
            });
        }
        let cs = (self.p[0][1] * self.p[1][0]).max(0.0).sqrt();
        if self.s_plus_minus.abs() > cs + 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                what: "Cauchy-Schwarz bound on <S+S->",
                value: self.s_plus_minus.abs() - cs,
            });
        }
        Ok(())
    }
}

/// Evaluate the full correlator set on an ensemble.
pub fn correlators(
    spec: &ModelSpec,
    ensemble: &ThermalEnsemble,
    sectors: &SectorSet,
) -> Result<CorrelatorSet> {
    let a = spec.dot_a();
    let b = spec.dot_b();
    let ev = |op: &Operator| ensemble_expectation(op, ensemble, sectors);

    let s_plus_minus = ev(&Operator::spin_raise(a).times(&Operator::spin_lower(b)))?;
    let s_minus_plus = ev(&Operator::spin_lower(a).times(&Operator::spin_raise(b)))?;
    let s_plus_plus = ev(&Operator::spin_raise(a).times(&Operator::spin_raise(b)))?;

    let mut p = [[0.0; 2]; 2];
    for (i, sa) in [Spin::Up, Spin::Down].into_iter().enumerate() {
        for (j, sb) in [Spin::Up, Spin::Down].into_iter().enumerate() {
            p[i][j] = ev(&Operator::single_occupancy(a, sa).times(&Operator::single_occupancy(b, sb)))?;
        }
    }

    let zz = ev(&Operator::spin_z(a).times(&Operator::spin_z(b)))?;
    let spin_dot = zz + 0.5 * (s_plus_minus + s_minus_plus);

    let n_a = ev(&Operator::occupancy(a))?;
    let n_b = ev(&Operator::occupancy(b))?;
    let n_a2 = ev(&Operator::occupancy(a).times(&Operator::occupancy(a)))?;
    let dn2_a = n_a2 - n_a * n_a;

    Ok(CorrelatorSet {
        s_plus_minus,
        s_plus_plus,
        p,
        spin_dot,
        dn2_a,
        n_a,
        n_b,
    })
}

/// Reduced density matrix of the two dots in the 16-dimensional local
/// product basis described in the module docs.
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    mat: SMatrix<f64, 16, 16>,
}

impl ReducedDensityMatrix {
    pub fn matrix(&self) -> &SMatrix<f64, 16, 16> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }

    /// Trace, symmetry and positivity checks.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensityMatrix {
                what: "unit trace",
                value: tr - 1.0,
            });
        }
        let asym = (self.mat - self.mat.transpose()).norm();
        if asym > 1e-12 {
            return Err(Error::InvalidDensityMatrix {
                what: "symmetry",
                value: asym,
            });
        }
        let dense = DMatrix::from_fn(16, 16, |r, c| self.mat[(r, c)]);
        let (eigenvalues, _) = crate::eigen::symmetric_eigen_dense(&dense);
        let min_eig = eigenvalues[0];
        if min_eig < -1e-12 {
            return Err(Error::InvalidDensityMatrix {
                what: "positivity",
                value: min_eig,
            });
        }
        Ok(())
    }

    /// `Tr(rho O)` for an operator given in the same 16-dim basis.
    pub fn trace_with(&self, op: &SMatrix<f64, 16, 16>) -> f64 {
        (self.mat * op).trace()
    }

    /// The block over singly-occupied dot states `{up-up, up-down,
    /// down-up, down-down}` and its weight (the block trace). The block is
    /// returned unnormalized.
    pub fn single_occupancy_block(&self) -> (Matrix4<f64>, f64) {
        let idx = [5usize, 6, 9, 10];
        let mut block = Matrix4::zeros();
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                block[(r, c)] = self.mat[(i, j)];
            }
        }
        let weight = block.trace();
        (block, weight)
    }
}

/// Index of a dot's local state from its two occupation bits.
fn local_state(up: bool, down: bool) -> usize {
    up as usize + 2 * (down as usize)
}

/// Fermionic partial trace over the leads.
///
/// Orbitals are reordered to `[A_up, A_down, B_up, B_down, leads...]`; a
/// basis state picks up `(-1)^(n_dot * n_left)` from commuting its occupied
/// dot orbitals past the occupied left-lead orbitals (relative order inside
/// each group is preserved, and right-lead orbitals never cross anything).
pub fn reduced_density_matrix(
    spec: &ModelSpec,
    ensemble: &ThermalEnsemble,
    sectors: &SectorSet,
) -> Result<ReducedDensityMatrix> {
    let shift = 2 * spec.lead_len;
    let low_mask = (1u64 << shift) - 1;
    let mut rho = SMatrix::<f64, 16, 16>::zeros();

    for entry in &ensemble.entries {
        let solved = sectors.get(entry.sector).ok_or(Error::MissingSector {
            particles: entry.sector.particles,
            two_sz: entry.sector.two_sz,
        })?;
        if solved.basis.key().sites != spec.sites() {
            return Err(Error::SectorSpecMismatch {
                basis: solved.basis.key().sites,
                model: spec.sites(),
            });
        }
        let v = &solved.spectrum.states[entry.state];

        // Amplitudes keyed by lead configuration; each value is the signed
        // amplitude vector over the 16 dot configurations.
        let mut by_leads: BTreeMap<u64, [f64; 16]> = BTreeMap::new();
        for j in 0..solved.basis.dim() {
            let amp = v[j];
            if amp == 0.0 {
                continue;
            }
            let mask = solved.basis.state(j).0;
            let dot_bits = (mask >> shift) & 0xF;
            let left = mask & low_mask;
            let leads_key = left | ((mask >> (shift + 4)) << shift);
            let a = local_state(dot_bits & 1 != 0, dot_bits & 2 != 0);
            let b = local_state(dot_bits & 4 != 0, dot_bits & 8 != 0);
            let n_dot = dot_bits.count_ones();
            let n_left = left.count_ones();
            let sign = if (n_dot * n_left) % 2 == 0 { 1.0 } else { -1.0 };
            by_leads.entry(leads_key).or_insert([0.0; 16])[4 * a + b] += sign * amp;
        }
        for dot_amps in by_leads.values() {
            for r in 0..16 {
                if dot_amps[r] == 0.0 {
                    continue;
                }
                for c in 0..16 {
                    rho[(r, c)] += entry.weight * dot_amps[r] * dot_amps[c];
                }
            }
        }
    }

    Ok(ReducedDensityMatrix { mat: rho })
}

/// Matrix of a single-dot operator in the local basis `{0, up, down, both}`.
pub fn local_op_matrix(op: LocalOp) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    match op {
        LocalOp::NumberUp => {
            m[(1, 1)] = 1.0;
            m[(3, 3)] = 1.0;
        }
        LocalOp::NumberDown => {
            m[(2, 2)] = 1.0;
            m[(3, 3)] = 1.0;
        }
        LocalOp::SpinRaise => {
            // c^dag_up c_down sends |down> to |up>; both double and empty
            // occupation are annihilated.
            m[(1, 2)] = 1.0;
        }
        LocalOp::SpinLower => {
            m[(2, 1)] = 1.0;
        }
        LocalOp::ProjectUp => {
            m[(1, 1)] = 1.0;
        }
        LocalOp::ProjectDown => {
            m[(2, 2)] = 1.0;
        }
        LocalOp::Identity => {
            m.fill_with_identity();
        }
    }
    m
}

/// Named single-dot operators used by the audit route.
#[derive(Copy, Clone, Debug)]
pub enum LocalOp {
    NumberUp,
    NumberDown,
    SpinRaise,
    SpinLower,
    ProjectUp,
    ProjectDown,
    Identity,
}

/// `O_A (x) O_B` in the 16-dim basis. Both factors must have even fermion
/// parity for this plain Kronecker product to be the right embedding; all
/// operators offered here do.
pub fn two_dot_op(a: LocalOp, b: LocalOp) -> SMatrix<f64, 16, 16> {
    local_op_matrix(a).kronecker(&local_op_matrix(b))
}
