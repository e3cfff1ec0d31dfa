//! Occupation-number states and sector bases for spinful fermions on a chain.
//!
//! A state is a bitmask over flattened orbitals, `orbital = 2*site + spin`
//! with spin up = 0 and spin down = 1, so the two orbitals of a site sit in
//! adjacent bits. Creation and annihilation carry the fermionic sign
//! `(-1)^(number of occupied orbitals below the target)`.

use crate::error::{Error, Result};

/// Largest supported site count; 2 orbitals per site must fit in a `u64`
/// with room to spare, and dense work is hopeless far below this anyway.
pub const MAX_SITES: usize = 16;

/// Electron spin projection.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// One spin-orbital, addressed by lattice site and spin.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitalIndex {
    pub site: usize,
    pub spin: Spin,
}

impl OrbitalIndex {
    pub fn new(site: usize, spin: Spin) -> Self {
        OrbitalIndex { site, spin }
    }

    /// Position of this orbital in the flattened bitmask.
    pub fn flat(self) -> usize {
        2 * self.site
            + match self.spin {
                Spin::Up => 0,
                Spin::Down => 1,
            }
    }
}

/// A many-body basis state: bit `k` set means flattened orbital `k` is
/// occupied.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState(pub u64);

impl FockState {
    pub const EMPTY: FockState = FockState(0);

    pub fn occupied(self, orb: OrbitalIndex) -> bool {
        self.0 >> orb.flat() & 1 == 1
    }

    pub fn particle_count(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of spin-up electrons (even bits).
    pub fn n_up(self) -> u32 {
        (self.0 & UP_BITS).count_ones()
    }

    /// Number of spin-down electrons (odd bits).
    pub fn n_down(self) -> u32 {
        (self.0 & !UP_BITS).count_ones()
    }

    /// Twice the total spin projection, `N_up - N_down`.
    pub fn two_sz(self) -> i32 {
        self.n_up() as i32 - self.n_down() as i32
    }
}

const UP_BITS: u64 = 0x5555_5555_5555_5555;

/// Apply `c^dag_orb`. Returns the new state and the fermionic sign, or
/// `None` when the orbital is already occupied.
pub fn apply_creation(state: FockState, orb: OrbitalIndex) -> Option<(FockState, f64)> {
    let bit = 1u64 << orb.flat();
    if state.0 & bit != 0 {
        return None;
    }
    Some((FockState(state.0 | bit), parity_below(state, bit)))
}

/// Apply `c_orb`. Returns the new state and the fermionic sign, or `None`
/// when the orbital is empty.
pub fn apply_annihilation(state: FockState, orb: OrbitalIndex) -> Option<(FockState, f64)> {
    let bit = 1u64 << orb.flat();
    if state.0 & bit == 0 {
        return None;
    }
    Some((FockState(state.0 & !bit), parity_below(state, bit)))
}

fn parity_below(state: FockState, bit: u64) -> f64 {
    if (state.0 & (bit - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Label of one `(N, S_z)` symmetry sector on a fixed lattice.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorKey {
    pub sites: usize,
    pub particles: u32,
    /// Twice the spin projection, kept integral.
    pub two_sz: i32,
}

impl SectorKey {
    pub fn n_up(&self) -> Option<u32> {
        let twice = self.particles as i64 + self.two_sz as i64;
        if twice < 0 || twice % 2 != 0 {
            None
        } else {
            Some((twice / 2) as u32)
        }
    }

    pub fn n_down(&self) -> Option<u32> {
        let twice = self.particles as i64 - self.two_sz as i64;
        if twice < 0 || twice % 2 != 0 {
            None
        } else {
            Some((twice / 2) as u32)
        }
    }
}

/// Ordered basis of one symmetry sector. States are sorted by the integer
/// value of their bitmask, which makes lookup a binary search.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    key: SectorKey,
    states: Vec<FockState>,
}

impl SectorBasis {
    pub fn key(&self) -> SectorKey {
        self.key
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, k: usize) -> FockState {
        self.states[k]
    }

    /// Position of `state` in this basis, if it belongs to the sector.
    pub fn index_of(&self, state: FockState) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }
}

/// Enumerate the basis of sector `(N, S_z)` on `sites` sites.
///
/// A combination of `(particles, two_sz)` that cannot be realized (parity
/// mismatch or more electrons of one spin than sites) yields an empty
/// basis; only an unsupported site count is an error.
pub fn enumerate_sector(sites: usize, particles: u32, two_sz: i32) -> Result<SectorBasis> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::SiteCountOutOfRange(sites));
    }
    let key = SectorKey {
        sites,
        particles,
        two_sz,
    };
    let (n_up, n_down) = match (key.n_up(), key.n_down()) {
        (Some(u), Some(d)) if u as usize <= sites && d as usize <= sites => (u, d),
        _ => {
            return Ok(SectorBasis {
                key,
                states: Vec::new(),
            })
        }
    };
    let ups = bit_combinations(sites, n_up);
    let downs = bit_combinations(sites, n_down);
    let mut states = Vec::with_capacity(ups.len() * downs.len());
    for &up in &ups {
        for &down in &downs {
            states.push(FockState(spread(up, 0) | spread(down, 1)));
        }
    }
    states.sort_unstable();
    Ok(SectorBasis { key, states })
}

/// All sector keys of a lattice, every one of which is non-empty.
pub fn all_sector_keys(sites: usize) -> Vec<SectorKey> {
    let mut keys = Vec::new();
    for n_up in 0..=sites as u32 {
        for n_down in 0..=sites as u32 {
            keys.push(SectorKey {
                sites,
                particles: n_up + n_down,
                two_sz: n_up as i32 - n_down as i32,
            });
        }
    }
    keys.sort_unstable();
    keys
}

/// All `k`-bit subsets of the low `n` bits, ascending. Gosper's hack.
fn bit_combinations(n: usize, k: u32) -> Vec<u64> {
    if k as usize > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut masks = Vec::new();
    let mut v = (1u64 << k) - 1;
    while v < limit {
        masks.push(v);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & t.wrapping_add(1)) - 1) >> (v.trailing_zeros() + 1));
    }
    masks
}

/// Map site-indexed bits to flattened orbital bits: site bit `i` goes to
/// orbital bit `2i + offset`.
fn spread(site_mask: u64, offset: u32) -> u64 {
    let mut out = 0u64;
    let mut m = site_mask;
    while m != 0 {
        let i = m.trailing_zeros();
        out |= 1u64 << (2 * i + offset);
        m &= m - 1;
    }
    out
}
