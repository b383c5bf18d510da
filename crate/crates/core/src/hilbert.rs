//! Finite Hilbert space construction and indexing.
//!
//! Fermions live on vertices with two modes per site (up before down within a
//! site, site-major overall), links carry exactly one boson in one of five
//! modes. Composite states fuse both factors with the fermion index varying
//! slowest, so link-local operators stay block diagonal.

use crate::error::{Error, Result};

/// Lattice boundary condition of the one dimensional chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn as_str(&self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

/// One dimensional lattice geometry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeConfig {
    n_sites: usize,
    boundary: Boundary,
}

impl LatticeConfig {
    pub fn new(n_sites: usize, boundary: Boundary) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::LatticeTooSmall(n_sites));
        }
        Ok(Self { n_sites, boundary })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn n_links(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.n_sites - 1,
            Boundary::Periodic => self.n_sites,
        }
    }

    /// Link `l` connects `l -> l + 1` (mod `n_sites` when periodic).
    pub fn link_endpoints(&self, link: usize) -> Result<(usize, usize)> {
        if link >= self.n_links() {
            return Err(Error::InvalidLink {
                link,
                n_links: self.n_links(),
            });
        }
        Ok((link, (link + 1) % self.n_sites))
    }

    /// The link leaving site `x` in positive direction, if present.
    pub fn right_link_of(&self, x: usize) -> Result<Option<usize>> {
        self.check_site(x)?;
        match self.boundary {
            Boundary::Open if x == self.n_sites - 1 => Ok(None),
            _ => Ok(Some(x)),
        }
    }

    /// The link entering site `x` from the left, if present.
    pub fn left_link_of(&self, x: usize) -> Result<Option<usize>> {
        self.check_site(x)?;
        match self.boundary {
            Boundary::Open if x == 0 => Ok(None),
            Boundary::Open => Ok(Some(x - 1)),
            Boundary::Periodic => Ok(Some((x + self.n_sites - 1) % self.n_sites)),
        }
    }

    pub fn check_site(&self, x: usize) -> Result<()> {
        if x >= self.n_sites {
            Err(Error::InvalidSite {
                site: x,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_link(&self, link: usize) -> Result<()> {
        if link >= self.n_links() {
            Err(Error::InvalidLink {
                link,
                n_links: self.n_links(),
            })
        } else {
            Ok(())
        }
    }
}

/// Fermion spin label; up orders before down within a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(&self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// Row/column of this spin in the 2x2 Pauli block.
    pub fn pauli_index(&self) -> usize {
        self.index()
    }

    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];
}

/// Occupation-number basis of the fermion sector at fixed particle number.
///
/// States are bitmasks over `2 * n_sites` modes, mode `2x` is spin up at
/// site `x`, mode `2x + 1` spin down. The list is sorted ascending by
/// bitstring value and the index map is the inverse of that ordering.
#[derive(Clone, Debug)]
pub struct FermionBasis {
    cfg: LatticeConfig,
    n_fermions: usize,
    states: Vec<u64>,
}

impl FermionBasis {
    pub fn n_sites(&self) -> usize {
        self.cfg.n_sites()
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn n_modes(&self) -> usize {
        2 * self.cfg.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> Result<u64> {
        self.states
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.states.len(),
            })
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn mode_index(x: usize, spin: Spin) -> usize {
        2 * x + spin.index()
    }

    pub fn occupied(state: u64, mode: usize) -> bool {
        (state >> mode) & 1 == 1
    }

    /// Parity of the occupation count on modes `0..mode` (Jordan-Wigner
    /// string in the global mode order).
    pub fn jw_sign(state: u64, mode: usize) -> f64 {
        let mask = (1u64 << mode) - 1;
        if (state & mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }
}

/// `build_fermion_basis`: all occupation bitstrings at the given filling.
pub fn build_fermion_basis(cfg: &LatticeConfig, n_fermions: usize) -> Result<FermionBasis> {
    let n_modes = 2 * cfg.n_sites();
    if n_fermions > n_modes {
        return Err(Error::FillingOutOfRange {
            n_fermions,
            n_modes,
        });
    }
    let mut states = Vec::with_capacity(binomial(n_modes, n_fermions));
    for s in 0u64..(1u64 << n_modes) {
        if s.count_ones() as usize == n_fermions {
            states.push(s);
        }
    }
    Ok(FermionBasis {
        cfg: *cfg,
        n_fermions,
        states,
    })
}

/// The five allowed boson modes of a link, in fixed order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkMode {
    Vac,      // 00
    UpUp,     // left up, right up
    DownDown, // left down, right down
    UpDown,   // left up, right down
    DownUp,   // left down, right up
}

impl LinkMode {
    pub const ALL: [LinkMode; 5] = [
        LinkMode::Vac,
        LinkMode::UpUp,
        LinkMode::DownDown,
        LinkMode::UpDown,
        LinkMode::DownUp,
    ];

    pub fn index(&self) -> usize {
        match self {
            LinkMode::Vac => 0,
            LinkMode::UpUp => 1,
            LinkMode::DownDown => 2,
            LinkMode::UpDown => 3,
            LinkMode::DownUp => 4,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        LinkMode::ALL
            .get(i)
            .copied()
            .ok_or(Error::IndexOutOfRange { index: i, dim: 5 })
    }

    /// Left index in the extended set {0: none, 1: up, 2: down}.
    pub fn left(&self) -> usize {
        match self {
            LinkMode::Vac => 0,
            LinkMode::UpUp | LinkMode::UpDown => 1,
            LinkMode::DownDown | LinkMode::DownUp => 2,
        }
    }

    /// Right index in the extended set {0: none, 1: up, 2: down}.
    pub fn right(&self) -> usize {
        match self {
            LinkMode::Vac => 0,
            LinkMode::UpUp | LinkMode::DownUp => 1,
            LinkMode::DownDown | LinkMode::UpDown => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LinkMode::Vac => "00",
            LinkMode::UpUp => "uu",
            LinkMode::DownDown => "dd",
            LinkMode::UpDown => "ud",
            LinkMode::DownUp => "du",
        }
    }
}

pub const LINK_DIM: usize = 5;

/// One boson per link: local dimension five, global states are base-5 digit
/// strings with digit `k` (coefficient of `5^k`) holding the mode of link `k`.
#[derive(Clone, Debug)]
pub struct LinkBasis {
    cfg: LatticeConfig,
    dim: usize,
}

impl LinkBasis {
    pub fn n_links(&self) -> usize {
        self.cfg.n_links()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cfg(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn mode_of(&self, index: usize, link: usize) -> usize {
        index / LINK_DIM.pow(link as u32) % LINK_DIM
    }

    pub fn with_mode(&self, index: usize, link: usize, mode: usize) -> usize {
        let stride = LINK_DIM.pow(link as u32);
        let old = self.mode_of(index, link);
        index - old * stride + mode * stride
    }
}

/// `build_link_basis`: dimension `5^n_links`.
pub fn build_link_basis(cfg: &LatticeConfig) -> LinkBasis {
    LinkBasis {
        cfg: *cfg,
        dim: LINK_DIM.pow(cfg.n_links() as u32),
    }
}

/// Fermion and link sectors fused; fermion index varies slowest:
/// `k = f_index * link_dim + l_index`.
#[derive(Clone, Debug)]
pub struct CompositeBasis {
    fermion: FermionBasis,
    link: LinkBasis,
}

impl CompositeBasis {
    pub fn fermion(&self) -> &FermionBasis {
        &self.fermion
    }

    pub fn link(&self) -> &LinkBasis {
        &self.link
    }

    pub fn cfg(&self) -> &LatticeConfig {
        &self.link.cfg
    }

    pub fn dim(&self) -> usize {
        self.fermion.dim() * self.link.dim()
    }

    pub fn fuse(&self, f_index: usize, l_index: usize) -> usize {
        f_index * self.link.dim() + l_index
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.link.dim(), k % self.link.dim())
    }
}

/// `build_composite_basis`: both factors must come from the same lattice.
pub fn build_composite_basis(fermion: FermionBasis, link: LinkBasis) -> Result<CompositeBasis> {
    if fermion.cfg != link.cfg {
        return Err(Error::LatticeMismatch {
            fermion_sites: fermion.cfg.n_sites(),
            link_sites: link.cfg.n_sites(),
        });
    }
    Ok(CompositeBasis { fermion, link })
}

impl CompositeBasis {
    /// Composite basis at the given filling; `None` means half filling
    /// (number of fermions equals the number of vertices).
    pub fn build(cfg: &LatticeConfig, n_fermions: Option<usize>) -> Result<Self> {
        let filling = n_fermions.unwrap_or(cfg.n_sites());
        let fermion = build_fermion_basis(cfg, filling)?;
        let link = build_link_basis(cfg);
        build_composite_basis(fermion, link)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out as usize
}
