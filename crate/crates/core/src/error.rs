//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("filling out of range: {n_fermions} fermions for {n_modes} modes")]
    FillingOutOfRange { n_fermions: usize, n_modes: usize },

    #[error("lattice must have at least 2 sites, got {0}")]
    LatticeTooSmall(usize),

    #[error("mismatched lattices: fermion basis has {fermion_sites} sites, link basis belongs to a lattice with {link_sites}")]
    LatticeMismatch {
        fermion_sites: usize,
        link_sites: usize,
    },

    #[error("invalid site index {site} for {n_sites} sites")]
    InvalidSite { site: usize, n_sites: usize },

    #[error("invalid link index {link} for {n_links} links")]
    InvalidLink { link: usize, n_links: usize },

    #[error("invalid su(2) axis {0}, expected 1, 2 or 3")]
    InvalidAxis(usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator flagged hermitian violates hermiticity: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NonHermitian { residual: f64, tolerance: f64 },

    #[error("euler angles out of range: alpha={alpha}, beta={beta}, gamma={gamma}")]
    AnglesOutOfRange { alpha: f64, beta: f64, gamma: f64 },

    #[error("grid needs at least one point per axis")]
    EmptyGrid,

    #[error("multi-index {mu:?} out of range for {n} points per axis")]
    MultiIndexOutOfRange { mu: [usize; 3], n: usize },

    #[error("drive period must be positive, got {0}")]
    InvalidPeriod(f64),

    #[error("vertex assignment does not cover site {0}")]
    MissingSite(usize),

    #[error("group averaging as a time evolution needs uniform grid weights")]
    NonUniformWeights,

    #[error("dimension {dim} exceeds the dense-exponential threshold {threshold}; run a smaller system or raise the threshold")]
    AboveDenseThreshold { dim: usize, threshold: usize },

    #[error("state vector is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("operator must be flagged hermitian")]
    NotFlaggedHermitian,

    #[error("eigensolver did not converge: worst residual {residual:.3e} for {requested} requested pairs after {iterations} iterations")]
    NonConvergence {
        requested: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
