//! Exact diagonalization of a one dimensional truncated SU(2) Kogut-Susskind
//! lattice gauge model, together with the coherent-control machinery that
//! enforces the gauge symmetry by group averaging over the SU(2) manifold.
//!
//! The crate is organized bottom-up:
//!
//! - [`hilbert`]: fermion / link Fock bases and their composite index maps,
//! - [`ops`]: elementary second-quantized operators and the link-field algebra,
//! - [`model`]: the lattice Hamiltonian, gauge-violating perturbations and the
//!   Gauss-law generators,
//! - [`decouple`]: Euler-angle gauge unitaries, Haar-grid discretization,
//!   group averaging and stroboscopic driven evolution,
//! - [`spectra`]: Hermitian eigensolving, degeneracy clustering and the
//!   discretization convergence study.

pub mod decouple;
pub mod dense;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod ops;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
pub use hilbert::{Boundary, CompositeBasis, FermionBasis, LatticeConfig, LinkBasis};
pub use sparse::SparseOperator;
