//! The truncated SU(2) Kogut-Susskind Hamiltonian, gauge-violating
//! perturbations and the Gauss-law generators.
//!
//! Site indexing starts at zero and the staggered sign is `(-1)^x`, so the
//! mass term is `+M` on site 0. Open-boundary Gauss generators simply omit
//! the missing link terms.

use num_complex::Complex64;

use crate::error::Result;
use crate::hilbert::{CompositeBasis, FermionBasis, Spin};
use crate::ops;
use crate::sparse::SparseOperator;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Physical couplings. The energy unit is fixed by the mass in all shipped
/// experiment configurations; couplings are usually quoted as ratios to it.
#[derive(Clone, Copy, Debug)]
pub struct ModelParams {
    /// Staggered mass M.
    pub mass: f64,
    /// Gauge coupling g.
    pub coupling: f64,
    /// Gauge-covariant hopping strength.
    pub hop: f64,
    /// Charge-asymmetry perturbation strengths (gamma_1, gamma_2, gamma_3).
    pub gamma: [f64; 3],
    /// Direct-tunneling perturbation amplitude.
    pub t_dir: f64,
}

impl ModelParams {
    /// Parameters from dimensionless ratios at mass `m`:
    /// `coupling_sq_over_2m = g^2/(2M)`, `eps_over_m`, `gamma_over_m`,
    /// `t_dir_over_m`.
    pub fn from_ratios(
        mass: f64,
        coupling_sq_over_2m: f64,
        eps_over_m: f64,
        gamma_over_m: [f64; 3],
        t_dir_over_m: f64,
    ) -> Self {
        Self {
            mass,
            coupling: (2.0 * mass * coupling_sq_over_2m).sqrt(),
            hop: eps_over_m * mass,
            gamma: gamma_over_m.map(|g| g * mass),
            t_dir: t_dir_over_m * mass,
        }
    }

    /// The reference coupling point used across tests and shipped configs:
    /// `g^2/(2M) = 0.9`, `eps/M = 1.1`, `gamma/M = (0.5, 1.5, 3.5)` at `M = 1`.
    pub fn reference() -> Self {
        Self::from_ratios(1.0, 0.9, 1.1, [0.5, 1.5, 3.5], 0.5)
    }
}

/// Staggered mass term `M sum_x (-1)^x psi^dag_m(x) psi_m(x)`, diagonal.
pub fn h_fermion(basis: &CompositeBasis, params: &ModelParams) -> SparseOperator {
    let fb = basis.fermion();
    let triplets = fb
        .states()
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let mut val = 0.0;
            for x in 0..fb.n_sites() {
                let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
                for spin in Spin::BOTH {
                    if FermionBasis::occupied(s, FermionBasis::mode_index(x, spin)) {
                        val += sign * params.mass;
                    }
                }
            }
            (k, k, c(val, 0.0))
        })
        .collect();
    let f = SparseOperator::from_triplets(fb.dim(), triplets, true).expect("diagonal assembly");
    f.kron(&SparseOperator::identity(basis.link().dim()))
}

/// Pure gauge term `(g^2/2) sum_links J^2`, diagonal in the link modes.
pub fn h_gauge(basis: &CompositeBasis, params: &ModelParams) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zero(basis.dim());
    for link in 0..basis.cfg().n_links() {
        acc = acc.add(&ops::casimir(basis, link)?)?;
    }
    Ok(acc.scale_re(params.coupling * params.coupling / 2.0))
}

/// Gauge-covariant hopping
/// `eps sum_{x,links} [psi^dag_m(x) U_mn psi_n(x+1) + H.c.]`.
pub fn h_int(basis: &CompositeBasis, params: &ModelParams) -> Result<SparseOperator> {
    let cfg = *basis.cfg();
    let mut acc = SparseOperator::zero(basis.dim());
    for link in 0..cfg.n_links() {
        let (x, y) = cfg.link_endpoints(link)?;
        for m in Spin::BOTH {
            for n in Spin::BOTH {
                let f = ops::fermion_bilinear_modes(
                    basis.fermion(),
                    FermionBasis::mode_index(x, m),
                    FermionBasis::mode_index(y, n),
                )?;
                let u = ops::embed_link_block(basis.link(), link, &ops::link_matrix_block(m, n))?;
                let term = f.kron(&u);
                // adding term + adjoint first keeps the stored matrix exactly
                // hermitian, independent of float association
                acc = acc.add(&term.add(&term.adjoint())?)?;
            }
        }
    }
    acc.scale_re(params.hop).flag_hermitian()
}

/// The full lattice gauge Hamiltonian `H_F + H_G + H_I`.
pub fn h_lgt(basis: &CompositeBasis, params: &ModelParams) -> Result<SparseOperator> {
    h_fermion(basis, params)
        .add(&h_gauge(basis, params)?)?
        .add(&h_int(basis, params)?)
}

/// Gauss-law generator
/// `G_a(x) = L_a(right link) - R_a(left link) - Q_a(x)`,
/// with absent link terms omitted at open boundaries.
pub fn gauss(basis: &CompositeBasis, x: usize, a: usize) -> Result<SparseOperator> {
    let cfg = *basis.cfg();
    cfg.check_site(x)?;
    let mut acc = ops::charge(basis, x, a)?.scale_re(-1.0);
    if let Some(link) = cfg.right_link_of(x)? {
        acc = acc.add(&ops::left_field(basis, link, a)?)?;
    }
    if let Some(link) = cfg.left_link_of(x)? {
        acc = acc.add_scaled(c(-1.0, 0.0), &ops::right_field(basis, link, a)?)?;
    }
    acc.flag_hermitian()
}

/// Charge-asymmetry perturbation `sum_{x,a} gamma_a Q_a(x)`.
pub fn perturbation_charge(basis: &CompositeBasis, params: &ModelParams) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zero(basis.dim());
    for x in 0..basis.cfg().n_sites() {
        for a in 1..=3 {
            let g = params.gamma[a - 1];
            if g != 0.0 {
                acc = acc.add_scaled(c(g, 0.0), &ops::charge(basis, x, a)?)?;
            }
        }
    }
    acc.flag_hermitian()
}

/// Direct-tunneling perturbation
/// `-t sum_{x,links,m} [psi^dag_m(x) psi_m(x+1) + H.c.]`.
pub fn perturbation_tunneling(
    basis: &CompositeBasis,
    params: &ModelParams,
) -> Result<SparseOperator> {
    let cfg = *basis.cfg();
    let mut acc = SparseOperator::zero(basis.dim());
    for link in 0..cfg.n_links() {
        let (x, y) = cfg.link_endpoints(link)?;
        for m in Spin::BOTH {
            let hop = ops::fermion_bilinear(basis, x, m, y, m)?;
            acc = acc.add(&hop.add(&hop.adjoint())?)?;
        }
    }
    acc.scale_re(-params.t_dir).flag_hermitian()
}

/// Gauge-violation diagnostic `sum_{x,a} G_a(x)^2`; positive semidefinite
/// with the gauge-invariant sector as its kernel.
pub fn gauge_violation_operator(basis: &CompositeBasis) -> Result<SparseOperator> {
    let mut acc = SparseOperator::zero(basis.dim());
    for x in 0..basis.cfg().n_sites() {
        for a in 1..=3 {
            let g = gauss(basis, x, a)?;
            acc = acc.add(&g.matmul(&g)?)?;
        }
    }
    acc.flag_hermitian()
}
