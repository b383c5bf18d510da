//! Elementary second-quantized operators on a composite basis.
//!
//! Link fields follow the index placement of the defining bilinears
//! verbatim: `L_a = 1/2 sum b^dag_{ml} sigma^a_{nm} b_{nl}` acts on the left
//! index, `R_a = 1/2 sum b^dag_{lm} sigma^a_{mn} b_{ln}` on the right index,
//! with `sigma^a` zero whenever an index hits the empty slot. Correctness is
//! pinned by the commutator algebra rather than re-derivation:
//! `[R_a, R_b] = i eps_abc R_c`, `[L_a, L_b] = -i eps_abc L_c`, `[L_a, R_b] = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{CompositeBasis, FermionBasis, LinkBasis, LinkMode, Spin, LINK_DIM};
use crate::sparse::SparseOperator;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrices extended by an empty slot at index 0:
/// `sigma(a)[i][j]` with i, j in {0: none, 1: up, 2: down} and all entries
/// involving index 0 set to zero.
pub struct PauliSet;

impl PauliSet {
    pub fn sigma(a: usize) -> Result<[[Complex64; 3]; 3]> {
        let z = c(0.0, 0.0);
        match a {
            1 => Ok([
                [z, z, z],
                [z, z, c(1.0, 0.0)],
                [z, c(1.0, 0.0), z],
            ]),
            2 => Ok([
                [z, z, z],
                [z, z, c(0.0, -1.0)],
                [z, c(0.0, 1.0), z],
            ]),
            3 => Ok([
                [z, z, z],
                [z, c(1.0, 0.0), z],
                [z, z, c(-1.0, 0.0)],
            ]),
            _ => Err(Error::InvalidAxis(a)),
        }
    }

    /// The 2x2 block, indices {0: up, 1: down}.
    pub fn sigma_2x2(a: usize) -> Result<[[Complex64; 2]; 2]> {
        let ext = Self::sigma(a)?;
        Ok([[ext[1][1], ext[1][2]], [ext[2][1], ext[2][2]]])
    }
}

// ---------------------------------------------------------------------------
// 5x5 link blocks
// ---------------------------------------------------------------------------

pub type LinkBlock = [[Complex64; LINK_DIM]; LINK_DIM];

pub fn zero_block() -> LinkBlock {
    [[c(0.0, 0.0); LINK_DIM]; LINK_DIM]
}

/// Single-boson bilinear `b^dag_created b_annihilated` on one link.
pub fn boson_bilinear_block(created: LinkMode, annihilated: LinkMode) -> LinkBlock {
    let mut m = zero_block();
    m[created.index()][annihilated.index()] = c(1.0, 0.0);
    m
}

/// Left gauge field `L_a` as a 5x5 block.
pub fn left_field_block(a: usize) -> Result<LinkBlock> {
    let sigma = PauliSet::sigma(a)?;
    let mut m = zero_block();
    for created in LinkMode::ALL {
        for annihilated in LinkMode::ALL {
            if created.right() != annihilated.right() {
                continue; // shared right index l
            }
            let coeff = 0.5 * sigma[annihilated.left()][created.left()];
            m[created.index()][annihilated.index()] += coeff;
        }
    }
    Ok(m)
}

/// Right gauge field `R_a` as a 5x5 block.
pub fn right_field_block(a: usize) -> Result<LinkBlock> {
    let sigma = PauliSet::sigma(a)?;
    let mut m = zero_block();
    for created in LinkMode::ALL {
        for annihilated in LinkMode::ALL {
            if created.left() != annihilated.left() {
                continue; // shared left index l
            }
            let coeff = 0.5 * sigma[created.right()][annihilated.right()];
            m[created.index()][annihilated.index()] += coeff;
        }
    }
    Ok(m)
}

/// Non-Abelian field energy `J^2 = sum_a R_a R_a` as a 5x5 block.
#[allow(clippy::needless_range_loop)]
pub fn casimir_block() -> LinkBlock {
    let mut m = zero_block();
    for a in 1..=3 {
        let r = right_field_block(a).expect("valid axis");
        for i in 0..LINK_DIM {
            for j in 0..LINK_DIM {
                for k in 0..LINK_DIM {
                    m[i][j] += r[i][k] * r[k][j];
                }
            }
        }
    }
    m
}

/// Truncated link operator entry `U_mn`, a 5x5 block scaled by 1/sqrt(2).
pub fn link_matrix_block(m: Spin, n: Spin) -> LinkBlock {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = zero_block();
    let mut put = |created: LinkMode, annihilated: LinkMode, amp: f64| {
        out[created.index()][annihilated.index()] += c(amp * s, 0.0);
    };
    match (m, n) {
        (Spin::Up, Spin::Up) => {
            put(LinkMode::UpUp, LinkMode::Vac, 1.0);
            put(LinkMode::Vac, LinkMode::DownDown, 1.0);
        }
        (Spin::Up, Spin::Down) => {
            put(LinkMode::UpDown, LinkMode::Vac, 1.0);
            put(LinkMode::Vac, LinkMode::DownUp, -1.0);
        }
        (Spin::Down, Spin::Up) => {
            put(LinkMode::DownUp, LinkMode::Vac, 1.0);
            put(LinkMode::Vac, LinkMode::UpDown, -1.0);
        }
        (Spin::Down, Spin::Down) => {
            put(LinkMode::Vac, LinkMode::UpUp, 1.0);
            put(LinkMode::DownDown, LinkMode::Vac, 1.0);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Factor-space assembly
// ---------------------------------------------------------------------------

/// Embed a 5x5 block acting on `link` into the full link basis.
pub fn embed_link_block(
    basis: &LinkBasis,
    link: usize,
    block: &LinkBlock,
) -> Result<SparseOperator> {
    basis.cfg().check_link(link)?;
    let mut triplets = Vec::new();
    for l in 0..basis.dim() {
        let mode = basis.mode_of(l, link);
        for (new_mode, row) in block.iter().enumerate() {
            let v = row[mode];
            if v.re != 0.0 || v.im != 0.0 {
                triplets.push((basis.with_mode(l, link, new_mode), l, v));
            }
        }
    }
    SparseOperator::from_triplets(basis.dim(), triplets, false)
}

/// `psi^dag_p psi_q` on the fixed-number fermion basis, with Jordan-Wigner
/// signs in the global mode order.
pub fn fermion_bilinear_modes(
    basis: &FermionBasis,
    p: usize,
    q: usize,
) -> Result<SparseOperator> {
    let n_modes = basis.n_modes();
    if p >= n_modes || q >= n_modes {
        return Err(Error::IndexOutOfRange {
            index: p.max(q),
            dim: n_modes,
        });
    }
    let mut triplets = Vec::new();
    for (k, &s) in basis.states().iter().enumerate() {
        if !FermionBasis::occupied(s, q) {
            continue;
        }
        if p == q {
            triplets.push((k, k, c(1.0, 0.0)));
            continue;
        }
        if FermionBasis::occupied(s, p) {
            continue;
        }
        let mut sign = FermionBasis::jw_sign(s, q);
        let mid = s & !(1u64 << q);
        sign *= FermionBasis::jw_sign(mid, p);
        let target = mid | (1u64 << p);
        let k2 = basis
            .index_of(target)
            .expect("number-conserving image stays in the sector");
        triplets.push((k2, k, c(sign, 0.0)));
    }
    SparseOperator::from_triplets(basis.dim(), triplets, p == q)
}

/// Vertex charge `Q_a(x) = 1/2 sum_kl psi^dag_k sigma^a_kl psi_l` on the
/// fermion basis.
pub fn charge_fermion(basis: &FermionBasis, x: usize, a: usize) -> Result<SparseOperator> {
    if x >= basis.n_sites() {
        return Err(Error::InvalidSite {
            site: x,
            n_sites: basis.n_sites(),
        });
    }
    let sigma = PauliSet::sigma_2x2(a)?;
    let mut acc = SparseOperator::zero(basis.dim());
    for k in Spin::BOTH {
        for l in Spin::BOTH {
            let coeff = 0.5 * sigma[k.pauli_index()][l.pauli_index()];
            if coeff.re == 0.0 && coeff.im == 0.0 {
                continue;
            }
            let bil = fermion_bilinear_modes(
                basis,
                FermionBasis::mode_index(x, k),
                FermionBasis::mode_index(x, l),
            )?;
            acc = acc.add_scaled(coeff, &bil)?;
        }
    }
    acc.flag_hermitian()
}

// ---------------------------------------------------------------------------
// Composite-space operators (public operation set)
// ---------------------------------------------------------------------------

fn lift_fermion(basis: &CompositeBasis, op: &SparseOperator) -> SparseOperator {
    op.kron(&SparseOperator::identity(basis.link().dim()))
}

fn lift_link(basis: &CompositeBasis, op: &SparseOperator) -> SparseOperator {
    SparseOperator::identity(basis.fermion().dim()).kron(op)
}

/// `psi^dag_m(x) psi_n(y)` on the composite basis.
pub fn fermion_bilinear(
    basis: &CompositeBasis,
    x: usize,
    m: Spin,
    y: usize,
    n: Spin,
) -> Result<SparseOperator> {
    basis.cfg().check_site(x)?;
    basis.cfg().check_site(y)?;
    let f = fermion_bilinear_modes(
        basis.fermion(),
        FermionBasis::mode_index(x, m),
        FermionBasis::mode_index(y, n),
    )?;
    Ok(lift_fermion(basis, &f))
}

/// `b^dag_created b_annihilated` on the given link.
pub fn boson_bilinear(
    basis: &CompositeBasis,
    link: usize,
    created: LinkMode,
    annihilated: LinkMode,
) -> Result<SparseOperator> {
    let block = boson_bilinear_block(created, annihilated);
    Ok(lift_link(
        basis,
        &embed_link_block(basis.link(), link, &block)?,
    ))
}

/// Left gauge field `L_a` on the given link.
pub fn left_field(basis: &CompositeBasis, link: usize, a: usize) -> Result<SparseOperator> {
    let block = left_field_block(a)?;
    lift_link(basis, &embed_link_block(basis.link(), link, &block)?).flag_hermitian()
}

/// Right gauge field `R_a` on the given link.
pub fn right_field(basis: &CompositeBasis, link: usize, a: usize) -> Result<SparseOperator> {
    let block = right_field_block(a)?;
    lift_link(basis, &embed_link_block(basis.link(), link, &block)?).flag_hermitian()
}

/// `J^2` on the given link.
pub fn casimir(basis: &CompositeBasis, link: usize) -> Result<SparseOperator> {
    let block = casimir_block();
    lift_link(basis, &embed_link_block(basis.link(), link, &block)?).flag_hermitian()
}

/// Vertex charge `Q_a(x)` on the composite basis.
pub fn charge(basis: &CompositeBasis, x: usize, a: usize) -> Result<SparseOperator> {
    Ok(lift_fermion(basis, &charge_fermion(basis.fermion(), x, a)?))
}

/// Truncated link operator entry `U_mn` on the given link.
pub fn link_matrix(
    basis: &CompositeBasis,
    link: usize,
    m: Spin,
    n: Spin,
) -> Result<SparseOperator> {
    let block = link_matrix_block(m, n);
    Ok(lift_link(
        basis,
        &embed_link_block(basis.link(), link, &block)?,
    ))
}

/// Total fermion number, diagonal.
pub fn total_number(basis: &CompositeBasis) -> SparseOperator {
    let triplets = basis
        .fermion()
        .states()
        .iter()
        .enumerate()
        .map(|(k, s)| (k, k, c(s.count_ones() as f64, 0.0)))
        .collect();
    let f = SparseOperator::from_triplets(basis.fermion().dim(), triplets, true)
        .expect("diagonal assembly");
    lift_fermion(basis, &f)
}
