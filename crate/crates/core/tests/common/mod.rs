//! Brute-force dense oracle built from explicit Jordan-Wigner string
//! matrices on the full fermion Fock space, independent of the
//! bit-manipulation path used by the library.

use nalgebra::DMatrix;
use num_complex::Complex64;

use su2dd_core::hilbert::{CompositeBasis, FermionBasis, LinkMode, Spin, LINK_DIM};
use su2dd_core::ops::{link_matrix_block, LinkBlock};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

fn id(n: usize) -> DMatrix<Complex64> {
    DMatrix::identity(n, n)
}

/// Annihilator on one mode in the (|0>, |1>) basis.
fn lower() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
}

fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Jordan-Wigner annihilator `a_p` on the full `2^n_modes` Fock space,
/// with mode 0 the least significant bit: `I x ... x a x Z x ... x Z`.
pub fn annihilator_full(n_modes: usize, p: usize) -> DMatrix<Complex64> {
    let mut m = id(1);
    for mode in (0..n_modes).rev() {
        let factor = if mode == p {
            lower()
        } else if mode < p {
            pauli_z()
        } else {
            id(2)
        };
        m = kron(&m, &factor);
    }
    m
}

/// `psi^dag_p psi_q` on the full Fock space.
pub fn bilinear_full(n_modes: usize, p: usize, q: usize) -> DMatrix<Complex64> {
    annihilator_full(n_modes, p).adjoint() * annihilator_full(n_modes, q)
}

/// Selector onto the fixed-number sector, rows ordered exactly like
/// `FermionBasis` (ascending bitstring value).
pub fn sector_selector(basis: &FermionBasis) -> DMatrix<Complex64> {
    let full = 1usize << basis.n_modes();
    let mut p = DMatrix::zeros(basis.dim(), full);
    for (row, &s) in basis.states().iter().enumerate() {
        p[(row, s as usize)] = c(1.0, 0.0);
    }
    p
}

/// Project a full-Fock operator onto the fixed-number sector.
pub fn project_to_sector(basis: &FermionBasis, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let p = sector_selector(basis);
    &p * op * p.adjoint()
}

/// Dense embedding of a 5x5 block on one link into the full link space,
/// digit `k` of the index holding the mode of link `k`.
pub fn embed_link_dense(n_links: usize, link: usize, block: &LinkBlock) -> DMatrix<Complex64> {
    let dim = LINK_DIM.pow(n_links as u32);
    let stride = LINK_DIM.pow(link as u32);
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mode = col / stride % LINK_DIM;
        for (new_mode, row) in block.iter().enumerate() {
            let v = row[mode];
            if v.re != 0.0 || v.im != 0.0 {
                m[(col - mode * stride + new_mode * stride, col)] += v;
            }
        }
    }
    m
}

/// Composite embedding: fermion factor slowest.
pub fn compose(
    basis: &CompositeBasis,
    fermion_sector_op: &DMatrix<Complex64>,
    link_op: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    assert_eq!(fermion_sector_op.nrows(), basis.fermion().dim());
    assert_eq!(link_op.nrows(), basis.link().dim());
    kron(fermion_sector_op, link_op)
}

/// Dense oracle for the gauge-covariant hopping term.
pub fn h_int_oracle(basis: &CompositeBasis, eps: f64) -> DMatrix<Complex64> {
    let n_modes = basis.fermion().n_modes();
    let n_links = basis.cfg().n_links();
    let dim = basis.dim();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for link in 0..n_links {
        let (x, y) = basis.cfg().link_endpoints(link).unwrap();
        for m in Spin::BOTH {
            for n in Spin::BOTH {
                let f_full = bilinear_full(
                    n_modes,
                    FermionBasis::mode_index(x, m),
                    FermionBasis::mode_index(y, n),
                );
                let f = project_to_sector(basis.fermion(), &f_full);
                let u = embed_link_dense(n_links, link, &link_matrix_block(m, n));
                let term = compose(basis, &f, &u);
                h += &term * c(eps, 0.0);
                h += term.adjoint() * c(eps, 0.0);
            }
        }
    }
    h
}

/// Dense oracle for the staggered mass term.
pub fn h_fermion_oracle(basis: &CompositeBasis, mass: f64) -> DMatrix<Complex64> {
    let n_modes = basis.fermion().n_modes();
    let mut f_full = DMatrix::<Complex64>::zeros(1 << n_modes, 1 << n_modes);
    for x in 0..basis.cfg().n_sites() {
        let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
        for spin in Spin::BOTH {
            let p = FermionBasis::mode_index(x, spin);
            f_full += bilinear_full(n_modes, p, p) * c(sign * mass, 0.0);
        }
    }
    compose(
        basis,
        &project_to_sector(basis.fermion(), &f_full),
        &id(basis.link().dim()),
    )
}

/// Dense oracle for the pure gauge term.
#[allow(clippy::needless_range_loop)]
pub fn h_gauge_oracle(basis: &CompositeBasis, g_sq_half: f64) -> DMatrix<Complex64> {
    let n_links = basis.cfg().n_links();
    let mut l = DMatrix::<Complex64>::zeros(basis.link().dim(), basis.link().dim());
    for link in 0..n_links {
        let mut j2 = su2dd_core::ops::zero_block();
        for a in 1..=3 {
            let r = su2dd_core::ops::right_field_block(a).unwrap();
            for i in 0..LINK_DIM {
                for j in 0..LINK_DIM {
                    for k in 0..LINK_DIM {
                        j2[i][j] += r[i][k] * r[k][j];
                    }
                }
            }
        }
        l += embed_link_dense(n_links, link, &j2) * c(g_sq_half, 0.0);
    }
    compose(basis, &id(basis.fermion().dim()), &l)
}

/// Dense oracle for the vertex charge.
pub fn charge_oracle(basis: &CompositeBasis, x: usize, a: usize) -> DMatrix<Complex64> {
    let n_modes = basis.fermion().n_modes();
    let sigma = su2dd_core::ops::PauliSet::sigma_2x2(a).unwrap();
    let mut f_full = DMatrix::<Complex64>::zeros(1 << n_modes, 1 << n_modes);
    for (ki, k) in Spin::BOTH.iter().enumerate() {
        for (li, l) in Spin::BOTH.iter().enumerate() {
            let coeff = sigma[ki][li] * c(0.5, 0.0);
            if coeff.re == 0.0 && coeff.im == 0.0 {
                continue;
            }
            f_full += bilinear_full(
                n_modes,
                FermionBasis::mode_index(x, *k),
                FermionBasis::mode_index(x, *l),
            ) * coeff;
        }
    }
    compose(
        basis,
        &project_to_sector(basis.fermion(), &f_full),
        &id(basis.link().dim()),
    )
}

/// Dense oracle for a Gauss-law generator.
pub fn gauss_oracle(basis: &CompositeBasis, x: usize, a: usize) -> DMatrix<Complex64> {
    let n_links = basis.cfg().n_links();
    let mut m = -charge_oracle(basis, x, a);
    if let Some(link) = basis.cfg().right_link_of(x).unwrap() {
        let l = embed_link_dense(n_links, link, &su2dd_core::ops::left_field_block(a).unwrap());
        m += compose(basis, &id(basis.fermion().dim()), &l);
    }
    if let Some(link) = basis.cfg().left_link_of(x).unwrap() {
        let r = embed_link_dense(n_links, link, &su2dd_core::ops::right_field_block(a).unwrap());
        m -= compose(basis, &id(basis.fermion().dim()), &r);
    }
    m
}

/// Fermion state with one particle per site, spin up on even sites.
pub fn neel_state_mask(n_sites: usize) -> u64 {
    let mut mask = 0u64;
    for x in 0..n_sites {
        let spin = if x % 2 == 0 { Spin::Up } else { Spin::Down };
        mask |= 1 << FermionBasis::mode_index(x, spin);
    }
    mask
}

/// Link-basis index with every link in the same mode.
pub fn uniform_link_index(n_links: usize, mode: LinkMode) -> usize {
    (0..n_links).fold(0, |acc, k| acc + mode.index() * LINK_DIM.pow(k as u32))
}

pub fn dense_max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).map(|z| z.norm()).max()
}
