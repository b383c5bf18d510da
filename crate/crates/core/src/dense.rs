//! Dense helpers: Hermitian eigendecomposition, small matrix exponentials.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in columns.
pub fn eigh(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &se.eigenvectors.column(i));
    }
    (eigenvalues, vectors)
}

/// `exp(-i t H)` for Hermitian `H`, via eigendecomposition.
pub fn exp_i_hermitian(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let (vals, vecs) = eigh(h);
    let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
    ));
    &vecs * phases * vecs.adjoint()
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
/// Intended for the small dense blocks of factor-space generators.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = a.iter().map(|v| v.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a.map(|v| v / 2f64.powi(squarings as i32));
    // Taylor series; with |B| <= 0.5 twenty terms are far below f64 epsilon.
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=20 {
        term = (&term * &b) / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `max|U^dag U - 1|`.
pub fn unitarity_residual(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    let d = u.adjoint() * u - DMatrix::<Complex64>::identity(n, n);
    d.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Residual certificate for an eigenpair set: `max_k ||H v_k - e_k v_k||`.
pub fn eigenpair_residual(
    h: &DMatrix<Complex64>,
    vals: &[f64],
    vecs: &DMatrix<Complex64>,
) -> Result<f64> {
    if vecs.ncols() != vals.len() || h.nrows() != vecs.nrows() {
        return Err(Error::DimensionMismatch {
            left: h.nrows(),
            right: vecs.nrows(),
        });
    }
    let mut worst: f64 = 0.0;
    for (k, &e) in vals.iter().enumerate() {
        let v = vecs.column(k);
        let r = h * v - v.map(|x| x * Complex64::new(e, 0.0));
        worst = worst.max(r.norm());
    }
    Ok(worst)
}
