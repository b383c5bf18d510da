//! Complex sparse matrices in CSR form with deterministic assembly.
//!
//! Assembly sorts triplets by (row, col), sums duplicates in that order and
//! drops entries that are exactly zero; no epsilon-based pruning happens
//! anywhere, so identical inputs produce bit-identical operators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for the hermiticity assertion on flagged operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Sparse complex matrix on a fixed-dimension Hilbert space.
///
/// The `hermitian` flag is advisory: it is asserted at construction time
/// (violations are errors, never symmetrized away) and propagated through
/// operations that preserve hermiticity exactly.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Assemble from (row, col, value) triplets. Duplicates are summed,
    /// exact zeros dropped. With `hermitian` set, the result must satisfy
    /// `max|A - A^dag| < HERMITICITY_TOL * max(1, max|A|)`.
    pub fn from_triplets(
        dim: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
        hermitian: bool,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r >= dim {
                return Err(Error::IndexOutOfRange { index: r, dim });
            }
            if c >= dim {
                return Err(Error::IndexOutOfRange { index: c, dim });
            }
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut it = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = it.next() {
            while let Some(&(r2, c2, v2)) = it.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    it.next();
                } else {
                    break;
                }
            }
            if v.re != 0.0 || v.im != 0.0 {
                row_ptr[r + 1] += 1;
                col_idx.push(c);
                values.push(v);
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let op = Self {
            dim,
            row_ptr,
            col_idx,
            values,
            hermitian,
        };
        if hermitian {
            op.assert_hermitian()?;
        }
        Ok(op)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![Complex64::new(1.0, 0.0); dim],
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn hermitian_flag(&self) -> bool {
        self.hermitian
    }

    /// Overrides the advisory flag after re-asserting it.
    pub fn flag_hermitian(mut self) -> Result<Self> {
        self.hermitian = true;
        self.assert_hermitian()?;
        Ok(self)
    }

    pub fn row(&self, r: usize) -> (&[usize], &[Complex64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest entry modulus, `max_ij |a_ij|`.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |a_ij - conj(a_ji)|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for (r, c, v) in self.entries() {
            res = res.max((v - self.get(c, r).conj()).norm());
        }
        res
    }

    fn assert_hermitian(&self) -> Result<()> {
        let tolerance = HERMITICITY_TOL * self.max_norm().max(1.0);
        let residual = self.hermiticity_residual();
        if residual < tolerance {
            Ok(())
        } else {
            Err(Error::NonHermitian {
                residual,
                tolerance,
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        let triplets: Vec<_> = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        let mut op = Self::from_triplets(self.dim, triplets, false).expect("indices in range");
        op.hermitian = self.hermitian;
        op
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        if factor.re == 0.0 && factor.im == 0.0 {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `self + factor * other`, merged row-wise in sorted column order.
    pub fn add_scaled(&self, factor: Complex64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let dim = self.dim;
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            let (ca, va) = self.row(r);
            let (cb, vb) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ca.len() || j < cb.len() {
                let (c, v) = if j >= cb.len() || (i < ca.len() && ca[i] < cb[j]) {
                    let out = (ca[i], va[i]);
                    i += 1;
                    out
                } else if i >= ca.len() || cb[j] < ca[i] {
                    let out = (cb[j], factor * vb[j]);
                    j += 1;
                    out
                } else {
                    let out = (ca[i], va[i] + factor * vb[j]);
                    i += 1;
                    j += 1;
                    out
                };
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            dim,
            row_ptr,
            col_idx,
            values,
            hermitian: self.hermitian && other.hermitian && factor.im == 0.0,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Sparse matrix product `self * other`. Per output row, contributions
    /// accumulate in the fixed (k, column) iteration order of the inputs.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let dim = self.dim;
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        let mut touched: Vec<usize> = Vec::with_capacity(dim);
        let mut marked = vec![false; dim];

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..dim {
            let (ca, va) = self.row(r);
            for (&k, &a) in ca.iter().zip(va) {
                let (cb, vb) = other.row(k);
                for (&c, &b) in cb.iter().zip(vb) {
                    if !marked[c] {
                        marked[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                let v = acc[c];
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
                acc[c] = Complex64::new(0.0, 0.0);
                marked[c] = false;
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            dim,
            row_ptr,
            col_idx,
            values,
            hermitian: false,
        })
    }

    /// `v^dag * self * v`. The hermitian flag survives: conjugation by any
    /// matrix preserves hermiticity up to floating-point roundoff.
    pub fn conjugated_by(&self, v: &Self) -> Result<Self> {
        let mut out = v.adjoint().matmul(self)?.matmul(v)?;
        out.hermitian = self.hermitian;
        Ok(out)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            let mut s = Complex64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yr = s;
        }
        Ok(y)
    }

    /// Real part of the expectation value `<x|self|x>`.
    pub fn expectation(&self, x: &[Complex64]) -> Result<f64> {
        let y = self.matvec(x)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in x.iter().zip(&y) {
            s += a.conj() * b;
        }
        Ok(s.re)
    }

    /// Kronecker product `self (x) other`; the left factor index varies
    /// slowest: `(ra, rb) -> ra * other.dim + rb`.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (ra, ca, va) in self.entries() {
            for (rb, cb, vb) in other.entries() {
                triplets.push((ra * other.dim + rb, ca * other.dim + cb, va * vb));
            }
        }
        let mut op = Self::from_triplets(dim, triplets, false).expect("indices in range");
        op.hermitian = self.hermitian && other.hermitian;
        op
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>, hermitian: bool) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                left: m.nrows(),
                right: m.ncols(),
            });
        }
        let mut triplets = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), triplets, hermitian)
    }
}

/// `max|AB - BA|`, the gauge-violation diagnostic norm.
pub fn commutator_max_norm(a: &SparseOperator, b: &SparseOperator) -> Result<f64> {
    Ok(a.matmul(b)?.sub(&b.matmul(a)?)?.max_norm())
}
