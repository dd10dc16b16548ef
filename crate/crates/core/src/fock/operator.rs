//! Operator storage on the truncated space.
//!
//! Hamiltonians and symmetry operators are sparse. Matrix exponentials are
//! dense, and those acting on photons alone are kept as a photon-space
//! matrix tensored with the 16-dimensional spin identity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QrsError, Result};
use crate::fock::space::SPIN_DIM;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest dimension for which a dense copy of an operator is materialised.
pub const DENSE_CAP: usize = 6000;

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Sums duplicate entries and drops exact zeros.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; dim + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < dim && c < dim);
            if rows.last() == Some(&r) && indices.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                indices.push(c);
                values.push(v);
            }
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut k_idx = Vec::with_capacity(rows.len());
        let mut k_val = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != ZERO {
                keep_rows.push(r);
                k_idx.push(c);
                k_val.push(v);
            }
        }
        for &r in &keep_rows {
            indptr[r + 1] += 1;
        }
        for i in 0..dim {
            indptr[i + 1] += indptr[i];
        }
        Self {
            dim,
            indptr,
            indices: k_idx,
            values: k_val,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self::from_triplets(d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut t = Vec::with_capacity(self.nnz());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                t.push((c, r, v.conj()));
            }
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let mut acc = vec![ZERO; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.dim];
        let mut t = Vec::new();
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r, c, acc[c]));
                acc[c] = ZERO;
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn scaled_sum(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for r in 0..self.dim {
            t.extend(self.row(r).map(|(c, v)| (r, c, a * v)));
            t.extend(other.row(r).map(|(c, v)| (r, c, b * v)));
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Sparse(CsrMatrix),
    Dense(DMatrix<Complex64>),
    /// Photon-space matrix `M`; the operator is `M ⊗ 1_spin`.
    Photonic(DMatrix<Complex64>),
}

/// An operator on the full space together with its provenance flags.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    storage: Storage,
    hermitian: bool,
    unitarity_loss: Option<f64>,
}

impl OperatorMatrix {
    pub fn sparse(m: CsrMatrix, hermitian: bool) -> Self {
        Self {
            dim: m.dim(),
            storage: Storage::Sparse(m),
            hermitian,
            unitarity_loss: None,
        }
    }

    pub fn dense(m: DMatrix<Complex64>, hermitian: bool) -> Self {
        assert!(m.is_square());
        Self {
            dim: m.nrows(),
            storage: Storage::Dense(m),
            hermitian,
            unitarity_loss: None,
        }
    }

    pub fn photonic(m: DMatrix<Complex64>, hermitian: bool) -> Self {
        assert!(m.is_square());
        Self {
            dim: m.nrows() * SPIN_DIM,
            storage: Storage::Photonic(m),
            hermitian,
            unitarity_loss: None,
        }
    }

    pub fn with_unitarity_loss(mut self, loss: f64) -> Self {
        self.unitarity_loss = Some(loss);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `‖U†U − 1‖_max` recorded when the operator came from a matrix exponential.
    pub fn unitarity_loss(&self) -> Option<f64> {
        self.unitarity_loss
    }

    pub fn as_sparse(&self) -> Option<&CsrMatrix> {
        match &self.storage {
            Storage::Sparse(m) => Some(m),
            _ => None,
        }
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        match &self.storage {
            Storage::Sparse(m) => m.get(r, c),
            Storage::Dense(m) => m[(r, c)],
            Storage::Photonic(m) => {
                if r % SPIN_DIM == c % SPIN_DIM {
                    m[(r / SPIN_DIM, c / SPIN_DIM)]
                } else {
                    ZERO
                }
            }
        }
    }

    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        match &self.storage {
            Storage::Sparse(m) => m.matvec_into(x, y),
            Storage::Dense(m) => {
                for (r, yr) in y.iter_mut().enumerate() {
                    *yr = (0..self.dim).map(|c| m[(r, c)] * x[c]).sum();
                }
            }
            Storage::Photonic(m) => {
                let pd = m.nrows();
                y.iter_mut().for_each(|v| *v = ZERO);
                for pc in 0..pd {
                    let xs = &x[pc * SPIN_DIM..(pc + 1) * SPIN_DIM];
                    if xs.iter().all(|v| *v == ZERO) {
                        continue;
                    }
                    for pr in 0..pd {
                        let a = m[(pr, pc)];
                        if a == ZERO {
                            continue;
                        }
                        let ys = &mut y[pr * SPIN_DIM..(pr + 1) * SPIN_DIM];
                        for s in 0..SPIN_DIM {
                            ys[s] += a * xs[s];
                        }
                    }
                }
            }
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim];
        self.apply_into(x, &mut y);
        y
    }

    pub fn adjoint(&self) -> Self {
        let storage = match &self.storage {
            Storage::Sparse(m) => Storage::Sparse(m.adjoint()),
            Storage::Dense(m) => Storage::Dense(m.adjoint()),
            Storage::Photonic(m) => Storage::Photonic(m.adjoint()),
        };
        Self {
            dim: self.dim,
            storage,
            hermitian: self.hermitian,
            unitarity_loss: self.unitarity_loss,
        }
    }

    /// Dense copy; refused above [`DENSE_CAP`].
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.dim > DENSE_CAP {
            return Err(QrsError::DimensionOverflow {
                dim: self.dim,
                cap: DENSE_CAP,
            });
        }
        Ok(match &self.storage {
            Storage::Sparse(m) => m.to_dense(),
            Storage::Dense(m) => m.clone(),
            Storage::Photonic(m) => DMatrix::from_fn(self.dim, self.dim, |r, c| {
                if r % SPIN_DIM == c % SPIN_DIM {
                    m[(r / SPIN_DIM, c / SPIN_DIM)]
                } else {
                    ZERO
                }
            }),
        })
    }

    /// Product `self · other`, kept sparse or photonic when both factors are.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.dim, other.dim);
        let storage = match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => Storage::Sparse(a.matmul(b)),
            (Storage::Photonic(a), Storage::Photonic(b)) => Storage::Photonic(a * b),
            _ => Storage::Dense(self.to_dense()? * other.to_dense()?),
        };
        Ok(Self {
            dim: self.dim,
            storage,
            hermitian: false,
            unitarity_loss: None,
        })
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        assert_eq!(self.dim, other.dim);
        Ok(match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                a.scaled_sum(Complex64::new(1.0, 0.0), b, Complex64::new(-1.0, 0.0)).max_abs()
            }
            (Storage::Photonic(a), Storage::Photonic(b)) => max_abs_dense(&(a - b)),
            _ => max_abs_dense(&(self.to_dense()? - other.to_dense()?)),
        })
    }

    /// `‖self·other − other·self‖_max`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        self.mul(other)?.max_abs_diff(&other.mul(self)?)
    }

    /// `‖M − M†‖_max`.
    pub fn hermiticity_error(&self) -> Result<f64> {
        self.max_abs_diff(&self.adjoint())
    }

    /// `‖M − 1‖_max`.
    pub fn identity_error(&self) -> Result<f64> {
        let id = match &self.storage {
            Storage::Photonic(m) => Self::photonic(DMatrix::identity(m.nrows(), m.nrows()), true),
            _ => Self::sparse(CsrMatrix::identity(self.dim), true),
        };
        self.max_abs_diff(&id)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        match &self.storage {
            Storage::Sparse(m) => m.norm_inf(),
            Storage::Dense(m) | Storage::Photonic(m) => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.norm()).sum::<f64>())
                .fold(0.0, f64::max),
        }
    }
}

fn max_abs_dense(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 0.0)), (2, 0, c(1.0, 1.0)), (1, 1, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(1, 1), ZERO);
        assert_eq!(m.adjoint().get(0, 2), c(1.0, -1.0));
    }

    #[test]
    fn sparse_product_matches_dense() {
        let a = CsrMatrix::from_triplets(3, vec![(0, 1, c(1.0, 2.0)), (1, 2, c(3.0, 0.0)), (2, 0, c(0.5, 0.0))]);
        let b = CsrMatrix::from_triplets(3, vec![(1, 0, c(2.0, 0.0)), (2, 2, c(0.0, 1.0)), (0, 1, c(1.0, 0.0))]);
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.matmul(&b).to_dense(), dense);
    }

    #[test]
    fn photonic_apply_matches_dense() {
        let p = DMatrix::from_fn(2, 2, |r, cc| c(r as f64 + 1.0, cc as f64));
        let op = OperatorMatrix::photonic(p, false);
        let x: Vec<Complex64> = (0..32).map(|i| c(i as f64, -(i as f64) / 3.0)).collect();
        let dense = OperatorMatrix::dense(op.to_dense().unwrap(), false);
        let (y1, y2) = (op.apply(&x), dense.apply(&x));
        assert!(y1.iter().zip(&y2).all(|(a, b)| (a - b).norm() < 1e-12));
        assert_eq!(op.entry(17, 1), c(2.0, 0.0));
        assert_eq!(op.entry(17, 2), ZERO);
    }
}
