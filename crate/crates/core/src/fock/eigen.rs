//! Lowest eigenpairs of a Hermitian operator.
//!
//! Small problems go to a dense symmetric eigensolver (real arithmetic when
//! every entry is real). Larger ones use Lanczos with full
//! reorthogonalisation, explicit restarts and locking: eigenpairs are found
//! one at a time, each run orthogonal to the vectors already locked, which
//! handles exactly degenerate levels.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::fock::operator::{OperatorMatrix, Storage, DENSE_CAP};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenOptions {
    /// Largest dimension handled by the dense solver.
    pub dense_threshold: usize,
    /// Krylov dimension before a restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
    /// Residual target relative to `‖M‖_∞`.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 2000,
            max_krylov: 240,
            max_restarts: 60,
            rel_tol: 1e-9,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    /// `‖Mv − Ev‖` per pair.
    pub residuals: Vec<f64>,
    pub method: Method,
    /// Matrix-vector products (Lanczos) or zero (dense).
    pub matvecs: usize,
}

pub fn ground_state(m: &OperatorMatrix, k: usize) -> Result<SpectralResult> {
    ground_state_with(m, k, &EigenOptions::default(), None)
}

/// `k` lowest eigenpairs; `warm` seeds the first Lanczos run.
pub fn ground_state_with(
    m: &OperatorMatrix,
    k: usize,
    opts: &EigenOptions,
    warm: Option<&[Complex64]>,
) -> Result<SpectralResult> {
    if k == 0 || k > m.dim() {
        return Err(QrsError::InvalidParams(format!("k = {k} outside 1..={}", m.dim())));
    }
    if m.dim() <= opts.dense_threshold.min(DENSE_CAP) {
        dense_lowest(m, k)
    } else {
        lanczos_lowest(m, k, opts, warm)
    }
}

fn is_real(m: &OperatorMatrix) -> bool {
    match m.storage() {
        Storage::Sparse(s) => s.is_real(),
        Storage::Dense(d) | Storage::Photonic(d) => d.iter().all(|v| v.im == 0.0),
    }
}

fn dense_lowest(m: &OperatorMatrix, k: usize) -> Result<SpectralResult> {
    let dense = m.to_dense()?;
    let n = dense.nrows();
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = if is_real(m) {
        let re = DMatrix::from_fn(n, n, |r, c| dense[(r, c)].re);
        let eig = SymmetricEigen::new(re);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .take(k)
            .map(|i| {
                let v = eig.eigenvectors.column(i).iter().map(|&x| Complex64::new(x, 0.0)).collect();
                (eig.eigenvalues[i], v)
            })
            .unzip()
    } else {
        let eig = SymmetricEigen::new(dense);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        order
            .into_iter()
            .take(k)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .unzip()
    };
    let residuals = values.iter().zip(&vectors).map(|(&e, v)| residual(m, e, v)).collect();
    Ok(SpectralResult {
        values,
        vectors,
        residuals,
        method: Method::Dense,
        matvecs: 0,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(m: &OperatorMatrix, e: f64, v: &[Complex64]) -> f64 {
    let mv = m.apply(v);
    mv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

/// Classical Gram–Schmidt applied twice against every basis vector.
fn orthogonalize(w: &mut [Complex64], basis: &[&[Complex64]]) {
    for _ in 0..2 {
        for u in basis {
            let c = dot(u, w);
            if c != ZERO {
                for (wi, ui) in w.iter_mut().zip(u.iter()) {
                    *wi -= c * ui;
                }
            }
        }
    }
}

fn lanczos_lowest(
    m: &OperatorMatrix,
    k: usize,
    opts: &EigenOptions,
    warm: Option<&[Complex64]>,
) -> Result<SpectralResult> {
    let dim = m.dim();
    let tol = opts.rel_tol * m.norm_inf().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut values = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut matvecs = 0;

    for level in 0..k {
        let mut start: Vec<Complex64> = match (level, warm) {
            (0, Some(w)) if w.len() == dim => w.to_vec(),
            _ => (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect(),
        };
        let mut best: Option<(f64, Vec<Complex64>, f64)> = None;
        let mut converged = false;
        for _ in 0..opts.max_restarts {
            let (theta, y, res, used) = lanczos_run(m, &vectors, &start, opts.max_krylov.min(dim), tol)?;
            matvecs += used;
            if best.as_ref().map_or(true, |b| res < b.2) {
                best = Some((theta, y.clone(), res));
            }
            if res <= tol {
                converged = true;
                break;
            }
            start = y;
        }
        let (theta, y, res) = best.expect("at least one run");
        if !converged {
            return Err(QrsError::NoConvergence {
                iterations: matvecs,
                residual: res,
            });
        }
        values.push(theta);
        vectors.push(y);
        residuals.push(res);
    }

    // sort (locking may find a slightly higher level first when nearly degenerate)
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(SpectralResult {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        method: Method::Lanczos,
        matvecs,
    })
}

/// One Lanczos pass from `start`, orthogonal to `locked`. Returns the lowest
/// Ritz pair, its true residual and the number of products used.
fn lanczos_run(
    m: &OperatorMatrix,
    locked: &[Vec<Complex64>],
    start: &[Complex64],
    max_krylov: usize,
    tol: f64,
) -> Result<(f64, Vec<Complex64>, f64, usize)> {
    let dim = m.dim();
    let locked_refs: Vec<&[Complex64]> = locked.iter().map(|v| v.as_slice()).collect();
    let mut q0 = start.to_vec();
    orthogonalize(&mut q0, &locked_refs);
    let nrm = norm(&q0);
    if nrm < 1e-300 {
        return Err(QrsError::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    q0.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<Complex64>> = vec![q0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; dim];
    let mut used = 0;
    let check_every = 10;

    let s = loop {
        let j = basis.len() - 1;
        m.apply_into(&basis[j], &mut w);
        used += 1;
        let a = dot(&basis[j], &w).re;
        alphas.push(a);
        {
            let refs: Vec<&[Complex64]> = locked_refs
                .iter()
                .copied()
                .chain(basis.iter().map(|v| v.as_slice()))
                .collect();
            orthogonalize(&mut w, &refs);
        }
        let b = norm(&w);
        let full = basis.len() >= max_krylov || b < 1e-12 * (a.abs() + 1.0);
        if basis.len() % check_every == 0 || full {
            let (_, s) = lowest_tridiagonal(&alphas, &betas);
            let estimate = b * s[s.len() - 1].abs();
            if estimate <= 0.1 * tol || full {
                break s;
            }
        }
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    };

    let mut y = vec![ZERO; dim];
    for (coef, v) in s.iter().zip(&basis) {
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += vi * *coef;
        }
    }
    orthogonalize(&mut y, &locked_refs);
    let ny = norm(&y);
    y.iter_mut().for_each(|x| *x /= ny);
    let my = m.apply(&y);
    used += 1;
    let rq = dot(&y, &my).re;
    let res = my.iter().zip(&y).map(|(a, b)| (a - b * rq).norm_sqr()).sum::<f64>().sqrt();
    Ok((rq, y, res, used))
}

fn lowest_tridiagonal(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let n = alphas.len();
    let t = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            alphas[r]
        } else if r + 1 == c {
            betas[r]
        } else if c + 1 == r {
            betas[c]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let i = eig.eigenvalues.imin();
    (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::operator::CsrMatrix;

    fn diag(values: &[f64]) -> OperatorMatrix {
        let d: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        OperatorMatrix::sparse(CsrMatrix::diagonal(&d), true)
    }

    #[test]
    fn diagonal_matrix_dense() {
        let r = ground_state(&diag(&[3.0, -1.0, 2.0, 0.5]), 2).unwrap();
        assert_eq!(r.values, vec![-1.0, 0.5]);
        assert_eq!(r.method, Method::Dense);
    }

    #[test]
    fn lanczos_handles_degenerate_levels() {
        let n = 400;
        let values: Vec<f64> = (0..n).map(|i| if i < 2 { -5.0 } else { (i % 37) as f64 * 0.25 }).collect();
        let mut t: Vec<(usize, usize, Complex64)> =
            values.iter().enumerate().map(|(i, &v)| (i, i, Complex64::new(v, 0.0))).collect();
        // a little off-diagonal coupling among the upper levels
        for i in 2..n - 1 {
            t.push((i, i + 1, Complex64::new(0.01, 0.0)));
            t.push((i + 1, i, Complex64::new(0.01, 0.0)));
        }
        let m = OperatorMatrix::sparse(CsrMatrix::from_triplets(n, t), true);
        let opts = EigenOptions {
            dense_threshold: 10,
            ..EigenOptions::default()
        };
        let r = ground_state_with(&m, 3, &opts, None).unwrap();
        let dense = ground_state_with(
            &m,
            3,
            &EigenOptions {
                dense_threshold: n,
                ..opts
            },
            None,
        )
        .unwrap();
        assert_eq!(r.method, Method::Lanczos);
        for (a, b) in r.values.iter().zip(&dense.values) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let tol = 1e-9 * m.norm_inf();
        assert!(r.residuals.iter().all(|&x| x <= tol));
    }
}
