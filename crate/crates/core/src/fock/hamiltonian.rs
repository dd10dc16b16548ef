//! Hamiltonian of the square on the truncated space, in the lab frame and
//! after the exact shift `a_n → a_n + α_n`.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::operator::{CsrMatrix, OperatorMatrix};
use crate::fock::space::{spin_mask, FockSpace, SPIN_DIM};
use crate::meanfield::Displacements;
use crate::model::{ModelParams, SITES};

/// Photon hopping matrix `M`: `J1` on the four edges, `J2` on the two diagonals.
pub fn hopping_matrix(p: &ModelParams) -> [[f64; SITES]; SITES] {
    let mut m = [[0.0; SITES]; SITES];
    for i in 0..SITES {
        m[i][(i + 1) % SITES] = p.j1;
        m[(i + 1) % SITES][i] = p.j1;
        m[i][(i + 2) % SITES] = p.j2;
    }
    m
}

/// `H = Σ_i [ω a†a + (Ω/2)σz + λ(a + a†)σx] + Σ_{i≠j} M_ij a_i† a_j`.
pub fn build_hamiltonian(p: &ModelParams, space: &FockSpace) -> Result<OperatorMatrix> {
    build_displaced_hamiltonian(p, space, &Displacements::zero())
}

/// `H(a + α)`: the lab Hamiltonian with every `a_n` replaced by `a_n + α_n`,
/// built term by term so no truncated exponential enters. Equals
/// `D(α) H D†(α)` for `D(α) = Π exp(α* a − α a†)` before truncation.
pub fn build_displaced_hamiltonian(
    p: &ModelParams,
    space: &FockSpace,
    alpha: &Displacements,
) -> Result<OperatorMatrix> {
    let m = hopping_matrix(p);
    let a: [Complex64; SITES] = std::array::from_fn(|n| alpha.alpha(n));
    // K = ωI + M; linear coefficients c = Kα; constant α†Kα
    let k = |i: usize, j: usize| if i == j { p.omega } else { m[i][j] };
    let c: [Complex64; SITES] = std::array::from_fn(|i| (0..SITES).map(|j| a[j] * k(i, j)).sum());
    let constant: f64 = (0..SITES).map(|i| (a[i].conj() * c[i]).re).sum();
    let field: [f64; SITES] = std::array::from_fn(|i| 2.0 * p.lambda * a[i].re);

    let n_c = space.n_c();
    let sqrt: Vec<f64> = (0..=n_c).map(|n| (n as f64).sqrt()).collect();
    let dim = space.dim();
    let mut t = Vec::with_capacity(dim * 24);
    let re = |v: f64| Complex64::new(v, 0.0);

    for idx in 0..dim {
        let (n, s) = space.decode(idx);
        let sbits = idx % SPIN_DIM;
        let mut diag = constant;
        for i in 0..SITES {
            diag += p.omega * n[i] as f64 + 0.5 * p.qubit_gap * if s[i] { 1.0 } else { -1.0 };
        }
        t.push((idx, idx, re(diag)));

        for i in 0..SITES {
            let stride = space.photon_stride(i) * SPIN_DIM;
            let up = n[i] + 1 < n_c;
            let down = n[i] > 0;
            let flip = (idx - sbits) + (sbits ^ spin_mask(i));
            // λ(a + a†)σx
            if down {
                t.push((flip - stride, idx, re(p.lambda * sqrt[n[i]])));
            }
            if up {
                t.push((flip + stride, idx, re(p.lambda * sqrt[n[i] + 1])));
            }
            if field[i] != 0.0 {
                t.push((flip, idx, re(field[i])));
            }
            // c_i a_i† + c_i* a_i
            if c[i] != Complex64::new(0.0, 0.0) {
                if up {
                    t.push((idx + stride, idx, c[i] * sqrt[n[i] + 1]));
                }
                if down {
                    t.push((idx - stride, idx, c[i].conj() * sqrt[n[i]]));
                }
            }
            // M_ij a_i† a_j
            for j in 0..SITES {
                if j == i || m[i][j] == 0.0 || n[j] == 0 || !up {
                    continue;
                }
                let target = idx + stride - space.photon_stride(j) * SPIN_DIM;
                t.push((target, idx, re(m[i][j] * sqrt[n[j]] * sqrt[n[i] + 1])));
            }
        }
    }
    Ok(OperatorMatrix::sparse(CsrMatrix::from_triplets(dim, t), true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::eigen::ground_state;

    #[test]
    fn uncoupled_hamiltonian_is_diagonal() {
        let space = FockSpace::new(3).unwrap();
        let p = ModelParams::new(1.0, 50.0, 0.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let csr = h.as_sparse().unwrap();
        for r in 0..space.dim() {
            assert!(csr.row(r).all(|(c, _)| c == r));
        }
        for idx in [0, 17, 1000] {
            let (n, s) = space.decode(idx);
            let e: f64 = n.iter().map(|&k| k as f64).sum::<f64>()
                + s.iter().map(|&u| if u { 25.0 } else { -25.0 }).sum::<f64>();
            assert_eq!(csr.get(idx, idx).re, e);
        }
        let gs = ground_state(&h, 1).unwrap();
        assert!((gs.values[0] + 100.0).abs() < 1e-10);
    }

    #[test]
    fn hermitian_and_real() {
        let space = FockSpace::new(3).unwrap();
        let p = ModelParams::with_g(1.0, 50.0, 0.4, 0.05, 0.02).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        assert!(h.hermiticity_error().unwrap() < 1e-13);
        assert!(h.as_sparse().unwrap().is_real());
        let d = Displacements::real([0.3, -0.2, 0.1, 0.4]);
        let hd = build_displaced_hamiltonian(&p, &space, &d).unwrap();
        assert!(hd.hermiticity_error().unwrap() < 1e-13);
    }

    #[test]
    fn hopping_matrix_eigenvalues() {
        let p = ModelParams::new(1.0, 50.0, 0.0, 0.05, 0.02).unwrap();
        let m = hopping_matrix(&p);
        // staggered vector is an eigenvector with eigenvalue J2 − 2J1
        let v = [1.0, -1.0, 1.0, -1.0];
        for i in 0..SITES {
            let mv: f64 = (0..SITES).map(|j| m[i][j] * v[j]).sum();
            assert!((mv - (0.02 - 0.1) * v[i]).abs() < 1e-15);
        }
    }
}
