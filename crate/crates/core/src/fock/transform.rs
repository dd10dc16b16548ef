//! Displacement and momentum-space squeeze operators on the truncated
//! photon space.
//!
//! Both are exponentials of anti-Hermitian truncated generators, so they
//! are unitary on the truncated space up to rounding; the measured loss is
//! attached to every returned operator. Truncation still changes their
//! action relative to the untruncated operators once the generated states
//! approach the cutoff.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::operator::{CsrMatrix, OperatorMatrix};
use crate::fock::space::FockSpace;
use crate::meanfield::Displacements;
use crate::model::{MomentumBranch, SITES};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Loss above which a warning is logged.
pub const UNITARITY_WARN: f64 = 1e-6;

/// Truncated annihilation operator on `0..n_c`.
pub fn annihilation(n_c: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_c, n_c, |r, c| {
        if c == r + 1 {
            Complex64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Single-mode `D(α) = exp(α* a − α a†)`, so that `D a D† = a + α`.
pub fn displacement_mode_matrix(n_c: usize, alpha: Complex64) -> DMatrix<Complex64> {
    let a = annihilation(n_c);
    let gen = a.map(|v| v * alpha.conj()) - a.adjoint().map(|v| v * alpha);
    gen.exp()
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// `‖U†U − 1‖_max`.
pub fn unitarity_loss(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

fn warn_if_lossy(what: &str, loss: f64) {
    if loss > UNITARITY_WARN {
        log::warn!("{what}: unitarity loss {loss:e} exceeds {UNITARITY_WARN:e}");
    }
}

/// `D(α) = Π_n exp(α_n* a_n − α_n a_n†)` as a photon-space operator.
pub fn displacement_operator(space: &FockSpace, alpha: &Displacements) -> OperatorMatrix {
    let n_c = space.n_c();
    let mut m = displacement_mode_matrix(n_c, alpha.alpha(0));
    for n in 1..SITES {
        m = kron(&m, &displacement_mode_matrix(n_c, alpha.alpha(n)));
    }
    let loss = unitarity_loss(&m);
    warn_if_lossy("displacement", loss);
    OperatorMatrix::photonic(m, false).with_unitarity_loss(loss)
}

/// Applies a single-mode matrix to cavity `site` of a photon-space vector.
pub fn apply_mode(space: &FockSpace, u: &DMatrix<Complex64>, site: usize, v: &[Complex64]) -> Vec<Complex64> {
    let n_c = space.n_c();
    let stride = space.photon_stride(site);
    let mut out = vec![ZERO; v.len()];
    for base in 0..v.len() {
        if (base / stride) % n_c != 0 {
            continue;
        }
        for r in 0..n_c {
            let mut acc = ZERO;
            for c in 0..n_c {
                acc += u[(r, c)] * v[base + c * stride];
            }
            out[base + r * stride] = acc;
        }
    }
    out
}

/// Photon-space generator `λ_q (a_q† a_{−q}† − a_q a_{−q})` with
/// `a_q† = ½ Σ_n e^{−inq} a_n†`.
pub fn squeeze_generator(space: &FockSpace, q: MomentumBranch, lam: f64) -> CsrMatrix {
    let n_c = space.n_c();
    let pd = space.photon_dim();
    let sqrt: Vec<f64> = (0..=n_c).map(|n| (n as f64).sqrt()).collect();
    let phase = |k: i64| Complex64::from_polar(0.25, k as f64 * q.radians());
    let mut t = Vec::new();
    for idx in 0..pd {
        let n = space.photon_numbers(idx);
        for i in 0..SITES {
            for j in 0..SITES {
                // c_ij a_i† a_j† with c_ij = ¼ e^{i(j−i)q}
                let c = phase(j as i64 - i as i64) * lam;
                let mut m = n;
                let mut amp = 1.0;
                if m[j] + 1 >= n_c {
                    continue;
                }
                amp *= sqrt[m[j] + 1];
                m[j] += 1;
                if m[i] + 1 >= n_c {
                    continue;
                }
                amp *= sqrt[m[i] + 1];
                m[i] += 1;
                let target = space.photon_index(m);
                t.push((target, idx, c * amp));
                // minus the adjoint
                t.push((idx, target, -(c * amp).conj()));
            }
        }
    }
    CsrMatrix::from_triplets(pd, t)
}

/// `exp(G) v` by scaled Taylor series, `G` sparse.
pub fn expm_action(g: &CsrMatrix, v: &[Complex64]) -> Vec<Complex64> {
    let steps = g.norm_inf().ceil().max(1.0) as usize;
    let scale = 1.0 / steps as f64;
    let mut x = v.to_vec();
    let mut term = vec![ZERO; v.len()];
    let mut next = vec![ZERO; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut result = x.clone();
        let base = norm(&x).max(f64::MIN_POSITIVE);
        for k in 1..=60 {
            g.matvec_into(&term, &mut next);
            let f = scale / k as f64;
            for (t, nv) in term.iter_mut().zip(&next) {
                *t = nv * f;
            }
            for (r, t) in result.iter_mut().zip(&term) {
                *r += t;
            }
            if norm(&term) < 1e-17 * base {
                break;
            }
        }
        x = result;
    }
    x
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `S_q = exp[λ_q (a_q† a_{−q}† − a_q a_{−q})]` as a photon-space operator.
/// For `q ∈ {π/2, 3π/2}` the generator couples the partner modes, for
/// `q ∈ {0, π}` it squeezes a single Bloch mode.
pub fn momentum_squeeze_operator(space: &FockSpace, q: MomentumBranch, lam_q: f64) -> OperatorMatrix {
    let pd = space.photon_dim();
    let g = squeeze_generator(space, q, lam_q);
    let mut m = DMatrix::zeros(pd, pd);
    let mut e = vec![ZERO; pd];
    for col in 0..pd {
        e[col] = Complex64::new(1.0, 0.0);
        let v = expm_action(&g, &e);
        for (r, val) in v.into_iter().enumerate() {
            m[(r, col)] = val;
        }
        e[col] = ZERO;
    }
    let loss = unitarity_loss(&m);
    warn_if_lossy("squeeze", loss);
    OperatorMatrix::photonic(m, false).with_unitarity_loss(loss)
}
