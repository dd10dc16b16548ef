//! States on the truncated space, the mean-field ground state, fidelities
//! and local observables.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::fock::space::{spin_mask, FockSpace, SPIN_DIM};
use crate::fock::transform::{apply_mode, displacement_mode_matrix, expm_action, squeeze_generator};
use crate::meanfield::{self, Displacements};
use crate::model::{self, ModelParams, MomentumBranch, SITES};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalised state vector in the cavity-major, spin-minor basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: FockSpace,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Normalises `amplitudes`; errors on a zero or wrongly sized vector.
    pub fn new(space: FockSpace, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(QrsError::InvalidParams(format!(
                "state has {} amplitudes, space dimension is {}",
                amplitudes.len(),
                space.dim()
            )));
        }
        let n = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(QrsError::InvalidParams("state has zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { space, amplitudes })
    }

    /// Keeps `amplitudes` verbatim when already normalised to 1e-12.
    pub(crate) fn from_stored(space: FockSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.len() == space.dim() && (n - 1.0).abs() < 1e-12 {
            Ok(Self { space, amplitudes })
        } else {
            Self::new(space, amplitudes)
        }
    }

    pub fn basis(space: FockSpace, idx: usize) -> Self {
        let mut amplitudes = vec![ZERO; space.dim()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Self { space, amplitudes }
    }

    /// Photon vacuum with every spin down.
    pub fn vacuum(space: FockSpace) -> Self {
        Self::basis(space, 0)
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Squared norm of the projection of `psi` onto the span of `subspace`
/// (assumed orthonormal), clamped to `[0, 1]`.
pub fn fidelity(psi: &QuantumState, subspace: &[QuantumState]) -> Result<f64> {
    if subspace.is_empty() {
        return Err(QrsError::EmptySubspace);
    }
    let f: f64 = subspace.iter().map(|v| v.inner(psi).norm_sqr()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Frame in which a state is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Frame {
    /// Eigenstates of `H` itself.
    Lab,
    /// Eigenstates of `H(a + α)`; the mean-field state omits `D†(α)`.
    Displaced,
}

/// Which mean-field solution to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeanFieldPhase {
    Normal,
    /// Condensed branch and the index into its degenerate configurations.
    Condensed(MomentumBranch, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldState {
    pub state: QuantumState,
    pub alpha: Displacements,
    /// Coupling at which the squeeze parameters are evaluated (`g` or `g′`).
    pub g_squeeze: f64,
    pub squeeze: [f64; SITES],
    /// `|‖ψ‖ − 1|` before the final normalisation.
    pub unitarity_loss: f64,
}

/// `|ψ_g⟩ = D†(α) Π_q S_q(λ_q) |0⟩ ⊗ Π_n |−⟩_n`, with
/// `|−⟩ = −sin γ|↑⟩ + cos γ|↓⟩` and `tan 2γ_n = 4λA_n/Ω`.
///
/// In the normal phase `α = 0`, `γ = 0` and `λ_q = λ_q[g]`; in a condensed
/// phase `λ_q = λ_q[g′]`. In the displaced frame `D†(α)` is left out.
pub fn meanfield_state(
    p: &ModelParams,
    g: f64,
    phase: MeanFieldPhase,
    space: &FockSpace,
    frame: Frame,
) -> Result<MeanFieldState> {
    let (alpha, g_squeeze) = match phase {
        MeanFieldPhase::Normal => (Displacements::zero(), g),
        MeanFieldPhase::Condensed(q0, k) => {
            let configs = meanfield::srp_displacements(p, g, q0)?;
            let d = *configs.get(k).ok_or_else(|| {
                QrsError::InvalidParams(format!("branch {q0} has {} configurations, asked for {k}", configs.len()))
            })?;
            (d, meanfield::effective_coupling(p, g, q0)?)
        }
    };
    let squeeze: [f64; SITES] = {
        let mut s = [0.0; SITES];
        for q in MomentumBranch::ALL {
            s[q.index() as usize] = model::squeeze_parameter(p, g_squeeze, q)?;
        }
        s
    };

    let mut photons = vec![ZERO; space.photon_dim()];
    photons[0] = Complex64::new(1.0, 0.0);
    for q in MomentumBranch::ALL {
        let lam = squeeze[q.index() as usize];
        if lam != 0.0 {
            photons = expm_action(&squeeze_generator(space, q, lam), &photons);
        }
    }
    if frame == Frame::Lab {
        for n in 0..SITES {
            let a = alpha.alpha(n);
            if a != ZERO {
                let d_dag = displacement_mode_matrix(space.n_c(), a).adjoint();
                photons = apply_mode(space, &d_dag, n, &photons);
            }
        }
    }

    let lambda = p.lambda_for(g);
    let mut spins = vec![Complex64::new(1.0, 0.0); 1];
    for n in 0..SITES {
        let gamma = 0.5 * (4.0 * lambda * alpha.re[n]).atan2(p.qubit_gap);
        let (up, down) = (-gamma.sin(), gamma.cos());
        spins = spins
            .iter()
            .flat_map(|&s| [s * down, s * up])
            .collect();
    }

    let mut amps = vec![ZERO; space.dim()];
    for (pi, &pv) in photons.iter().enumerate() {
        if pv == ZERO {
            continue;
        }
        for (si, &sv) in spins.iter().enumerate() {
            amps[pi * SPIN_DIM + si] = pv * sv;
        }
    }
    let raw_norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok(MeanFieldState {
        state: QuantumState::new(*space, amps)?,
        alpha,
        g_squeeze,
        squeeze,
        unitarity_loss: (raw_norm - 1.0).abs(),
    })
}

/// Site-resolved expectation values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    /// `⟨a_n⟩` as `(re, im)`.
    pub a: [(f64, f64); SITES],
    pub photons: [f64; SITES],
    pub sigma_z: [f64; SITES],
    pub sigma_x: [f64; SITES],
}

impl Observables {
    pub fn field(&self) -> Displacements {
        Displacements {
            re: self.a.map(|v| v.0),
            im: self.a.map(|v| v.1),
        }
    }

    /// `⟨a_n⟩ + α_n`: the lab-frame field of a displaced-frame state.
    pub fn shifted_field(&self, alpha: &Displacements) -> Displacements {
        let f = self.field();
        Displacements {
            re: std::array::from_fn(|n| f.re[n] + alpha.re[n]),
            im: std::array::from_fn(|n| f.im[n] + alpha.im[n]),
        }
    }
}

pub fn observables(state: &QuantumState) -> Observables {
    let space = state.space();
    let amps = state.amplitudes();
    let n_c = space.n_c();
    let mut a = [ZERO; SITES];
    let mut photons = [0.0; SITES];
    let mut sz = [0.0; SITES];
    let mut sx = [0.0; SITES];
    for (idx, &v) in amps.iter().enumerate() {
        if v == ZERO {
            continue;
        }
        let (n, s) = space.decode(idx);
        let sbits = idx % SPIN_DIM;
        let w = v.norm_sqr();
        for i in 0..SITES {
            photons[i] += w * n[i] as f64;
            sz[i] += w * if s[i] { 1.0 } else { -1.0 };
            let flip = idx - sbits + (sbits ^ spin_mask(i));
            sx[i] += (amps[flip].conj() * v).re;
            // ⟨ψ|a_i|ψ⟩ = Σ conj(ψ[n−1]) √n ψ[n]
            if n[i] > 0 && n[i] <= n_c - 1 {
                let lower = idx - space.photon_stride(i) * SPIN_DIM;
                a[i] += amps[lower].conj() * v * (n[i] as f64).sqrt();
            }
        }
    }
    Observables {
        a: a.map(|c| (c.re, c.im)),
        photons,
        sigma_z: sz,
        sigma_x: sx,
    }
}

/// `⟨ψ|H|ψ⟩` for a Hermitian operator.
pub fn expectation(op: &crate::fock::operator::OperatorMatrix, state: &QuantumState) -> f64 {
    let hv = op.apply(state.amplitudes());
    state
        .amplitudes()
        .iter()
        .zip(&hv)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}
