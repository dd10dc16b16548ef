//! Exact-diagonalization counterparts of the mean-field observables.
//!
//! The condensate is handled in the displaced frame: the Hamiltonian is
//! rebuilt with `a_n → a_n + α_n` and only the fluctuations live in the
//! truncated space. The field of a displaced-frame state is `α + ⟨a⟩′`.

use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::fock::eigen::{ground_state_with, EigenOptions, Method, SpectralResult};
use crate::fock::hamiltonian::{build_displaced_hamiltonian, build_hamiltonian};
use crate::fock::space::{FockSpace, DEFAULT_DIM_CAP};
use crate::fock::state::{
    expectation, fidelity, meanfield_state, observables, Frame, MeanFieldPhase, QuantumState,
};
use crate::meanfield::{self, branch_pattern, classify_phase, Displacements, PhaseLabel};
use crate::model::{self, ModelParams, MomentumBranch, SITES};

/// Amplitude used to probe the linear field response at the origin.
pub const RESPONSE_PROBE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdConfig {
    pub n_c: usize,
    pub dim_cap: usize,
    pub eigen: EigenOptions,
}

impl EdConfig {
    pub fn new(n_c: usize) -> Self {
        Self {
            n_c,
            dim_cap: DEFAULT_DIM_CAP,
            eigen: EigenOptions::default(),
        }
    }

    pub fn space(&self) -> Result<FockSpace> {
        FockSpace::with_cap(self.n_c, self.dim_cap)
    }
}

/// Displaced-frame ED at one coupling, next to the analytic solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdPoint {
    pub g: f64,
    pub label: PhaseLabel,
    pub branch: Option<MomentumBranch>,
    pub alpha_analytic: Displacements,
    /// `α + ⟨a⟩′` of the displaced-frame ground state.
    pub field: Displacements,
    pub abs_alpha_analytic: f64,
    pub abs_alpha_ed: f64,
    pub corr_ed: f64,
    pub energy_ed: f64,
    /// Analytic energy including the zero-point term, when it is real.
    pub energy_analytic: Option<f64>,
    /// Analytic energy without the zero-point term.
    pub energy_analytic_mean_field: f64,
    /// `⟨ψ_g|H|ψ_g⟩` of the mean-field state; bounded below by `energy_ed`.
    pub energy_variational: f64,
    pub infidelity: f64,
    pub residual: f64,
    pub method: Method,
}

fn analytic_reference(p: &ModelParams, g: f64) -> Result<(PhaseLabel, Option<MomentumBranch>, Displacements, MeanFieldPhase, Option<f64>, f64)> {
    let pt = classify_phase(p, g)?;
    match pt.branch {
        None => {
            let e = model::np_ground_energy(p, g).ok();
            let mf = model::np_constant_energy(p, g);
            Ok((pt.label, None, Displacements::zero(), MeanFieldPhase::Normal, e, mf))
        }
        Some(q) => {
            let sol = meanfield::srp_solution(p, g, q)?;
            Ok((
                pt.label,
                Some(q),
                sol.configurations[0],
                MeanFieldPhase::Condensed(q, 0),
                sol.energy_terms.total(q).ok(),
                sol.energy_terms.mean_field(),
            ))
        }
    }
}

/// ED of `H(a + α)` with `α` the analytic displacement of the ground phase
/// (zero in the normal phase, the first configuration otherwise).
pub fn ed_point(p: &ModelParams, g: f64, cfg: &EdConfig) -> Result<EdPoint> {
    let space = cfg.space()?;
    let (label, branch, alpha, phase, energy_analytic, energy_mf) = analytic_reference(p, g)?;
    let h = build_displaced_hamiltonian(p, &space, &alpha)?;
    let spectrum = ground_state_with(&h, 1, &cfg.eigen, None)?;
    let psi = QuantumState::new(space, spectrum.vectors[0].clone())?;
    let field = observables(&psi).shifted_field(&alpha);
    let mf = meanfield_state(p, g, phase, &space, Frame::Displaced)?;
    let infidelity = 1.0 - fidelity(&mf.state, std::slice::from_ref(&psi))?;
    Ok(EdPoint {
        g,
        label,
        branch,
        alpha_analytic: alpha,
        field,
        abs_alpha_analytic: alpha.abs_alpha(),
        abs_alpha_ed: field.abs_alpha(),
        corr_ed: field.corr(),
        energy_ed: spectrum.values[0],
        energy_analytic,
        energy_analytic_mean_field: energy_mf,
        energy_variational: expectation(&h, &mf.state),
        infidelity,
        residual: spectrum.residuals[0],
        method: spectrum.method,
    })
}

/// `k` lowest levels of the lab-frame Hamiltonian.
pub fn lab_spectrum(p: &ModelParams, cfg: &EdConfig, k: usize) -> Result<SpectralResult> {
    let space = cfg.space()?;
    let h = build_hamiltonian(p, &space)?;
    ground_state_with(&h, k, &cfg.eigen, None)
}

/// Lab-frame infidelity: the mean-field state against the span of the
/// `degeneracy` lowest lab eigenstates. Only meaningful when the cutoff
/// can hold the condensate, `|α|² ≪ n_c`.
pub fn lab_infidelity(p: &ModelParams, g: f64, cfg: &EdConfig) -> Result<f64> {
    let space = cfg.space()?;
    let (_, branch, _, phase, _, _) = analytic_reference(p, g)?;
    let k = branch.map_or(1, meanfield::degeneracy);
    let spectrum = lab_spectrum(p, cfg, k)?;
    let subspace = spectrum
        .vectors
        .into_iter()
        .map(|v| QuantumState::new(space, v))
        .collect::<Result<Vec<_>>>()?;
    let mf = meanfield_state(p, g, phase, &space, Frame::Lab)?;
    Ok(1.0 - fidelity(&mf.state, &subspace)?)
}

/// Projection of the field `α + ⟨a⟩′` on the pattern of `q`, for the
/// ground state of `H(a + A·u_q)`.
pub fn pattern_field(p: &ModelParams, q: MomentumBranch, amplitude: f64, cfg: &EdConfig) -> Result<f64> {
    let space = cfg.space()?;
    let u = branch_pattern(q);
    let alpha = Displacements::real(u.map(|s| s * amplitude));
    let h = build_displaced_hamiltonian(p, &space, &alpha)?;
    let spectrum = ground_state_with(&h, 1, &cfg.eigen, None)?;
    let psi = QuantumState::new(space, spectrum.vectors[0].clone())?;
    let field = observables(&psi).shifted_field(&alpha);
    Ok((0..SITES).map(|n| u[n] * field.re[n]).sum::<f64>() / SITES as f64)
}

/// Linear response of the pattern field at the origin: `A_out / A_in` for a
/// small probe. A self-consistent condensate bifurcates from zero where it
/// crosses 1.
pub fn field_response(p: &ModelParams, q: MomentumBranch, cfg: &EdConfig) -> Result<f64> {
    Ok(pattern_field(p, q, RESPONSE_PROBE, cfg)? / RESPONSE_PROBE)
}

/// Self-consistent ED amplitude along the pattern of `q`: the `A ≥ 0` for
/// which the displaced-frame state carries no extra field. Zero when the
/// origin is stable.
pub fn self_consistent_amplitude(p: &ModelParams, q: MomentumBranch, cfg: &EdConfig, tol: f64) -> Result<f64> {
    if field_response(p, q, cfg)? <= 1.0 {
        return Ok(0.0);
    }
    let f = |a: f64| -> Result<f64> { Ok(pattern_field(p, q, a, cfg)? - a) };
    let mut lo = RESPONSE_PROBE;
    let mut f_lo = f(lo)?;
    let guess = meanfield::amplitude_sq(p, p.g(), q).map(f64::sqrt).unwrap_or(0.0);
    let mut hi = guess.max(2.0 * RESPONSE_PROBE);
    let mut f_hi = f(hi)?;
    let mut expansions = 0;
    while f_hi > 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 1.5;
        f_hi = f(hi)?;
        expansions += 1;
        if expansions > 20 {
            return Err(QrsError::NoRoot(format!("pattern field still exceeds the amplitude at A = {hi}")));
        }
    }
    // Illinois false position
    let mut side = 0i8;
    for _ in 0..100 {
        let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let f_mid = f(mid)?;
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
        if hi - lo < tol || f_mid.abs() < 1e-3 * tol {
            return Ok(mid);
        }
    }
    Err(QrsError::NoConvergence {
        iterations: 100,
        residual: hi - lo,
    })
}

/// ED onset of the order parameter on branch `q`: the coupling in
/// `bracket` where [`field_response`] crosses 1, bisected to `tol`.
pub fn ed_onset(base: &ModelParams, q: MomentumBranch, bracket: (f64, f64), tol: f64, cfg: &EdConfig) -> Result<f64> {
    let s = |g: f64| -> Result<f64> { Ok(field_response(&base.at_g(g), q, cfg)? - 1.0) };
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(QrsError::InvalidParams(format!("bracket ({lo}, {hi}) is not ordered")));
    }
    if s(lo)? > 0.0 || s(hi)? <= 0.0 {
        return Err(QrsError::NoRoot(format!("field response does not cross 1 on ({lo}, {hi})")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if s(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
