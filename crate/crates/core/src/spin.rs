//! Classical four-site J1-J2 spin model obtained by reading the low-energy
//! photon Hamiltonian as a Holstein–Primakoff boson theory.
//!
//! Energies are in units of `ωS`; `X_n = ⟨S^x_n⟩/S` and `Y_n = ⟨S^y_n⟩/S`
//! lie in the unit disk on each site.

use std::fmt;

use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::meanfield::{branch_pattern, classify_phase, srp_displacements, PhaseLabel};
use crate::model::{self, ModelParams, MomentumBranch, SITES, TIE_TOLERANCE};
use crate::optimize::{projected_gradient, GradientOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinConfig {
    pub x: [f64; SITES],
    pub y: [f64; SITES],
}

impl SpinConfig {
    pub fn zero() -> Self {
        Self {
            x: [0.0; SITES],
            y: [0.0; SITES],
        }
    }

    fn from_slice(v: &[f64]) -> Self {
        let mut c = Self::zero();
        c.x.copy_from_slice(&v[..SITES]);
        c.y.copy_from_slice(&v[SITES..]);
        c
    }

    #[cfg(test)]
    fn to_vec(self) -> Vec<f64> {
        self.x.iter().chain(self.y.iter()).copied().collect()
    }

    /// Signs of `X_n` with entries below `tol` counted as zero.
    pub fn sign_pattern(&self, tol: f64) -> [i8; SITES] {
        self.x.map(|v| if v > tol { 1 } else if v < -tol { -1 } else { 0 })
    }
}

/// The three solution families: uniform, staggered and paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpinBranch {
    I,
    II,
    III,
}

impl SpinBranch {
    pub const ALL: [Self; 3] = [Self::I, Self::II, Self::III];

    pub fn momentum(self) -> MomentumBranch {
        match self {
            Self::I => MomentumBranch::ZERO,
            Self::II => MomentumBranch::PI,
            Self::III => MomentumBranch::HALF_PI,
        }
    }

    pub fn from_momentum(q: MomentumBranch) -> Self {
        match q.family() {
            MomentumBranch::ZERO => Self::I,
            MomentumBranch::PI => Self::II,
            _ => Self::III,
        }
    }
}

impl fmt::Display for SpinBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::I => "i",
            Self::II => "ii",
            Self::III => "iii",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinSolution {
    pub branch: SpinBranch,
    pub x_value: f64,
    pub energy: f64,
    pub config: SpinConfig,
    /// False when `g` is below the branch onset and the solution is `X = 0`.
    pub condensed: bool,
}

/// `Σ_n [−√(1−X²−Y²) − 2g²X² + (J1/ω)(X X′ + Y Y′) + (J2/2ω)(X X″ + Y Y″)]`
/// with primes denoting the next and next-next site.
pub fn spin_meanfield_energy(p: &ModelParams, g: f64, c: &SpinConfig) -> Result<f64> {
    for n in 0..SITES {
        let r2 = c.x[n] * c.x[n] + c.y[n] * c.y[n];
        if r2 > 1.0 + 1e-15 {
            return Err(QrsError::DomainError(format!("site {n} has norm {} > 1", r2.sqrt())));
        }
    }
    Ok(energy_unchecked(p, g, c))
}

fn energy_unchecked(p: &ModelParams, g: f64, c: &SpinConfig) -> f64 {
    let (j1, j2) = (p.j1 / p.omega, p.j2 / p.omega);
    (0..SITES)
        .map(|n| {
            let (n1, n2) = ((n + 1) % SITES, (n + 2) % SITES);
            let r2 = c.x[n] * c.x[n] + c.y[n] * c.y[n];
            -(1.0 - r2).max(0.0).sqrt() - 2.0 * g * g * c.x[n] * c.x[n]
                + j1 * (c.x[n] * c.x[n1] + c.y[n] * c.y[n1])
                + 0.5 * j2 * (c.x[n] * c.x[n2] + c.y[n] * c.y[n2])
        })
        .sum()
}

/// Analytic gradient of [`spin_meanfield_energy`] as `[∂X_1..∂X_4, ∂Y_1..∂Y_4]`.
pub fn spin_energy_gradient(p: &ModelParams, g: f64, c: &SpinConfig) -> [f64; 2 * SITES] {
    let (j1, j2) = (p.j1 / p.omega, p.j2 / p.omega);
    let mut out = [0.0; 2 * SITES];
    for n in 0..SITES {
        let (next, prev, opp) = ((n + 1) % SITES, (n + 3) % SITES, (n + 2) % SITES);
        let root = (1.0 - c.x[n] * c.x[n] - c.y[n] * c.y[n]).max(1e-300).sqrt();
        out[n] = c.x[n] / root - 4.0 * g * g * c.x[n] + j1 * (c.x[next] + c.x[prev]) + j2 * c.x[opp];
        out[n + SITES] = c.y[n] / root + j1 * (c.y[next] + c.y[prev]) + j2 * c.y[opp];
    }
    out
}

/// `4g² − 4g_c²(q) + 1`; the branch condenses once this exceeds 1.
fn branch_drive(p: &ModelParams, g: f64, q: MomentumBranch) -> f64 {
    4.0 * g * g - model::hopping_shift(p, q) / p.omega
}

/// `X = √(1 − (4g² − 4g_c² + 1)^{−2})` in the branch's sign pattern, or the
/// untagged `X = 0` below onset.
pub fn spin_branch_solution(p: &ModelParams, g: f64, branch: SpinBranch) -> Result<SpinSolution> {
    let q = branch.momentum();
    let r = branch_drive(p, g, q);
    let (x_value, condensed) = if r > 1.0 {
        ((1.0 - 1.0 / (r * r)).sqrt(), true)
    } else {
        (0.0, false)
    };
    let config = SpinConfig {
        x: branch_pattern(q).map(|s| s * x_value),
        y: [0.0; SITES],
    };
    Ok(SpinSolution {
        branch,
        x_value,
        energy: spin_meanfield_energy(p, g, &config)?,
        config,
        condensed,
    })
}

/// Lowest-energy analytic branch; `None` when no branch has condensed.
/// The second element names a branch tied with the first.
pub fn best_spin_branch(p: &ModelParams, g: f64) -> Result<Option<(SpinSolution, Option<SpinBranch>)>> {
    let mut sols: Vec<SpinSolution> = Vec::new();
    for b in SpinBranch::ALL {
        let s = spin_branch_solution(p, g, b)?;
        if s.condensed {
            sols.push(s);
        }
    }
    sols.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let Some(best) = sols.first().cloned() else {
        return Ok(None);
    };
    let tie = sols
        .get(1)
        .filter(|s| (s.energy - best.energy).abs() <= TIE_TOLERANCE * best.energy.abs().max(1.0))
        .map(|s| s.branch);
    Ok(Some((best, tie)))
}

/// Number of deterministic starts of [`minimize_spin_energy`].
pub const SPIN_STARTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinMinimum {
    pub config: SpinConfig,
    pub energy: f64,
    /// Starts whose projected-gradient run met the tolerance.
    pub converged_starts: usize,
    pub starts: usize,
}

fn project_disk(v: &mut [f64]) {
    const R_MAX: f64 = 1.0 - 1e-12;
    for n in 0..SITES {
        let r = (v[n] * v[n] + v[n + SITES] * v[n + SITES]).sqrt();
        if r > R_MAX {
            v[n] *= R_MAX / r;
            v[n + SITES] *= R_MAX / r;
        }
    }
}

/// Multi-start projected gradient descent over `(X_n, Y_n)`, starts drawn
/// uniformly from `[−1, 1]⁸` and projected onto the per-site unit disk.
pub fn minimize_spin_energy(p: &ModelParams, g: f64, seed: u64) -> Result<SpinMinimum> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let f = |v: &[f64]| energy_unchecked(p, g, &SpinConfig::from_slice(v));
    let grad = |v: &[f64]| spin_energy_gradient(p, g, &SpinConfig::from_slice(v)).to_vec();
    let opts = GradientOptions::default();

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut converged = 0;
    let mut worst_residual: f64 = 0.0;
    for _ in 0..SPIN_STARTS {
        let x0: Vec<f64> = (0..2 * SITES).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = projected_gradient(&f, &grad, &project_disk, &x0, &opts);
        if r.converged {
            converged += 1;
        } else {
            worst_residual = worst_residual.max(r.grad_norm);
        }
        if best.as_ref().map_or(true, |(_, e)| r.value < *e) {
            best = Some((r.x, r.value));
        }
    }
    if converged == 0 {
        return Err(QrsError::NoConvergence {
            iterations: opts.max_iters,
            residual: worst_residual,
        });
    }
    let (x, energy) = best.expect("at least one start");
    Ok(SpinMinimum {
        config: SpinConfig::from_slice(&x),
        energy,
        converged_starts: converged,
        starts: SPIN_STARTS,
    })
}

/// Onset of a branch found from the spin energy alone: the coupling where the
/// curvature of `E` at the origin along the branch pattern changes sign.
pub fn spin_onset(p: &ModelParams, branch: SpinBranch) -> Result<f64> {
    let pat = branch_pattern(branch.momentum());
    let h = 1e-4;
    let curvature = |g: f64| {
        let c = |t: f64| SpinConfig {
            x: pat.map(|s| s * t),
            y: [0.0; SITES],
        };
        (energy_unchecked(p, g, &c(h)) - 2.0 * energy_unchecked(p, g, &c(0.0)) + energy_unchecked(p, g, &c(-h)))
            / (h * h)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if curvature(lo) <= 0.0 {
        return Err(QrsError::NoRoot(format!("branch {branch} is unstable at g = 0")));
    }
    while curvature(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e3 {
            return Err(QrsError::NoRoot(format!("branch {branch} never condenses")));
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if curvature(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cross-check of the spin picture against the optical displacements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub g: f64,
    pub spin_branch: Option<SpinBranch>,
    pub spin_tie: Option<SpinBranch>,
    pub phase: PhaseLabel,
    pub optical_branch: Option<MomentumBranch>,
    pub spin_pattern: [i8; SITES],
    pub optical_pattern: [i8; SITES],
    pub onset_spin: f64,
    pub onset_optical: f64,
    /// `X²(g_c + 2δ)/X²(g_c + δ)`, 2 for a linear onset.
    pub spin_onset_ratio: f64,
    /// Same for `A²`.
    pub optical_onset_ratio: f64,
    /// `A²/X²` at `g` (diagnostic only).
    pub a2_over_x2: Option<f64>,
    pub failures: Vec<String>,
}

impl ComparisonReport {
    pub fn ensure(&self) -> Result<()> {
        if self.failures.is_empty() {
            Ok(())
        } else {
            Err(QrsError::Mismatch(self.failures.clone()))
        }
    }
}

fn optical_sign_pattern(re: &[f64; SITES]) -> [i8; SITES] {
    re.map(|v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
}

/// Compares the winning spin branch with the winning optical branch at `g`:
/// sign pattern, onset coupling, and linear vanishing of `X²` and `A²`.
pub fn compare_to_displacements(p: &ModelParams, g: f64) -> Result<ComparisonReport> {
    let mut failures = Vec::new();
    let phase = classify_phase(p, g)?;
    let spin = best_spin_branch(p, g)?;
    let (spin_branch, spin_tie, spin_pattern, x) = match &spin {
        Some((s, tie)) => (Some(s.branch), *tie, s.config.sign_pattern(0.0), s.x_value),
        None => (None, None, [0; SITES], 0.0),
    };
    let optical_branch = phase.branch;
    let optical = match optical_branch {
        Some(q) => Some(srp_displacements(p, g, q)?[0]),
        None => None,
    };
    let optical_pattern = optical.map_or([0; SITES], |d| optical_sign_pattern(&d.re));

    let spin_is_tie = spin_tie.is_some();
    let optical_is_tie = phase.label == PhaseLabel::Boundary;
    if spin_is_tie != optical_is_tie {
        failures.push(format!("tie disagreement: spin {spin_is_tie}, optical {optical_is_tie}"));
    } else if !optical_is_tie {
        if spin_branch.map(SpinBranch::momentum) != optical_branch.map(MomentumBranch::family) {
            failures.push(format!("branch: spin {spin_branch:?}, optical {optical_branch:?}"));
        }
        if spin_pattern != optical_pattern {
            failures.push(format!("sign pattern: spin {spin_pattern:?}, optical {optical_pattern:?}"));
        }
    }

    let dom = model::dominant_branch(p)?;
    let reference = SpinBranch::from_momentum(optical_branch.unwrap_or(dom.branch));
    let onset_spin = spin_onset(p, reference)?;
    let onset_optical = model::critical_coupling(p, reference.momentum())?;
    if (onset_spin - onset_optical).abs() > 1e-6 {
        failures.push(format!("onset: spin {onset_spin}, optical {onset_optical}"));
    }

    let delta = 1e-6;
    let x2 = |gg: f64| spin_branch_solution(p, gg, reference).map(|s| s.x_value * s.x_value);
    let a2 = |gg: f64| crate::meanfield::amplitude_sq(p, gg, reference.momentum());
    let spin_onset_ratio = x2(onset_optical + 2.0 * delta)? / x2(onset_optical + delta)?;
    let optical_onset_ratio = a2(onset_optical + 2.0 * delta)? / a2(onset_optical + delta)?;
    for (name, r) in [("X^2", spin_onset_ratio), ("A^2", optical_onset_ratio)] {
        if (r - 2.0).abs() > 1e-3 {
            failures.push(format!("{name} onset not linear: ratio {r}"));
        }
    }

    let a2_over_x2 = optical.filter(|_| x > 0.0).map(|d| d.re[0] * d.re[0] / (x * x));
    Ok(ComparisonReport {
        g,
        spin_branch,
        spin_tie,
        phase: phase.label,
        optical_branch,
        spin_pattern,
        optical_pattern,
        onset_spin,
        onset_optical,
        spin_onset_ratio,
        optical_onset_ratio,
        a2_over_x2,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig(j2: f64) -> ModelParams {
        ModelParams::new(1.0, 50.0, 0.0, 0.05, j2).unwrap()
    }

    fn fd_gradient(p: &ModelParams, g: f64, c: &SpinConfig) -> Vec<f64> {
        let h = 1e-6;
        let v = c.to_vec();
        (0..2 * SITES)
            .map(|i| {
                let (mut a, mut b) = (v.clone(), v.clone());
                a[i] += h;
                b[i] -= h;
                (energy_unchecked(p, g, &SpinConfig::from_slice(&a)) - energy_unchecked(p, g, &SpinConfig::from_slice(&b)))
                    / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn energy_examples() {
        assert_eq!(spin_meanfield_energy(&fig(0.02), 0.6, &SpinConfig::zero()).unwrap(), -4.0);
        let free = ModelParams::default();
        let c = SpinConfig {
            x: [0.4; 4],
            y: [0.0; 4],
        };
        let e = spin_meanfield_energy(&free, 0.6, &c).unwrap();
        assert_abs_diff_eq!(e, 4.0 * (-(1.0f64 - 0.16).sqrt() - 2.0 * 0.36 * 0.16), epsilon = 1e-14);
        let bad = SpinConfig {
            x: [0.9, 0.0, 0.0, 0.0],
            y: [0.9, 0.0, 0.0, 0.0],
        };
        assert!(matches!(spin_meanfield_energy(&free, 0.6, &bad), Err(QrsError::DomainError(_))));
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let c = SpinConfig {
            x: [0.3, -0.2, 0.5, 0.1],
            y: [0.1, 0.4, -0.3, 0.2],
        };
        let p = fig(0.07);
        let fd = fd_gradient(&p, 0.55, &c);
        let an = spin_energy_gradient(&p, 0.55, &c);
        for (a, b) in fd.iter().zip(an.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn branch_examples() {
        let s = spin_branch_solution(&fig(0.02), 0.6, SpinBranch::II).unwrap();
        assert_abs_diff_eq!(s.x_value, (1.0 - 1.0 / 1.52f64.powi(2)).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s.x_value, 0.753109, epsilon = 1e-6);
        assert_eq!(s.config.sign_pattern(0.0), [1, -1, 1, -1]);
        let gc = model::critical_coupling(&fig(0.02), MomentumBranch::PI).unwrap();
        let at = spin_branch_solution(&fig(0.02), gc, SpinBranch::II).unwrap();
        assert_eq!(at.x_value, 0.0);
        assert!(!at.condensed);
        let far = spin_branch_solution(&fig(0.02), 1e4, SpinBranch::II).unwrap();
        assert!(1.0 - far.x_value < 1e-12);
    }

    #[test]
    fn branches_are_stationary() {
        for j2 in [0.02, 0.07] {
            let p = fig(j2);
            for b in SpinBranch::ALL {
                let s = spin_branch_solution(&p, 0.6, b).unwrap();
                let fd = fd_gradient(&p, 0.6, &s.config);
                assert!(fd.iter().all(|v| v.abs() < 1e-8), "{b}: {fd:?}");
            }
        }
    }

    #[test]
    fn energy_invariances() {
        let p = fig(0.07);
        let c = SpinConfig {
            x: [0.3, -0.2, 0.5, 0.1],
            y: [0.1, 0.4, -0.3, 0.2],
        };
        let e = energy_unchecked(&p, 0.5, &c);
        let flipped = SpinConfig {
            x: c.x.map(|v| -v),
            y: c.y,
        };
        let shifted = SpinConfig {
            x: [c.x[1], c.x[2], c.x[3], c.x[0]],
            y: [c.y[1], c.y[2], c.y[3], c.y[0]],
        };
        let mirrored = SpinConfig {
            x: c.x,
            y: c.y.map(|v| -v),
        };
        for other in [flipped, shifted, mirrored] {
            assert_abs_diff_eq!(energy_unchecked(&p, 0.5, &other), e, epsilon = 1e-14);
        }
    }

    #[test]
    fn minimizer_matches_branches() {
        let p = fig(0.02);
        let m = minimize_spin_energy(&p, 0.6, 1).unwrap();
        let (best, _) = best_spin_branch(&p, 0.6).unwrap().unwrap();
        assert_eq!(best.branch, SpinBranch::II);
        assert_abs_diff_eq!(m.energy, best.energy, epsilon = 1e-8);
        let s = m.config.sign_pattern(1e-3);
        assert!(s == [1, -1, 1, -1] || s == [-1, 1, -1, 1], "{s:?}");

        let np = minimize_spin_energy(&p, 0.3, 1).unwrap();
        assert_abs_diff_eq!(np.energy, -4.0, epsilon = 1e-12);
        assert!(np.config.x.iter().all(|v| v.abs() < 1e-6));
    }

    #[test]
    fn comparison_reports() {
        for (j2, g) in [(0.02, 0.3), (0.02, 0.6), (0.07, 0.6), (0.05, 0.6)] {
            let r = compare_to_displacements(&fig(j2), g).unwrap();
            assert!(r.failures.is_empty(), "J2 = {j2}, g = {g}: {:?}", r.failures);
        }
        let tie = compare_to_displacements(&fig(0.05), 0.6).unwrap();
        assert!(tie.spin_tie.is_some());
        assert_eq!(tie.phase, PhaseLabel::Boundary);
    }
}
