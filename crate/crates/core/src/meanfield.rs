//! Superradiant mean-field solutions.
//!
//! Above `g_c(q)` the cavity fields condense, `a_n → a_n + α_n`, with
//! real amplitudes following one of three sign patterns:
//!
//! | branch | pattern            | degeneracy |
//! |--------|--------------------|------------|
//! | q = 0  | `( A,  A,  A,  A)` | 2          |
//! | q = π  | `( A, −A,  A, −A)` | 2          |
//! | q = π/2| `( A, −A, −A,  A)` | 4 (with its cyclic shift) |
//!
//! The displaced spins see a renormalised gap `Ω′` and coupling `λ′`, which
//! reduce to a single effective coupling `g′ = g_c³/g²`.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::model::{
    self, critical_coupling, dominant_branch, fluctuation_energy, ModelParams, MomentumBranch, SITES,
};
use crate::optimize::{multistart_nelder_mead, NelderMeadOptions};

/// Complex mean-field amplitudes `α_n = A_n + iB_n` on the four sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Displacements {
    pub re: [f64; SITES],
    pub im: [f64; SITES],
}

impl Displacements {
    pub fn zero() -> Self {
        Self {
            re: [0.0; SITES],
            im: [0.0; SITES],
        }
    }

    pub fn real(re: [f64; SITES]) -> Self {
        Self { re, im: [0.0; SITES] }
    }

    pub fn alpha(&self, n: usize) -> Complex64 {
        Complex64::new(self.re[n], self.im[n])
    }

    /// Root-mean-square amplitude; equals `|A|` for every analytic pattern.
    pub fn abs_alpha(&self) -> f64 {
        let s: f64 = (0..SITES).map(|n| self.alpha(n).norm_sqr()).sum();
        (s / SITES as f64).sqrt()
    }

    /// `⟨Re α_n α*_{n+2}⟩ / |α|`: positive for uniform/staggered order,
    /// negative for the paired (frustrated) pattern, zero without order.
    pub fn corr(&self) -> f64 {
        let a = self.abs_alpha();
        if a == 0.0 {
            return 0.0;
        }
        let s: f64 = (0..SITES)
            .map(|n| (self.alpha(n) * self.alpha((n + 2) % SITES).conj()).re)
            .sum();
        s / SITES as f64 / a
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            re: self.re.map(|v| v * k),
            im: self.im.map(|v| v * k),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..SITES)
            .map(|n| (self.alpha(n) - other.alpha(n)).norm())
            .fold(0.0, f64::max)
    }
}

/// Unit sign pattern of a branch (site 1 positive).
pub fn branch_pattern(q: MomentumBranch) -> [f64; SITES] {
    match q {
        MomentumBranch::ZERO => [1.0, 1.0, 1.0, 1.0],
        MomentumBranch::PI => [1.0, -1.0, 1.0, -1.0],
        MomentumBranch::HALF_PI => [1.0, -1.0, -1.0, 1.0],
        _ => [1.0, 1.0, -1.0, -1.0],
    }
}

/// Number of symmetry-related ground configurations of a branch.
pub fn degeneracy(q: MomentumBranch) -> usize {
    if q.is_self_conjugate() {
        2
    } else {
        4
    }
}

/// `4ωg_c²(q) = ω + J2 cos 2q + 2J1 cos q`, the denominator in the amplitude.
fn branch_denominator(p: &ModelParams, q: MomentumBranch) -> f64 {
    p.omega + model::hopping_shift(p, q)
}

/// `A² = (1/16λ²)(16λ⁴/(4ωg_c²)² − Ω²)`; errors below the branch threshold.
pub fn amplitude_sq(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<f64> {
    let g_c = critical_coupling(p, q)?;
    let lambda = p.lambda_for(g);
    let d = branch_denominator(p, q);
    let omega2 = p.qubit_gap * p.qubit_gap;
    let radicand = if lambda > 0.0 {
        16.0 * lambda.powi(4) / (d * d) - omega2
    } else {
        -omega2
    };
    if radicand < -1e-12 * omega2 {
        return Err(QrsError::BelowCritical { branch: q, g, g_c });
    }
    Ok(radicand.max(0.0) / (16.0 * lambda * lambda))
}

/// All degenerate displacement solutions of branch `q` at coupling `g`.
///
/// At exactly `g_c` the amplitudes are zero; below it the branch does not
/// exist and [`QrsError::BelowCritical`] is returned.
pub fn srp_displacements(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<Vec<Displacements>> {
    let a = amplitude_sq(p, g, q)?.sqrt();
    let mut patterns = vec![branch_pattern(q)];
    if !q.is_self_conjugate() {
        patterns.push(branch_pattern(q.neg()));
    }
    let mut out = Vec::with_capacity(degeneracy(q));
    for pat in patterns {
        let d = Displacements::real(pat.map(|s| s * a));
        out.push(d);
        out.push(d.scaled(-1.0));
    }
    Ok(out)
}

/// Renormalised spin parameters of a condensed branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Renormalized {
    pub g_prime: f64,
    pub omega_prime: f64,
    pub lambda_prime: f64,
    pub amplitude_sq: f64,
}

/// `Ω′ = √(Ω² + 16λ²A²)`, `λ′ = λΩ/Ω′`, `g′ = λ′/√(ωΩ′)`.
pub fn renormalized_params(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<Renormalized> {
    let a2 = amplitude_sq(p, g, q)?;
    let lambda = p.lambda_for(g);
    let omega_prime = (p.qubit_gap * p.qubit_gap + 16.0 * lambda * lambda * a2).sqrt();
    let lambda_prime = lambda * p.qubit_gap / omega_prime;
    Ok(Renormalized {
        g_prime: lambda_prime / (p.omega * omega_prime).sqrt(),
        omega_prime,
        lambda_prime,
        amplitude_sq: a2,
    })
}

/// Closed-form `g′ = g_c³(q₀)/g²`.
pub fn effective_coupling(p: &ModelParams, g: f64, q0: MomentumBranch) -> Result<f64> {
    let g_c = critical_coupling(p, q0)?;
    if g < g_c * (1.0 - 1e-12) {
        return Err(QrsError::BelowCritical { branch: q0, g, g_c });
    }
    Ok(g_c.powi(3) / (g * g))
}

/// The three pieces of the superradiant ground energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SrpEnergy {
    /// Condensate plus displaced-spin energy, `−[λ²/(g_c²ω) + Ω²g_c²ω/λ²]`.
    pub condensate: f64,
    /// `4(−ωg′² + ω²g′²/Ω′)`.
    pub spin_correction: f64,
    /// `½ Σ_q (ε′_q − ω′_q)`; `None` when some `ε′_q` is complex.
    pub fluctuation: Option<f64>,
}

impl SrpEnergy {
    pub fn mean_field(&self) -> f64 {
        self.condensate + self.spin_correction
    }

    pub fn total(&self, branch: MomentumBranch) -> Result<f64> {
        match self.fluctuation {
            Some(f) => Ok(self.mean_field() + f),
            None => Err(QrsError::ComplexEnergy {
                branch,
                radicand: f64::NAN,
            }),
        }
    }
}

pub fn srp_energy_terms(p: &ModelParams, g: f64, q0: MomentumBranch) -> Result<SrpEnergy> {
    let g_c = critical_coupling(p, q0)?;
    let ren = renormalized_params(p, g, q0)?;
    let lambda2 = p.lambda_for(g).powi(2);
    let gc2 = g_c * g_c;
    let condensate = -(lambda2 / (gc2 * p.omega) + p.qubit_gap * p.qubit_gap * gc2 * p.omega / lambda2);
    let gp2 = ren.g_prime * ren.g_prime;
    let spin_correction =
        SITES as f64 * (-p.omega * gp2 + p.omega * p.omega * gp2 / ren.omega_prime);
    Ok(SrpEnergy {
        condensate,
        spin_correction,
        fluctuation: fluctuation_energy(p, ren.g_prime).ok(),
    })
}

/// Superradiant ground energy of branch `q0` including the zero-point term.
pub fn srp_ground_energy(p: &ModelParams, g: f64, q0: MomentumBranch) -> Result<f64> {
    srp_energy_terms(p, g, q0)?.total(q0)
}

/// `ε′_q`: the normal-phase formula evaluated at `g′` of the condensed branch `q0`.
pub fn srp_excitation_energy(
    p: &ModelParams,
    g: f64,
    q0: MomentumBranch,
    q: MomentumBranch,
) -> Result<f64> {
    let gp = effective_coupling(p, g, q0)?;
    model::np_excitation_energy(p, gp, q)
}

/// Condensate part of the mean-field energy as a function of arbitrary
/// amplitudes: `Σ_n {ω|α_n|² + 2J1 Re α*_n α_{n+1} + J2 Re α*_n α_{n+2} − ½Ω_n}`.
pub fn condensate_energy(p: &ModelParams, g: f64, d: &Displacements) -> f64 {
    let lambda = p.lambda_for(g);
    (0..SITES)
        .map(|n| {
            let (a, b) = (d.re[n], d.im[n]);
            let n1 = (n + 1) % SITES;
            let n2 = (n + 2) % SITES;
            let omega_n = (p.qubit_gap * p.qubit_gap + 16.0 * lambda * lambda * a * a).sqrt();
            p.omega * (a * a + b * b)
                + 2.0 * p.j1 * (a * d.re[n1] + b * d.im[n1])
                + p.j2 * (a * d.re[n2] + b * d.im[n2])
                - 0.5 * omega_n
        })
        .sum()
}

/// Largest residual of the stationarity conditions
/// `ωA_n − λ sin 2γ_n + J1(A_{n+1}+A_{n−1}) + J2 A_{n+2} = 0` and
/// `ωB_n + J1(B_{n+1}+B_{n−1}) + J2 B_{n+2} = 0`, with `tan 2γ_n = 4λA_n/Ω`.
pub fn stationarity_residual(p: &ModelParams, g: f64, d: &Displacements) -> f64 {
    let lambda = p.lambda_for(g);
    (0..SITES)
        .map(|n| {
            let (prev, next, opp) = ((n + 3) % SITES, (n + 1) % SITES, (n + 2) % SITES);
            let two_gamma = (4.0 * lambda * d.re[n]).atan2(p.qubit_gap);
            let re = p.omega * d.re[n] - lambda * two_gamma.sin()
                + p.j1 * (d.re[next] + d.re[prev])
                + p.j2 * d.re[opp];
            let im = p.omega * d.im[n] + p.j1 * (d.im[next] + d.im[prev]) + p.j2 * d.im[opp];
            re.abs().max(im.abs())
        })
        .fold(0.0, f64::max)
}

/// A condensed branch with its renormalised parameters and energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SrpSolution {
    pub branch: MomentumBranch,
    pub amplitude: f64,
    pub renormalized: Renormalized,
    /// Ground energy with the zero-point term; falls back to the mean-field part when the
    /// zero-point term is complex for this branch.
    pub energy: f64,
    pub energy_terms: SrpEnergy,
    pub degeneracy: usize,
    pub configurations: Vec<Displacements>,
}

pub fn srp_solution(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<SrpSolution> {
    let configurations = srp_displacements(p, g, q)?;
    let renormalized = renormalized_params(p, g, q)?;
    let terms = srp_energy_terms(p, g, q)?;
    Ok(SrpSolution {
        branch: q,
        amplitude: renormalized.amplitude_sq.sqrt(),
        renormalized,
        energy: terms.total(q).unwrap_or_else(|_| terms.mean_field()),
        energy_terms: terms,
        degeneracy: degeneracy(q),
        configurations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PhaseLabel {
    Normal,
    Antiferro,
    Ferro,
    Frustrated,
    /// Two superradiant branches degenerate (first-order line).
    Boundary,
}

impl PhaseLabel {
    pub fn for_branch(q: MomentumBranch) -> Self {
        match q.family() {
            MomentumBranch::ZERO => Self::Ferro,
            MomentumBranch::PI => Self::Antiferro,
            _ => Self::Frustrated,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Normal => "NP",
            Self::Antiferro => "AFRP",
            Self::Ferro => "FRP",
            Self::Frustrated => "Frustrated",
            Self::Boundary => "Boundary",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePoint {
    pub label: PhaseLabel,
    pub branch: Option<MomentumBranch>,
    /// Competing branch when `label` is [`PhaseLabel::Boundary`].
    pub tie_with: Option<MomentumBranch>,
    pub abs_alpha: f64,
    pub corr: f64,
    /// Smallest critical coupling over all branches.
    pub g_c: f64,
    /// Ground energy of the selected phase (normal-phase or branch energy).
    pub energy: f64,
}

/// Classifies `(p, g)`: normal below the lowest `g_c`, otherwise the branch
/// of lowest mean-field energy among those already condensed.
///
/// Branches are ranked on the mean-field energy (condensate and spin terms).
/// The zero-point term is left out of the ranking because it is complex for
/// a branch whose `g′` exceeds another branch's `g_c`.
pub fn classify_phase(p: &ModelParams, g: f64) -> Result<PhasePoint> {
    let dom = dominant_branch(p)?;
    if g < dom.g_c {
        let energy = model::np_ground_energy(p, g).unwrap_or(f64::NAN);
        return Ok(PhasePoint {
            label: PhaseLabel::Normal,
            branch: None,
            tie_with: None,
            abs_alpha: 0.0,
            corr: 0.0,
            g_c: dom.g_c,
            energy,
        });
    }

    let mut candidates: Vec<SrpSolution> = Vec::new();
    for &q in &model::FAMILIES {
        if let Ok(sol) = srp_solution(p, g, q) {
            candidates.push(sol);
        }
    }
    let best = candidates
        .iter()
        .min_by(|a, b| a.energy_terms.mean_field().total_cmp(&b.energy_terms.mean_field()))
        .ok_or(QrsError::BelowCritical {
            branch: dom.branch,
            g,
            g_c: dom.g_c,
        })?;

    if let Some(other) = dom.tie_with {
        return Ok(PhasePoint {
            label: PhaseLabel::Boundary,
            branch: Some(dom.branch),
            tie_with: Some(other),
            abs_alpha: best.amplitude,
            corr: 0.0,
            g_c: dom.g_c,
            energy: best.energy,
        });
    }

    let d = best.configurations[0];
    Ok(PhasePoint {
        label: PhaseLabel::for_branch(best.branch),
        branch: Some(best.branch),
        tie_with: None,
        abs_alpha: d.abs_alpha(),
        corr: d.corr(),
        g_c: dom.g_c,
        energy: best.energy,
    })
}

/// `(|α|, corr)` of the ground phase.
pub fn order_parameter(p: &ModelParams, g: f64) -> Result<(f64, f64)> {
    let pt = classify_phase(p, g)?;
    Ok((pt.abs_alpha, pt.corr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Normal,
    Superradiant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// `(|g − g_c|, ε)` samples used in the fit.
    pub samples: Vec<(f64, f64)>,
}

/// Number of log-spaced samples in [`scaling_exponent`].
pub const SCALING_SAMPLES: usize = 32;

/// Least-squares slope of `ln ε` against `ln |g − g_c(q0)|` over a
/// logarithmic window on one side of the transition.
pub fn scaling_exponent(
    p: &ModelParams,
    q0: MomentumBranch,
    side: Side,
    window: (f64, f64),
) -> Result<ScalingFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(QrsError::InsufficientWindow(format!(
            "window must satisfy 0 < min < max, got ({lo}, {hi})"
        )));
    }
    let g_c = critical_coupling(p, q0)?;
    let n = SCALING_SAMPLES;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let delta = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
        let eps = match side {
            Side::Normal => {
                let g = g_c - delta;
                if g < 0.0 {
                    return Err(QrsError::InsufficientWindow(format!("g = {g} is negative")));
                }
                // every branch must still be stable for the normal phase to hold
                for q in MomentumBranch::ALL {
                    model::np_excitation_energy(p, g, q).map_err(|e| {
                        QrsError::InsufficientWindow(format!("normal phase invalid at g = {g}: {e}"))
                    })?;
                }
                model::np_excitation_energy(p, g, q0)?
            }
            Side::Superradiant => srp_excitation_energy(p, g_c + delta, q0, q0)
                .map_err(|e| QrsError::InsufficientWindow(format!("at g = {}: {e}", g_c + delta)))?,
        };
        if eps <= 0.0 {
            return Err(QrsError::InsufficientWindow(format!("ε vanishes at δ = {delta}")));
        }
        samples.push((delta, eps));
    }
    let (slope, intercept) = fit_line(samples.iter().map(|&(d, e)| (d.ln(), e.ln())));
    Ok(ScalingFit {
        exponent: slope,
        intercept,
        samples,
    })
}

fn fit_line(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64) {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Result of the brute-force minimisation of [`condensate_energy`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondensateMinimum {
    pub energy: f64,
    pub displacements: Displacements,
    /// Distinct local minima found (energies), ascending.
    pub local_minima: Vec<f64>,
}

/// Number of random starts of the condensate oracle.
pub const CONDENSATE_STARTS: usize = 32;

/// Multi-start Nelder–Mead over `(A_n, B_n) ∈ ℝ⁸`, independent of the
/// closed-form branch solutions.
pub fn minimize_condensate_energy(p: &ModelParams, g: f64, seed: u64) -> CondensateMinimum {
    let scale = (p.lambda_for(g) / p.omega).max(1.0);
    let f = |x: &[f64]| {
        let mut d = Displacements::zero();
        for n in 0..SITES {
            d.re[n] = x[n] * scale;
            d.im[n] = x[n + SITES] * scale;
        }
        condensate_energy(p, g, &d)
    };
    let opts = NelderMeadOptions {
        initial_step: 0.2,
        ..NelderMeadOptions::default()
    };
    let results = multistart_nelder_mead(&f, 2 * SITES, (-1.5, 1.5), CONDENSATE_STARTS, seed, &opts);
    let best = &results[0];
    let mut d = Displacements::zero();
    for n in 0..SITES {
        d.re[n] = best.x[n] * scale;
        d.im[n] = best.x[n + SITES] * scale;
    }
    let mut local_minima: Vec<f64> = Vec::new();
    for r in &results {
        if local_minima
            .iter()
            .all(|e| (e - r.value).abs() > 1e-7 * r.value.abs().max(1.0))
        {
            local_minima.push(r.value);
        }
    }
    CondensateMinimum {
        energy: best.value,
        displacements: d,
        local_minima,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig(j2: f64) -> ModelParams {
        ModelParams::new(1.0, 50.0, 0.0, 0.05, j2).unwrap()
    }

    #[test]
    fn displacement_at_onset_is_zero() {
        let p = fig(0.02);
        let gc = critical_coupling(&p, MomentumBranch::PI).unwrap();
        let sols = srp_displacements(&p, gc, MomentumBranch::PI).unwrap();
        assert!(sols.iter().all(|d| d.abs_alpha() < 1e-5));
    }

    #[test]
    fn staggered_displacement_example() {
        let sols = srp_displacements(&fig(0.02), 0.6, MomentumBranch::PI).unwrap();
        assert_eq!(sols.len(), 2);
        let a = sols[0].re[0];
        let exact = ((5184.0 / 0.8464 - 2500.0) / 288.0f64).sqrt();
        assert_abs_diff_eq!(a, exact, epsilon = 1e-12);
        assert_abs_diff_eq!(a, 3.54768, epsilon = 1e-5);
        assert_eq!(sols[0].re, [a, -a, a, -a]);
        assert_eq!(sols[1].re, [-a, a, -a, a]);
        assert!(sols.iter().all(|d| d.im == [0.0; 4]));
    }

    #[test]
    fn paired_displacements_are_fourfold() {
        let sols = srp_displacements(&fig(0.02), 0.6, MomentumBranch::HALF_PI).unwrap();
        assert_eq!(sols.len(), 4);
        for d in &sols {
            assert!(d.corr() < 0.0);
            let s = d.re.map(f64::signum);
            // two plus, two minus, with the diagonal partners opposite
            assert_eq!(s[0], -s[2]);
            assert_eq!(s[1], -s[3]);
        }
    }

    #[test]
    fn below_critical_is_rejected() {
        assert!(matches!(
            srp_displacements(&fig(0.02), 0.3, MomentumBranch::PI),
            Err(QrsError::BelowCritical { .. })
        ));
        assert!(matches!(
            renormalized_params(&fig(0.02), 0.0, MomentumBranch::PI),
            Err(QrsError::BelowCritical { .. })
        ));
    }

    #[test]
    fn renormalized_example() {
        let r = renormalized_params(&fig(0.02), 0.6, MomentumBranch::PI).unwrap();
        assert_abs_diff_eq!(r.g_prime, 0.92f64.sqrt().powi(3) / 8.0 / 0.36, epsilon = 1e-14);
        assert_abs_diff_eq!(r.g_prime, 0.306398, epsilon = 5e-6);
        assert_abs_diff_eq!(r.omega_prime, 78.2609, epsilon = 5e-5);
        assert_abs_diff_eq!(r.lambda_prime, 2.71057, epsilon = 1e-5);
        assert_abs_diff_eq!(r.amplitude_sq, 12.5860, epsilon = 5e-5);
        // g' is self-consistent with its definition and the closed form
        assert_abs_diff_eq!(r.g_prime, r.lambda_prime / r.omega_prime.sqrt(), epsilon = 1e-14);
        let closed = effective_coupling(&fig(0.02), 0.6, MomentumBranch::PI).unwrap();
        assert_abs_diff_eq!(r.g_prime, closed, epsilon = 1e-13);
    }

    #[test]
    fn renormalized_at_onset_is_identity() {
        let p = fig(0.02);
        let gc = critical_coupling(&p, MomentumBranch::PI).unwrap();
        let r = renormalized_params(&p, gc, MomentumBranch::PI).unwrap();
        assert_abs_diff_eq!(r.g_prime, gc, epsilon = 1e-12);
        assert_abs_diff_eq!(r.omega_prime, 50.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.lambda_prime, p.lambda_for(gc), epsilon = 1e-9);
        assert!(r.amplitude_sq < 1e-10);
        let far = renormalized_params(&p, 1e3, MomentumBranch::PI).unwrap();
        assert!(far.g_prime < 1e-6);
    }

    #[test]
    fn energy_matches_normal_phase_at_onset() {
        for j2 in [0.02, 0.07] {
            let p = fig(j2);
            let dom = dominant_branch(&p).unwrap();
            let e_np = model::np_ground_energy(&p, dom.g_c).unwrap();
            let e_srp = srp_ground_energy(&p, dom.g_c, dom.branch).unwrap();
            assert!(((e_np - e_srp) / e_np).abs() < 1e-9, "{e_np} vs {e_srp}");
        }
    }

    #[test]
    fn condensate_energy_agrees_with_closed_form() {
        for (j2, q) in [(0.02, MomentumBranch::PI), (0.07, MomentumBranch::HALF_PI)] {
            let p = fig(j2);
            let terms = srp_energy_terms(&p, 0.6, q).unwrap();
            for d in srp_displacements(&p, 0.6, q).unwrap() {
                assert_abs_diff_eq!(condensate_energy(&p, 0.6, &d), terms.condensate, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn srp_gap_closes_at_onset() {
        let p = fig(0.02);
        let gc = critical_coupling(&p, MomentumBranch::PI).unwrap();
        let e = srp_excitation_energy(&p, gc, MomentumBranch::PI, MomentumBranch::PI).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_phase(&fig(0.02), 0.3).unwrap().label, PhaseLabel::Normal);
        let afrp = classify_phase(&fig(0.02), 0.6).unwrap();
        assert_eq!(afrp.label, PhaseLabel::Antiferro);
        assert!(afrp.corr > 0.0);
        let frp = classify_phase(&ModelParams::new(1.0, 50.0, 0.0, -0.05, 0.02).unwrap(), 0.6).unwrap();
        assert_eq!(frp.label, PhaseLabel::Ferro);
        assert!(frp.corr > 0.0);
        let fr = classify_phase(&fig(0.07), 0.6).unwrap();
        assert_eq!(fr.label, PhaseLabel::Frustrated);
        assert!(fr.corr < 0.0);
        let b = classify_phase(&fig(0.05), 0.6).unwrap();
        assert_eq!(b.label, PhaseLabel::Boundary);
    }

    #[test]
    fn order_parameter_below_critical() {
        assert_eq!(order_parameter(&fig(0.02), 0.4).unwrap(), (0.0, 0.0));
        let (a, c) = order_parameter(&fig(0.02), 0.6).unwrap();
        assert_abs_diff_eq!(a, 3.54768, epsilon = 1e-5);
        assert_abs_diff_eq!(c, a, epsilon = 1e-12);
    }

    #[test]
    fn scaling_window_must_stay_in_phase() {
        let p = fig(0.02);
        assert!(matches!(
            scaling_exponent(&p, MomentumBranch::PI, Side::Normal, (1e-3, 1e-6)),
            Err(QrsError::InsufficientWindow(_))
        ));
        // π/2 is not the first branch to condense: its normal-phase window
        // runs through the π instability.
        assert!(matches!(
            scaling_exponent(&p, MomentumBranch::HALF_PI, Side::Normal, (1e-6, 1e-3)),
            Err(QrsError::InsufficientWindow(_))
        ));
    }

    #[test]
    fn stationarity_of_closed_form() {
        let p = fig(0.07);
        for q in MomentumBranch::ALL {
            for d in srp_displacements(&p, 0.6, q).unwrap() {
                assert!(stationarity_residual(&p, 0.6, &d) < 1e-10);
            }
        }
    }
}
