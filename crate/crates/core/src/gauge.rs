//! Correspondence between the square with real diagonal hopping `J2` and the
//! ring with complex nearest-neighbour hopping `J1⁰ e^{iθ}` and no diagonal.
//!
//! The ring breaks time reversal, so `ω⁰_q ≠ ω⁰_{−q}` and its excitation
//! energies use the full asymmetric Bogoliubov form. Choosing `J2` as a
//! function of `θ` makes a chosen branch of the two spectra coincide.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::model::{self, ModelParams, MomentumBranch};

/// Hopping magnitude and gauge phase of the ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaugeParams {
    pub j1_0: f64,
    pub theta: f64,
}

impl GaugeParams {
    /// Wraps `theta` into `[0, 2π)`.
    pub fn new(j1_0: f64, theta: f64) -> Result<Self> {
        if !(j1_0.is_finite() && theta.is_finite()) {
            return Err(QrsError::InvalidParams("gauge parameters must be finite".into()));
        }
        Ok(Self {
            j1_0,
            theta: theta.rem_euclid(TAU),
        })
    }

    /// The substitution `J1 → −J1, θ → π − θ` relating the two signs of hopping.
    pub fn reflected(&self) -> Self {
        Self {
            j1_0: self.j1_0,
            theta: (PI - self.theta).rem_euclid(TAU),
        }
    }
}

/// Phase in which an excitation energy is evaluated. The superradiant
/// variant names the condensed branch that fixes `g′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Normal,
    Superradiant(MomentumBranch),
}

impl Regime {
    pub fn is_normal(self) -> bool {
        matches!(self, Regime::Normal)
    }
}

/// `ω⁰_q = ω − 2ωg² + 2J1⁰ cos(q − θ)`.
pub fn qrr_mode_frequency(gp: &GaugeParams, p: &ModelParams, g: f64, q: MomentumBranch) -> f64 {
    p.omega - 2.0 * p.omega * g * g + 2.0 * gp.j1_0 * (q.radians() - gp.theta).cos()
}

fn asymmetric_epsilon(w_q: f64, w_mq: f64, omega: f64, g: f64, q: MomentumBranch) -> Result<f64> {
    let sum = w_q + w_mq;
    let pair = 4.0 * omega * g * g;
    let radicand = (sum - pair) * (sum + pair);
    if radicand < -1e-13 * sum * sum {
        return Err(QrsError::ComplexEnergy { branch: q, radicand });
    }
    Ok(0.5 * (radicand.max(0.0).sqrt() + w_q - w_mq))
}

/// `4(g_c⁰)²(q)`, the value at which `ω⁰_q ω⁰_{−q} = 4ω²g⁴`:
/// `[1 + 4j cos q cos θ + 4j² cos(q−θ) cos(q+θ)] / [1 + 2j cos q cos θ]`, `j = J1⁰/ω`.
pub fn qrr_critical_coupling_sq4(gp: &GaugeParams, p: &ModelParams, q: MomentumBranch) -> f64 {
    let j = gp.j1_0 / p.omega;
    let (qr, th) = (q.radians(), gp.theta);
    let num = 1.0 + 4.0 * j * q.cos_q() * th.cos() + 4.0 * j * j * (qr - th).cos() * (qr + th).cos();
    let den = 1.0 + 2.0 * j * q.cos_q() * th.cos();
    num / den
}

pub fn qrr_critical_coupling(gp: &GaugeParams, p: &ModelParams, q: MomentumBranch) -> Result<f64> {
    let j = gp.j1_0 / p.omega;
    let den = 1.0 + 2.0 * j * q.cos_q() * gp.theta.cos();
    let v = qrr_critical_coupling_sq4(gp, p, q);
    if den <= 0.0 || v <= 0.0 {
        return Err(QrsError::NoCriticalPoint { branch: q, value: v });
    }
    Ok(0.5 * v.sqrt())
}

/// Whether `ε⁰_q` itself (rather than its partner `ε⁰_{−q}`) closes at the
/// critical coupling. For `q ∈ {π/2, 3π/2}` only the member with
/// `ω⁰_q ≤ ω⁰_{−q}` softens.
pub fn qrr_branch_softens(gp: &GaugeParams, p: &ModelParams, q: MomentumBranch) -> bool {
    qrr_mode_frequency(gp, p, 0.0, q) <= qrr_mode_frequency(gp, p, 0.0, q.neg()) + 1e-15
}

/// `g′⁰ = (g_c⁰(q₀))³ / g²` of the ring.
pub fn qrr_effective_coupling(
    gp: &GaugeParams,
    p: &ModelParams,
    g: f64,
    q0: MomentumBranch,
) -> Result<f64> {
    let g_c = qrr_critical_coupling(gp, p, q0)?;
    if g < g_c * (1.0 - 1e-12) {
        return Err(QrsError::BelowCritical { branch: q0, g, g_c });
    }
    Ok(g_c.powi(3) / (g * g))
}

/// Excitation energy `ε⁰_q` of the ring in the given regime.
pub fn qrr_excitation(
    gp: &GaugeParams,
    p: &ModelParams,
    g: f64,
    q: MomentumBranch,
    regime: Regime,
) -> Result<f64> {
    let g_eff = match regime {
        Regime::Normal => g,
        Regime::Superradiant(q0) => qrr_effective_coupling(gp, p, g, q0)?,
    };
    asymmetric_epsilon(
        qrr_mode_frequency(gp, p, g_eff, q),
        qrr_mode_frequency(gp, p, g_eff, q.neg()),
        p.omega,
        g_eff,
        q,
    )
}

/// `J2 = 2(J1 − J1⁰ cos θ)`: equal `ε_π` in both phases.
pub fn map_afrp(j1: f64, gp: &GaugeParams) -> f64 {
    2.0 * (j1 - gp.j1_0 * gp.theta.cos())
}

/// `J2` for a negative nearest-neighbour hopping `j1 < 0`, matching the
/// uniform (`q = 0`) branch: the AFRP map after `J1 → −J1, θ → π − θ`.
pub fn map_frp(j1: f64, gp: &GaugeParams) -> f64 {
    map_afrp(-j1, &gp.reflected())
}

/// `J2(g)/ω = 1 − 2g² − √((√(1−4g²) − 2j sin θ)² + 4g⁴)`, matching `ε_{3π/2}`.
/// In the superradiant regime `g` is replaced by the ring's `g′⁰`.
pub fn map_frustrated(gp: &GaugeParams, p: &ModelParams, g: f64, regime: Regime) -> Result<f64> {
    let g_eff = match regime {
        Regime::Normal => g,
        Regime::Superradiant(q0) => qrr_effective_coupling(gp, p, g, q0)?,
    };
    frustrated_j2(gp, p, g_eff)
}

fn frustrated_j2(gp: &GaugeParams, p: &ModelParams, g: f64) -> Result<f64> {
    let g2 = g * g;
    let d = 1.0 - 4.0 * g2;
    if d < 0.0 {
        return Err(QrsError::DomainError(format!("1 - 4g^2 = {d} < 0 at g = {g}")));
    }
    let eps_ring = d.sqrt() - 2.0 * gp.j1_0 / p.omega * gp.theta.sin();
    if eps_ring < -1e-12 {
        return Err(QrsError::DomainError(format!(
            "ring excitation at 3pi/2 is negative ({eps_ring}) at g = {g}"
        )));
    }
    Ok(p.omega * (1.0 - 2.0 * g2 - (eps_ring * eps_ring + 4.0 * g2 * g2).sqrt()))
}

/// `J2` giving the same order parameter `A²`: the AFRP (or FRP) map for
/// `q ∈ {π, 0}`, and the g-independent `4(J1⁰)² sin²θ / ω` for the paired branch.
pub fn map_order_parameter(gp: &GaugeParams, p: &ModelParams, j1: f64, branch: MomentumBranch) -> f64 {
    match branch.family() {
        MomentumBranch::PI => map_afrp(j1, gp),
        MomentumBranch::ZERO => map_frp(j1, gp),
        _ => 4.0 * gp.j1_0 * gp.j1_0 * gp.theta.sin().powi(2) / p.omega,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrespondenceResult {
    /// Mapped `J2`; for the frustrated map it varies with `g` and the value
    /// at the first grid point is reported.
    pub j2: f64,
    /// `max_g |ε_q(square) − ε⁰_q(ring)|`.
    pub residual: f64,
    pub regime: Regime,
    pub branch: MomentumBranch,
    /// `max_g |g′(square) − g′⁰(ring)|` in the superradiant regime: zero
    /// whenever the two critical couplings coincide.
    pub g_prime_mismatch: Option<f64>,
    pub samples: usize,
}

/// Evaluates both spectra on `grid` with `J2` from the map matching
/// `branch` (π: AFRP, 0: FRP, 3π/2 or π/2: frustrated) and reports the
/// largest discrepancy.
pub fn verify_equivalence(
    gp: &GaugeParams,
    p_base: &ModelParams,
    j1: f64,
    branch: MomentumBranch,
    regime: Regime,
    grid: &[f64],
) -> Result<CorrespondenceResult> {
    if grid.is_empty() {
        return Err(QrsError::InvalidParams("empty coupling grid".into()));
    }
    let mut residual: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    let mut first_j2 = None;
    for &g in grid {
        let (j2, q) = match branch.family() {
            MomentumBranch::PI => (map_afrp(j1, gp), MomentumBranch::PI),
            MomentumBranch::ZERO => (map_frp(j1, gp), MomentumBranch::ZERO),
            _ => (map_frustrated(gp, p_base, g, regime)?, branch),
        };
        first_j2.get_or_insert(j2);
        let square = ModelParams { j1, j2, ..*p_base };
        let (g_sq, g_ring) = match regime {
            Regime::Normal => (g, g),
            Regime::Superradiant(q0) => {
                let ring = qrr_effective_coupling(gp, p_base, g, q0)?;
                let own = crate::meanfield::effective_coupling(&square, g, q0.family())?;
                mismatch = mismatch.max((own - ring).abs());
                // the frustrated map is defined through the ring's g′
                let g_sq = if q.family() == MomentumBranch::HALF_PI { ring } else { own };
                (g_sq, ring)
            }
        };
        let e_sq = model::np_excitation_energy(&square, g_sq, q)?;
        let e_ring = qrr_excitation(gp, p_base, g_ring, q, Regime::Normal)?;
        residual = residual.max((e_sq - e_ring).abs());
    }
    Ok(CorrespondenceResult {
        j2: first_j2.unwrap_or(f64::NAN),
        residual,
        regime,
        branch,
        g_prime_mismatch: (!regime.is_normal()).then_some(mismatch),
        samples: grid.len(),
    })
}

/// Evenly spaced couplings on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let m = (n - 1) as f64;
    (0..n).map(|i| (lo * (m - i as f64) + hi * i as f64) / m).collect()
}

/// Intersection of the AFRP and frustrated critical curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriplePoint {
    pub theta_c: f64,
    /// `2J1⁰ cos θ_c`.
    pub j1: f64,
    /// `4(J1⁰)² sin²θ_c`, equal to `j1` at the root.
    pub j1_alt: f64,
}

/// Solves `2J1⁰ cos θ = 4(J1⁰)² sin²θ` on `(0, π/2)` by bisection followed by
/// a Newton polish.
pub fn triple_point(j1_0: f64) -> Result<TriplePoint> {
    if !(j1_0 > 0.0 && j1_0.is_finite()) {
        return Err(QrsError::InvalidParams(format!("J1^0 must be > 0, got {j1_0}")));
    }
    let f = |t: f64| 2.0 * j1_0 * t.cos() - 4.0 * j1_0 * j1_0 * t.sin().powi(2);
    let df = |t: f64| -2.0 * j1_0 * t.sin() - 8.0 * j1_0 * j1_0 * t.sin() * t.cos();
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    if f(lo) * f(hi) > 0.0 {
        return Err(QrsError::NoRoot(format!("no sign change on (0, pi/2) for J1^0 = {j1_0}")));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut theta = 0.5 * (lo + hi);
    let d = df(theta);
    if d != 0.0 {
        theta -= f(theta) / d;
    }
    let j1 = 2.0 * j1_0 * theta.cos();
    let j1_alt = 4.0 * j1_0 * j1_0 * theta.sin().powi(2);
    if (j1 - j1_alt).abs() > 1e-12 {
        return Err(QrsError::NoRoot(format!(
            "triple point inconsistent: {j1} vs {j1_alt} at theta = {theta}"
        )));
    }
    Ok(TriplePoint {
        theta_c: theta,
        j1,
        j1_alt,
    })
}
