//! Model parameters, Bloch momenta and the analytic normal-phase solution.
//!
//! Below the critical coupling the four spins are frozen in their lower state
//! and the photons see a quadratic Hamiltonian that decouples into Bloch
//! momenta `q = 2πl/4`. Each momentum pair is diagonalised by a two-mode
//! squeeze, giving the excitation energies `ε_q` and the fluctuation
//! correction to the ground energy.
//!
//! Functions that take an explicit dimensionless coupling `g` use it in place
//! of `λ/√(Ωω)`; the stored `λ` only feeds [`ModelParams::g`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QrsError, Result};

/// Number of sites on the square.
pub const SITES: usize = 4;

/// Relative tolerance on `g_c` below which two branches count as degenerate.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Physical constants of the quantum Rabi square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Cavity frequency ω.
    pub omega: f64,
    /// Qubit gap Ω.
    pub qubit_gap: f64,
    /// Atom-cavity coupling λ.
    pub lambda: f64,
    /// Nearest-neighbour (edge) hopping.
    pub j1: f64,
    /// Next-nearest-neighbour (diagonal) hopping.
    pub j2: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            qubit_gap: 50.0,
            lambda: 0.0,
            j1: 0.0,
            j2: 0.0,
        }
    }
}

impl ModelParams {
    pub fn new(omega: f64, qubit_gap: f64, lambda: f64, j1: f64, j2: f64) -> Result<Self> {
        let p = Self {
            omega,
            qubit_gap,
            lambda,
            j1,
            j2,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the dimensionless coupling, back-solving `λ = g√(Ωω)`.
    pub fn with_g(omega: f64, qubit_gap: f64, g: f64, j1: f64, j2: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(QrsError::InvalidParams(format!("g must be finite and >= 0, got {g}")));
        }
        Self::new(omega, qubit_gap, g * (qubit_gap * omega).sqrt(), j1, j2)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.qubit_gap, self.lambda, self.j1, self.j2]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(QrsError::InvalidParams("all parameters must be finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(QrsError::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.qubit_gap <= 0.0 {
            return Err(QrsError::InvalidParams(format!(
                "Omega must be > 0, got {}",
                self.qubit_gap
            )));
        }
        if self.lambda < 0.0 {
            return Err(QrsError::InvalidParams(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Dimensionless coupling `g = λ/√(Ωω)`.
    pub fn g(&self) -> f64 {
        self.lambda / (self.qubit_gap * self.omega).sqrt()
    }

    /// Frequency ratio `η = Ω/ω`.
    pub fn eta(&self) -> f64 {
        self.qubit_gap / self.omega
    }

    /// `λ` corresponding to a dimensionless coupling `g` at these frequencies.
    pub fn lambda_for(&self, g: f64) -> f64 {
        g * (self.qubit_gap * self.omega).sqrt()
    }

    /// Copy of `self` with `λ` reset from `g`.
    pub fn at_g(&self, g: f64) -> Self {
        Self {
            lambda: self.lambda_for(g),
            ..*self
        }
    }

    /// Diagnostics for the hierarchy `Ω ≫ λ ≫ ω ≫ |J1|, |J2|` under which the
    /// effective theory holds. Empty when every ratio is at least comfortable.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.eta() < 10.0 {
            out.push(format!("Omega/omega = {} is not large", self.eta()));
        }
        if self.lambda > 0.0 && self.lambda > 0.5 * self.qubit_gap {
            out.push(format!("lambda = {} is not small against Omega", self.lambda));
        }
        let hop = self.j1.abs().max(self.j2.abs());
        if hop > 0.2 * self.omega {
            out.push(format!("hopping {} is not small against omega", hop));
        }
        out
    }
}

/// One of the four Bloch momenta `q = 2πl/4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MomentumBranch(u8);

impl MomentumBranch {
    pub const ZERO: Self = Self(0);
    pub const HALF_PI: Self = Self(1);
    pub const PI: Self = Self(2);
    pub const THREE_HALF_PI: Self = Self(3);

    pub const ALL: [Self; 4] = [Self::ZERO, Self::HALF_PI, Self::PI, Self::THREE_HALF_PI];

    pub fn new(l: u8) -> Result<Self> {
        if l < 4 {
            Ok(Self(l))
        } else {
            Err(QrsError::InvalidParams(format!("momentum index must be 0..3, got {l}")))
        }
    }

    /// Nearest branch to an angle in radians (taken mod 2π).
    pub fn from_radians(q: f64) -> Self {
        let l = (q.rem_euclid(2.0 * PI) / (PI / 2.0)).round() as i64;
        Self(l.rem_euclid(4) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        2.0 * PI * f64::from(self.0) / SITES as f64
    }

    /// `-q`, i.e. `l -> (4 - l) mod 4`.
    pub fn neg(self) -> Self {
        Self((4 - self.0) % 4)
    }

    /// `cos q`, exact for the four momenta.
    pub fn cos_q(self) -> f64 {
        [1.0, 0.0, -1.0, 0.0][self.0 as usize]
    }

    /// `cos 2q`, exact for the four momenta.
    pub fn cos_2q(self) -> f64 {
        [1.0, -1.0, 1.0, -1.0][self.0 as usize]
    }

    /// Representative of the `{q, -q}` family: π/2 stands for 3π/2.
    pub fn family(self) -> Self {
        if self == Self::THREE_HALF_PI {
            Self::HALF_PI
        } else {
            self
        }
    }

    pub fn is_self_conjugate(self) -> bool {
        self.neg() == self
    }
}

impl fmt::Display for MomentumBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = ["0", "pi/2", "pi", "3pi/2"][self.0 as usize];
        f.write_str(s)
    }
}

/// Branch-resolved normal-phase quantities at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSpectrum {
    pub branch: MomentumBranch,
    pub omega_q: f64,
    /// `None` once the radicand turns negative.
    pub epsilon_q: Option<f64>,
    /// `None` at and beyond the instability.
    pub lambda_q: Option<f64>,
    /// `None` when the branch has no critical point.
    pub g_c: Option<f64>,
}

/// Hopping contribution `J2 cos 2q + 2 J1 cos q` to the mode frequency.
pub fn hopping_shift(p: &ModelParams, q: MomentumBranch) -> f64 {
    p.j2 * q.cos_2q() + 2.0 * p.j1 * q.cos_q()
}

/// `ω_q = ω − 2ωg² + J2 cos 2q + 2J1 cos q`.
pub fn mode_frequency(p: &ModelParams, g: f64, q: MomentumBranch) -> f64 {
    p.omega - 2.0 * p.omega * g * g + hopping_shift(p, q)
}

/// `4 g_c²(q) = 1 + (J2/ω) cos 2q + (2J1/ω) cos q`, returned as the right-hand side.
pub fn critical_coupling_sq4(p: &ModelParams, q: MomentumBranch) -> f64 {
    1.0 + hopping_shift(p, q) / p.omega
}

/// Critical coupling `g_c(q)` where `ε_q` closes.
pub fn critical_coupling(p: &ModelParams, q: MomentumBranch) -> Result<f64> {
    let rhs = critical_coupling_sq4(p, q);
    if rhs <= 0.0 {
        return Err(QrsError::NoCriticalPoint { branch: q, value: rhs });
    }
    Ok(0.5 * rhs.sqrt())
}

/// Radicand `(ω_q + ω_{−q})² − 16ω²g⁴` in factored form, so that it is
/// exactly representable as zero at `g_c`.
fn np_radicand(p: &ModelParams, g: f64, q: MomentumBranch) -> (f64, f64) {
    let sum = mode_frequency(p, g, q) + mode_frequency(p, g, q.neg());
    let pair = 4.0 * p.omega * g * g;
    ((sum - pair) * (sum + pair), sum)
}

/// Normal-phase excitation energy
/// `ε_q = ½[√((ω_q+ω_{−q})² − 16ω²g⁴) + ω_q − ω_{−q}]`.
pub fn np_excitation_energy(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<f64> {
    let (radicand, sum) = np_radicand(p, g, q);
    // Rounding at g = g_c may leave a radicand of a few ulps below zero.
    let slack = 1e-13 * sum * sum;
    if radicand < -slack {
        return Err(QrsError::ComplexEnergy { branch: q, radicand });
    }
    let asym = mode_frequency(p, g, q) - mode_frequency(p, g, q.neg());
    Ok(0.5 * (radicand.max(0.0).sqrt() + asym))
}

/// Bogoliubov squeeze parameter
/// `λ_q = ⅛ ln[(ω_q+ω_{−q}+4ωg²)/(ω_q+ω_{−q}−4ωg²)]`.
pub fn squeeze_parameter(p: &ModelParams, g: f64, q: MomentumBranch) -> Result<f64> {
    let sum = mode_frequency(p, g, q) + mode_frequency(p, g, q.neg());
    let pair = 4.0 * p.omega * g * g;
    if sum - pair <= 0.0 {
        return Err(QrsError::Divergent { branch: q, g });
    }
    Ok(((sum + pair) / (sum - pair)).ln() / 8.0)
}

/// Spin-sector constant `E_0 = 4(−Ω/2 − ωg² + ω²g²/Ω)`.
pub fn np_constant_energy(p: &ModelParams, g: f64) -> f64 {
    let g2 = g * g;
    SITES as f64 * (-0.5 * p.qubit_gap - p.omega * g2 + p.omega * p.omega * g2 / p.qubit_gap)
}

/// Zero-point correction `½ Σ_q (ε_q − ω_q)` at an effective coupling.
pub fn fluctuation_energy(p: &ModelParams, g: f64) -> Result<f64> {
    MomentumBranch::ALL.iter().try_fold(0.0, |acc, &q| {
        let eps = np_excitation_energy(p, g, q)?;
        Ok(acc + 0.5 * (eps - mode_frequency(p, g, q)))
    })
}

/// Normal-phase ground energy `E_g = E_0 + ½ Σ_q (ε_q − ω_q)`.
pub fn np_ground_energy(p: &ModelParams, g: f64) -> Result<f64> {
    Ok(np_constant_energy(p, g) + fluctuation_energy(p, g)?)
}

pub fn branch_spectrum(p: &ModelParams, g: f64, q: MomentumBranch) -> BranchSpectrum {
    BranchSpectrum {
        branch: q,
        omega_q: mode_frequency(p, g, q),
        epsilon_q: np_excitation_energy(p, g, q).ok(),
        lambda_q: squeeze_parameter(p, g, q).ok(),
        g_c: critical_coupling(p, q).ok(),
    }
}

/// Which superradiant branch condenses first as `g` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominantBranch {
    pub branch: MomentumBranch,
    pub g_c: f64,
    /// Another branch family with the same `g_c` within [`TIE_TOLERANCE`].
    pub tie_with: Option<MomentumBranch>,
}

impl DominantBranch {
    pub fn is_tie(&self) -> bool {
        self.tie_with.is_some()
    }
}

/// Branch families in a fixed order: 0, π, π/2 (3π/2 is π/2's partner).
pub const FAMILIES: [MomentumBranch; 3] =
    [MomentumBranch::PI, MomentumBranch::HALF_PI, MomentumBranch::ZERO];

/// `argmin_q g_c(q)` over the three distinct branch families.
pub fn dominant_branch(p: &ModelParams) -> Result<DominantBranch> {
    let mut gcs = Vec::with_capacity(FAMILIES.len());
    for &q in &FAMILIES {
        gcs.push((q, critical_coupling(p, q)?));
    }
    let (best, gc_best) = gcs
        .iter()
        .copied()
        .fold(gcs[0], |acc, cur| if cur.1 < acc.1 { cur } else { acc });
    let tie_with = gcs
        .iter()
        .find(|(q, gc)| *q != best && (gc - gc_best).abs() <= TIE_TOLERANCE * gc_best)
        .map(|(q, _)| *q);
    Ok(DominantBranch {
        branch: best,
        g_c: gc_best,
        tie_with,
    })
}

/// Smallest critical coupling over all branches.
pub fn min_critical_coupling(p: &ModelParams) -> Result<f64> {
    Ok(dominant_branch(p)?.g_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig(j2: f64) -> ModelParams {
        ModelParams::new(1.0, 50.0, 0.0, 0.05, j2).unwrap()
    }

    #[test]
    fn mode_frequency_examples() {
        let bare = ModelParams::new(1.0, 50.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(mode_frequency(&bare, 0.0, MomentumBranch::ZERO), 1.0);
        assert_abs_diff_eq!(mode_frequency(&fig(0.02), 0.3, MomentumBranch::PI), 0.74, epsilon = 1e-14);
        assert_abs_diff_eq!(
            mode_frequency(&fig(0.02), 0.3, MomentumBranch::HALF_PI),
            0.80,
            epsilon = 1e-14
        );
    }

    #[test]
    fn critical_coupling_examples() {
        let bare = ModelParams::default();
        for q in MomentumBranch::ALL {
            assert_eq!(critical_coupling(&bare, q).unwrap(), 0.5);
        }
        assert_abs_diff_eq!(
            critical_coupling(&fig(0.02), MomentumBranch::PI).unwrap(),
            0.479583,
            epsilon = 5e-7
        );
        assert_abs_diff_eq!(
            critical_coupling(&fig(0.07), MomentumBranch::HALF_PI).unwrap(),
            0.482183,
            epsilon = 5e-7
        );
    }

    #[test]
    fn missing_critical_point_is_an_error() {
        let p = ModelParams::new(1.0, 50.0, 0.0, 0.6, 0.0).unwrap();
        assert!(matches!(
            critical_coupling(&p, MomentumBranch::PI),
            Err(QrsError::NoCriticalPoint { .. })
        ));
        assert!(dominant_branch(&p).is_err());
    }

    #[test]
    fn excitation_energy_examples() {
        let bare = ModelParams::default();
        assert_eq!(np_excitation_energy(&bare, 0.0, MomentumBranch::ZERO).unwrap(), 1.0);
        let p = fig(0.02);
        assert_abs_diff_eq!(
            np_excitation_energy(&p, 0.3, MomentumBranch::PI).unwrap(),
            (0.74f64 * 0.74 - 0.0324).sqrt(),
            epsilon = 1e-14
        );
        let gc = critical_coupling(&p, MomentumBranch::PI).unwrap();
        assert!(np_excitation_energy(&p, gc, MomentumBranch::PI).unwrap() < 1e-12);
        assert!(matches!(
            np_excitation_energy(&p, gc + 0.01, MomentumBranch::PI),
            Err(QrsError::ComplexEnergy { .. })
        ));
    }

    #[test]
    fn squeeze_parameter_examples() {
        let p = fig(0.02);
        for q in MomentumBranch::ALL {
            assert_eq!(squeeze_parameter(&p, 0.0, q).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            squeeze_parameter(&p, 0.3, MomentumBranch::PI).unwrap(),
            (1.84f64 / 1.12).ln() / 8.0,
            epsilon = 1e-14
        );
        let gc = critical_coupling(&p, MomentumBranch::PI).unwrap();
        let near = squeeze_parameter(&p, gc - 1e-9, MomentumBranch::PI).unwrap();
        assert!(near > 1.0);
        assert!(matches!(
            squeeze_parameter(&p, gc + 1e-6, MomentumBranch::PI),
            Err(QrsError::Divergent { .. })
        ));
    }

    #[test]
    fn ground_energy_without_coupling() {
        let p = ModelParams::default();
        assert_eq!(np_ground_energy(&p, 0.0).unwrap(), -100.0);
    }

    #[test]
    fn dominant_branch_examples() {
        let d = dominant_branch(&fig(0.02)).unwrap();
        assert_eq!(d.branch, MomentumBranch::PI);
        assert!(!d.is_tie());
        let d = dominant_branch(&fig(0.07)).unwrap();
        assert_eq!(d.branch, MomentumBranch::HALF_PI);
        let d = dominant_branch(&fig(0.05)).unwrap();
        assert!(d.is_tie());
        let mut fam = [d.branch, d.tie_with.unwrap()];
        fam.sort();
        assert_eq!(fam, [MomentumBranch::HALF_PI, MomentumBranch::PI]);
        let neg = ModelParams::new(1.0, 50.0, 0.0, -0.05, 0.02).unwrap();
        assert_eq!(dominant_branch(&neg).unwrap().branch, MomentumBranch::ZERO);
    }

    #[test]
    fn momentum_negation() {
        assert_eq!(MomentumBranch::HALF_PI.neg(), MomentumBranch::THREE_HALF_PI);
        assert_eq!(MomentumBranch::PI.neg(), MomentumBranch::PI);
        assert_eq!(MomentumBranch::ZERO.neg(), MomentumBranch::ZERO);
        assert_eq!(MomentumBranch::from_radians(-PI / 2.0), MomentumBranch::THREE_HALF_PI);
        assert!(MomentumBranch::new(4).is_err());
    }

    #[test]
    fn with_g_back_solves_lambda() {
        let p = ModelParams::with_g(1.0, 50.0, 0.6, 0.05, 0.02).unwrap();
        assert_abs_diff_eq!(p.lambda, 0.6 * 50f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(p.g(), 0.6, epsilon = 1e-15);
        assert!(ModelParams::new(0.0, 50.0, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 50.0, -1.0, 0.0, 0.0).is_err());
    }
}
