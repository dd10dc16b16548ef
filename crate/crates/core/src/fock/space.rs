//! Truncated Hilbert space of four cavities and four qubits.
//!
//! Basis order is cavity-major, spin-minor:
//!
//! ```text
//! index = photon_index · 16 + spin_bits
//! photon_index = ((n1 · n_c + n2) · n_c + n3) · n_c + n4
//! spin_bits    = s1 << 3 | s2 << 2 | s3 << 1 | s4        (bit 1 = spin up, σz = +1)
//! ```
//!
//! Each cavity keeps the Fock states `0..n_c`, so the photon number per
//! cavity never exceeds `n_c − 1`.

use serde::Serialize;

use crate::error::{QrsError, Result};
use crate::model::SITES;

/// Number of spin configurations of four qubits.
pub const SPIN_DIM: usize = 1 << SITES;

/// Default ceiling on the Hilbert-space dimension (`n_c = 10`).
pub const DEFAULT_DIM_CAP: usize = 160_000;

/// Tag written in binary dumps for the cavity-major, spin-minor order.
pub const BASIS_TAG_CAVITY_MAJOR: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockSpace {
    n_c: usize,
    photon_dim: usize,
}

impl FockSpace {
    pub fn new(n_c: usize) -> Result<Self> {
        Self::with_cap(n_c, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n_c: usize, cap: usize) -> Result<Self> {
        if n_c < 2 {
            return Err(QrsError::InvalidParams(format!("n_c must be >= 2, got {n_c}")));
        }
        let photon_dim = n_c
            .checked_pow(SITES as u32)
            .ok_or(QrsError::DimensionOverflow { dim: usize::MAX, cap })?;
        let dim = photon_dim
            .checked_mul(SPIN_DIM)
            .ok_or(QrsError::DimensionOverflow { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(QrsError::DimensionOverflow { dim, cap });
        }
        Ok(Self { n_c, photon_dim })
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    /// `16 n_c⁴`.
    pub fn dim(&self) -> usize {
        self.photon_dim * SPIN_DIM
    }

    /// `n_c⁴`.
    pub fn photon_dim(&self) -> usize {
        self.photon_dim
    }

    pub fn photon_index(&self, n: [usize; SITES]) -> usize {
        n.iter().fold(0, |acc, &k| acc * self.n_c + k)
    }

    pub fn photon_numbers(&self, mut idx: usize) -> [usize; SITES] {
        let mut n = [0; SITES];
        for site in (0..SITES).rev() {
            n[site] = idx % self.n_c;
            idx /= self.n_c;
        }
        n
    }

    /// Composite index of `(n, s)` with `s[i] = true` meaning spin up.
    pub fn index(&self, n: [usize; SITES], s: [bool; SITES]) -> usize {
        self.photon_index(n) * SPIN_DIM + spin_bits(s)
    }

    pub fn decode(&self, idx: usize) -> ([usize; SITES], [bool; SITES]) {
        (self.photon_numbers(idx / SPIN_DIM), spin_state(idx % SPIN_DIM))
    }

    /// Stride of site `i` within the photon index.
    pub(crate) fn photon_stride(&self, site: usize) -> usize {
        self.n_c.pow((SITES - 1 - site) as u32)
    }
}

pub fn spin_bits(s: [bool; SITES]) -> usize {
    s.iter().fold(0, |acc, &up| (acc << 1) | up as usize)
}

pub fn spin_state(bits: usize) -> [bool; SITES] {
    let mut s = [false; SITES];
    for (i, v) in s.iter_mut().enumerate() {
        *v = bits >> (SITES - 1 - i) & 1 == 1;
    }
    s
}

/// Bit mask of site `i` within the spin index.
pub(crate) fn spin_mask(site: usize) -> usize {
    1 << (SITES - 1 - site)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_is_bijective() {
        let f = FockSpace::new(3).unwrap();
        assert_eq!(f.dim(), 16 * 81);
        for idx in 0..f.dim() {
            let (n, s) = f.decode(idx);
            assert_eq!(f.index(n, s), idx);
        }
    }

    #[test]
    fn documented_order() {
        let f = FockSpace::new(5).unwrap();
        assert_eq!(f.index([0, 0, 0, 0], [false; 4]), 0);
        assert_eq!(f.index([0, 0, 0, 0], [true, false, false, false]), 8);
        assert_eq!(f.index([0, 0, 0, 1], [false; 4]), 16);
        assert_eq!(f.index([1, 0, 0, 0], [false; 4]), 125 * 16);
        assert_eq!(f.photon_stride(0), 125);
        assert_eq!(spin_mask(0), 8);
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(FockSpace::new(1), Err(QrsError::InvalidParams(_))));
        assert!(matches!(
            FockSpace::with_cap(5, 1000),
            Err(QrsError::DimensionOverflow { dim: 10000, cap: 1000 })
        ));
    }
}
