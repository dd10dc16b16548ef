//! Parity `P = exp(iπ Σ_n (a_n†a_n + σ_n⁺σ_n⁻))` and the cyclic relabelling
//! `1234 → 2341` of photons and spins together.
//!
//! The relabelling maps `|n1 n2 n3 n4; s1 s2 s3 s4⟩` to
//! `|n2 n3 n4 n1; s2 s3 s4 s1⟩`, so one photon in cavity 1 moves to cavity 4.

use num_complex::Complex64;

use crate::fock::operator::{CsrMatrix, OperatorMatrix};
use crate::fock::space::FockSpace;

/// `(−1)^{Σ n_i + #up}` for one basis state.
pub fn parity_of(space: &FockSpace, idx: usize) -> i8 {
    let (n, s) = space.decode(idx);
    let total: usize = n.iter().sum::<usize>() + s.iter().filter(|&&u| u).count();
    if total % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn parity_operator(space: &FockSpace) -> OperatorMatrix {
    let d: Vec<Complex64> = (0..space.dim())
        .map(|i| Complex64::new(parity_of(space, i) as f64, 0.0))
        .collect();
    OperatorMatrix::sparse(CsrMatrix::diagonal(&d), true)
}

/// Image of a basis index under one cyclic relabelling.
pub fn cyclic_image(space: &FockSpace, idx: usize) -> usize {
    let (n, s) = space.decode(idx);
    space.index([n[1], n[2], n[3], n[0]], [s[1], s[2], s[3], s[0]])
}

pub fn cyclic_shift_operator(space: &FockSpace) -> OperatorMatrix {
    let one = Complex64::new(1.0, 0.0);
    let t = (0..space.dim()).map(|i| (cyclic_image(space, i), i, one)).collect();
    OperatorMatrix::sparse(CsrMatrix::from_triplets(space.dim(), t), false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_examples() {
        let space = FockSpace::new(3).unwrap();
        assert_eq!(parity_of(&space, space.index([0; 4], [false; 4])), 1);
        assert_eq!(parity_of(&space, space.index([1, 0, 0, 0], [false; 4])), -1);
        let p = parity_operator(&space);
        assert_eq!(p.mul(&p).unwrap().identity_error().unwrap(), 0.0);
    }

    #[test]
    fn cyclic_shift_convention() {
        let space = FockSpace::new(3).unwrap();
        let from = space.index([1, 0, 0, 0], [false; 4]);
        assert_eq!(cyclic_image(&space, from), space.index([0, 0, 0, 1], [false; 4]));
        let mut idx = space.index([2, 1, 0, 1], [true, false, true, true]);
        let start = idx;
        for _ in 0..4 {
            idx = cyclic_image(&space, idx);
        }
        assert_eq!(idx, start);
    }
}
