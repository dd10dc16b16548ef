//! Binary dump of states and operators.
//!
//! Layout: magic `QRS1`, `n_c` as u32, `dim` as u64, basis-order tag as u32,
//! then `rows × dim` complex doubles (re, im), row-major, little-endian.
//! A state is a single row.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{QrsError, Result};
use crate::fock::space::{FockSpace, BASIS_TAG_CAVITY_MAJOR};
use crate::fock::state::QuantumState;

pub const MAGIC: &[u8; 4] = b"QRS1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DumpHeader {
    pub n_c: u32,
    pub dim: u64,
    pub basis_tag: u32,
}

fn write_header<W: Write>(w: &mut W, space: &FockSpace) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(space.n_c() as u32).to_le_bytes())?;
    w.write_all(&(space.dim() as u64).to_le_bytes())?;
    w.write_all(&BASIS_TAG_CAVITY_MAJOR.to_le_bytes())?;
    Ok(())
}

fn write_values<W: Write>(w: &mut W, values: impl IntoIterator<Item = Complex64>) -> Result<()> {
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_state<W: Write>(w: &mut W, state: &QuantumState) -> Result<()> {
    write_header(w, state.space())?;
    write_values(w, state.amplitudes().iter().copied())
}

/// Writes a dense `dim × dim` matrix row by row.
pub fn write_operator<W: Write>(
    w: &mut W,
    space: &FockSpace,
    op: &crate::fock::operator::OperatorMatrix,
) -> Result<()> {
    if op.dim() != space.dim() {
        return Err(QrsError::InvalidParams("operator and space dimensions differ".into()));
    }
    let dense = op.to_dense()?;
    write_header(w, space)?;
    for r in 0..dense.nrows() {
        write_values(w, dense.row(r).iter().copied())?;
    }
    Ok(())
}

pub fn read_header<R: Read>(r: &mut R) -> Result<DumpHeader> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(QrsError::InvalidParams("not a QRS1 dump".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let n_c = u32::from_le_bytes(b4);
    r.read_exact(&mut b8)?;
    let dim = u64::from_le_bytes(b8);
    r.read_exact(&mut b4)?;
    let basis_tag = u32::from_le_bytes(b4);
    if basis_tag != BASIS_TAG_CAVITY_MAJOR {
        return Err(QrsError::InvalidParams(format!("unknown basis tag {basis_tag}")));
    }
    Ok(DumpHeader { n_c, dim, basis_tag })
}

fn read_values<R: Read>(r: &mut R, count: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(count);
    let mut b = [0u8; 16];
    for _ in 0..count {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b[..8].try_into().unwrap());
        let im = f64::from_le_bytes(b[8..].try_into().unwrap());
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn space_for(h: &DumpHeader) -> Result<FockSpace> {
    let space = FockSpace::new(h.n_c as usize)?;
    if space.dim() as u64 != h.dim {
        return Err(QrsError::InvalidParams(format!(
            "header dim {} inconsistent with n_c = {}",
            h.dim, h.n_c
        )));
    }
    Ok(space)
}

pub fn read_state<R: Read>(r: &mut R) -> Result<QuantumState> {
    let h = read_header(r)?;
    let space = space_for(&h)?;
    QuantumState::from_stored(space, read_values(r, space.dim())?)
}

/// Reads a dense operator dump as row-major entries.
pub fn read_operator<R: Read>(r: &mut R) -> Result<(FockSpace, Vec<Complex64>)> {
    let h = read_header(r)?;
    let space = space_for(&h)?;
    let n = space.dim();
    let values = read_values(r, n.checked_mul(n).ok_or(QrsError::DimensionOverflow { dim: n, cap: n })?)?;
    Ok((space, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::hamiltonian::build_hamiltonian;
    use crate::model::ModelParams;

    #[test]
    fn state_round_trip() {
        let space = FockSpace::new(2).unwrap();
        let amps: Vec<Complex64> = (0..space.dim()).map(|i| Complex64::new(i as f64, -0.5)).collect();
        let s = QuantumState::new(space, amps).unwrap();
        let mut buf = Vec::new();
        write_state(&mut buf, &s).unwrap();
        assert_eq!(&buf[..4], b"QRS1");
        assert_eq!(buf.len(), 20 + 16 * space.dim());
        let back = read_state(&mut buf.as_slice()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn operator_round_trip_and_bad_magic() {
        let space = FockSpace::new(2).unwrap();
        let p = ModelParams::with_g(1.0, 10.0, 0.3, 0.05, 0.02).unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let mut buf = Vec::new();
        write_operator(&mut buf, &space, &h).unwrap();
        let (sp, vals) = read_operator(&mut buf.as_slice()).unwrap();
        assert_eq!(sp, space);
        let n = space.dim();
        for r in 0..n {
            for c in 0..n {
                assert_eq!(vals[r * n + c], h.entry(r, c));
            }
        }
        buf[0] = b'X';
        assert!(read_operator(&mut buf.as_slice()).is_err());
    }
}
