//! Raw path dump.
//!
//! Little-endian layout: the 8-byte magic `QLEPATH1`, `n_paths` (u64), the
//! number of recorded points per path (u64), the spacing of recorded points
//! (f64), then `n_paths × points` positions as f64, row-major by path.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::langevin::TrajectoryEnsemble;

pub const MAGIC: &[u8; 8] = b"QLEPATH1";

pub fn write_path_dump(ens: &TrajectoryEnsemble, mut out: impl Write) -> Result<()> {
    let points = ens.n_points();
    let spacing = if points > 1 { ens.t_grid[1] - ens.t_grid[0] } else { 0.0 };
    out.write_all(MAGIC)?;
    out.write_all(&(ens.n_paths() as u64).to_le_bytes())?;
    out.write_all(&(points as u64).to_le_bytes())?;
    out.write_all(&spacing.to_le_bytes())?;
    let mut buf = Vec::with_capacity(points * 8);
    for row in &ens.positions {
        buf.clear();
        for v in row {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

/// `(spacing, paths)` read back from a dump.
pub fn read_path_dump(mut input: impl Read) -> Result<(f64, Vec<Vec<f64>>)> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("not a path dump (bad magic)".into()));
    }
    let mut w = [0u8; 8];
    input.read_exact(&mut w)?;
    let n_paths = u64::from_le_bytes(w) as usize;
    input.read_exact(&mut w)?;
    let points = u64::from_le_bytes(w) as usize;
    input.read_exact(&mut w)?;
    let spacing = f64::from_le_bytes(w);
    let mut paths = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let mut row = Vec::with_capacity(points);
        for _ in 0..points {
            input.read_exact(&mut w)?;
            row.push(f64::from_le_bytes(w));
        }
        paths.push(row);
    }
    Ok((spacing, paths))
}
