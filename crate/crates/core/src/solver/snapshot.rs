//! Binary dump of a fully stored field.
//!
//! Layout (little endian): magic `CFLBSNAP`, `u32` version, `u32 n`,
//! `u32 N`, `u32` level count, `f64 h`, `f64 dt`, then for each level the
//! `Nⁿ` node values as `f64` in flat node order.

use std::io::{Read, Write};

use crate::error::{LabError, Result};
use crate::field::ScalarField;

pub const MAGIC: &[u8; 8] = b"CFLBSNAP";
pub const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let g = field.grid();
    out.write_all(MAGIC)?;
    for v in [VERSION, g.n() as u32, g.nodes_per_axis() as u32, g.levels() as u32] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&g.h().to_le_bytes())?;
    out.write_all(&g.dt().to_le_bytes())?;
    for v in field.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Header and values of a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u32,
    pub nodes: u32,
    pub levels: u32,
    pub h: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::InvalidArgument("not a snapshot file".into()));
    }
    let mut word = [0u8; 4];
    let mut next_u32 = |input: &mut R| -> Result<u32> {
        input.read_exact(&mut word)?;
        Ok(u32::from_le_bytes(word))
    };
    let version = next_u32(&mut input)?;
    if version != VERSION {
        return Err(LabError::InvalidArgument(format!("snapshot version {version}")));
    }
    let n = next_u32(&mut input)?;
    let nodes = next_u32(&mut input)?;
    let levels = next_u32(&mut input)?;
    let mut dword = [0u8; 8];
    input.read_exact(&mut dword)?;
    let h = f64::from_le_bytes(dword);
    input.read_exact(&mut dword)?;
    let dt = f64::from_le_bytes(dword);
    let count = (nodes as usize).pow(n) * levels as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut dword)?;
        values.push(f64::from_le_bytes(dword));
    }
    Ok(Snapshot {
        n,
        nodes,
        levels,
        h,
        dt,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpacetimeGrid;

    #[test]
    fn round_trip() {
        let g = SpacetimeGrid::unit(2, 5, 0.5, 0.5).unwrap();
        let f = ScalarField::sample(&g, |p| p[0] - 2.0 * p[1] + p[2] * p[2]);
        let mut buf = Vec::new();
        write_snapshot(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 16 + 16 + 8 * g.len());
        let s = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!((s.n, s.nodes, s.levels), (2, 5, g.levels() as u32));
        assert_eq!(s.values, f.values());
        assert!(read_snapshot(&b"NOTASNAP"[..]).is_err());
    }
}
