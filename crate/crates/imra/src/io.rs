//! The IMRA grid file.
//!
//! ```text
//! "IMRA"  u32 version  u8 dim  i32 level  (i64 lo, u64 extent) * dim  f64 * Π extent
//! ```
//!
//! Little-endian throughout, payload row-major with the last axis fastest.

use std::fs;
use std::path::Path;

use imra_core::grid::{GridFunction, IndexBox};
use imra_core::tensor::MAX_DIM;

use crate::{ImraError, Result};

pub const MAGIC: [u8; 4] = *b"IMRA";
pub const VERSION: u32 = 1;

pub fn header_len(dim: usize) -> usize {
    4 + 4 + 1 + 4 + 16 * dim
}

pub fn encode_grid(g: &GridFunction) -> Vec<u8> {
    let n = g.dim();
    let mut out = Vec::with_capacity(header_len(n) + 8 * g.values().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(n as u8);
    out.extend_from_slice(&g.level().to_le_bytes());
    for l in 0..n {
        out.extend_from_slice(&g.bbox().lo()[l].to_le_bytes());
        out.extend_from_slice(&(g.bbox().extent(l) as u64).to_le_bytes());
    }
    for v in g.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let end = self.pos + N;
        let Some(bytes) = self.buf.get(self.pos..end) else {
            return Err(ImraError::CorruptHeader(format!("file ends inside the {what} field ({} bytes)", self.buf.len())));
        };
        self.pos = end;
        Ok(bytes.try_into().unwrap())
    }
}

pub fn decode_grid(buf: &[u8]) -> Result<GridFunction> {
    let mut c = Cursor { buf, pos: 0 };
    if buf.len() < 4 {
        let mut m = [0u8; 4];
        m[..buf.len()].copy_from_slice(buf);
        return Err(ImraError::BadMagic(m));
    }
    let magic: [u8; 4] = c.take("magic")?;
    if magic != MAGIC {
        return Err(ImraError::BadMagic(magic));
    }
    let version = u32::from_le_bytes(c.take("version")?);
    if version != VERSION {
        return Err(ImraError::Version(version));
    }
    let dim = c.take::<1>("dim")?[0] as usize;
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(ImraError::CorruptHeader(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    let level = i32::from_le_bytes(c.take("level")?);
    let (mut lo, mut hi) = (Vec::with_capacity(dim), Vec::with_capacity(dim));
    let mut count: u64 = 1;
    for axis in 0..dim {
        let l = i64::from_le_bytes(c.take("lo")?);
        let e = u64::from_le_bytes(c.take("extent")?);
        let h = i64::try_from(e)
            .ok()
            .filter(|&e| e > 0)
            .and_then(|e| l.checked_add(e - 1))
            .ok_or_else(|| ImraError::CorruptHeader(format!("axis {axis}: extent {e} with lo {l}")))?;
        count = count
            .checked_mul(e)
            .filter(|&c| c <= u64::MAX / 8)
            .ok_or_else(|| ImraError::CorruptHeader("payload size overflows".into()))?;
        lo.push(l);
        hi.push(h);
    }
    let expected = count * 8;
    let got = (buf.len() - c.pos) as u64;
    if got < expected {
        return Err(ImraError::Truncated { expected, got });
    }
    if got > expected {
        return Err(ImraError::Trailing(got - expected));
    }
    let mut values = Vec::with_capacity(count as usize);
    for (i, chunk) in buf[c.pos..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if v.is_nan() {
            return Err(ImraError::NanPayload { index: i as u64 });
        }
        if v.is_infinite() {
            return Err(ImraError::InfinitePayload { index: i as u64 });
        }
        values.push(v);
    }
    let bbox = IndexBox::new(lo, hi).map_err(|e| ImraError::CorruptHeader(e.to_string()))?;
    Ok(GridFunction::new(level, bbox, values)?)
}

pub fn write_grid(path: &Path, g: &GridFunction) -> Result<()> {
    fs::write(path, encode_grid(g)).map_err(|e| ImraError::io(path, e))
}

pub fn read_grid(path: &Path) -> Result<GridFunction> {
    let buf = fs::read(path).map_err(|e| ImraError::io(path, e))?;
    decode_grid(&buf)
}
