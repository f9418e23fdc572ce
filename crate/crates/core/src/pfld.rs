//! The `PFLD` binary field format.
//!
//! Layout (all little-endian):
//!
//! | bytes          | content                         |
//! |----------------|---------------------------------|
//! | 4              | magic `PFLD`                    |
//! | 4              | `u32` version, currently 1      |
//! | 4              | `u32` dimension `d`             |
//! | 4 · d          | `u32` samples per axis          |
//! | 4              | `u32` component count           |
//! | 8 · d          | `f64` period per axis           |
//! | 8 · m · N      | `f64` samples, component-major  |

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

pub const MAGIC: &[u8; 4] = b"PFLD";
pub const VERSION: u32 = 1;

pub fn encode(f: &Field) -> Vec<u8> {
    let g = f.grid();
    let mut out = Vec::with_capacity(20 + 12 * g.dim() + 8 * f.data().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    for &n in g.n() {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&(f.components() as u32).to_le_bytes());
    for &p in g.period() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    for &v in f.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::TruncatedPayload {
                expected: self.pos + len,
                found: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Field> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = r.u32()? as usize;
    if dim != 2 && dim != 3 {
        return Err(Error::DimensionMismatch(format!(
            "header declares dimension {dim}"
        )));
    }
    let mut n = Vec::with_capacity(dim);
    for _ in 0..dim {
        n.push(r.u32()? as usize);
    }
    let components = r.u32()? as usize;
    let mut period = Vec::with_capacity(dim);
    for _ in 0..dim {
        period.push(r.f64()?);
    }
    let grid = Grid::new(&n, &period)
        .map_err(|e| Error::DimensionMismatch(format!("header describes no valid grid: {e}")))?;
    if components == 0 {
        return Err(Error::DimensionMismatch("zero components".into()));
    }
    let count = components * grid.len();
    let expected = r.pos + 8 * count;
    if bytes.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::DimensionMismatch(format!(
            "{} trailing bytes after payload",
            bytes.len() - expected
        )));
    }
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        data.push(r.f64()?);
    }
    Field::new(grid, components, data)
}

pub fn write_field(f: &Field, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(f))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<Field> {
    decode(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Field {
        let g = Grid::new(&[8, 16], &[1.0, 2.0]).unwrap();
        Field::from_fn(&g, 2, |x, c| (x[0] * 3.0 + x[1]).sin() + c as f64 * 0.125).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = sample();
        let back = decode(&encode(&f)).unwrap();
        assert_eq!(back.grid(), f.grid());
        let a: Vec<u64> = f.data().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.data().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_errors() {
        let bytes = encode(&sample());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::BadMagic)));

        assert!(matches!(
            decode(&bytes[..bytes.len() - 3]),
            Err(Error::TruncatedPayload { .. })
        ));
        assert!(matches!(
            decode(&bytes[..10]),
            Err(Error::TruncatedPayload { .. })
        ));

        let mut dim4 = bytes.clone();
        dim4[8..12].copy_from_slice(&4u32.to_le_bytes());
        assert!(matches!(decode(&dim4), Err(Error::DimensionMismatch(_))));

        let mut v2 = bytes;
        v2[4..8].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(decode(&v2), Err(Error::UnsupportedVersion(2))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.pfld");
        let f = sample();
        write_field(&f, &path).unwrap();
        assert_eq!(read_field(&path).unwrap(), f);
    }
}
