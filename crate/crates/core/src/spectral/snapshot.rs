//! Binary snapshot format `MZK1`.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `b"MZK1"` |
//! | 4     | bandwidth `K` as `i32` |
//! | 8     | time `t` as `f64` |
//! | 8     | `λ` as `f64` |
//! | 8     | `s` as `f64` |
//! | 16·M² | coefficients in grid storage order, `(re, im)` pairs of `f64` |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MZK1";
pub const HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub lambda: f64,
    pub s: f64,
    pub field: SpectralField,
}

impl Snapshot {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let k = i32::try_from(self.field.grid().bandwidth())
            .map_err(|_| Error::Format("bandwidth does not fit in i32".into()))?;
        let mut buf = Vec::with_capacity(HEADER_LEN + 16 * self.field.grid().len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&k.to_le_bytes());
        buf.extend_from_slice(&self.time.to_le_bytes());
        buf.extend_from_slice(&self.lambda.to_le_bytes());
        buf.extend_from_slice(&self.s.to_le_bytes());
        for c in self.field.coeffs() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let k = i32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if k < 0 {
            return Err(Error::Format(format!("negative bandwidth {k}")));
        }
        let grid = TorusGrid::new(k as usize);
        let expected = HEADER_LEN + 16 * grid.len();
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} bytes for bandwidth {k}, found {}",
                bytes.len()
            )));
        }
        let coeffs = (0..grid.len())
            .map(|i| {
                let o = HEADER_LEN + 16 * i;
                Complex64::new(f64_at(o), f64_at(o + 8))
            })
            .collect();
        let field = SpectralField::from_coeffs(grid, coeffs)
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(Self {
            time: f64_at(8),
            lambda: f64_at(16),
            s: f64_at(24),
            field,
        })
    }
}
