//! Binary grid dump.
//!
//! Little-endian throughout. A 64-byte header followed by `ny · nz · width`
//! `f64` values in row-major order (`y` outer, `z` inner, value innermost):
//!
//! | offset | type     | field                                   |
//! |-------:|----------|-----------------------------------------|
//! | 0      | [u8; 8]  | magic `KLNBGRID`                        |
//! | 8      | u32      | `ny`                                    |
//! | 12     | u32      | `nz`                                    |
//! | 16     | u32      | `width`: 1 density, 8 spinor re/im      |
//! | 20     | u32      | format version (1)                      |
//! | 24     | f64      | first `y`                               |
//! | 32     | f64      | `dy`                                    |
//! | 40     | f64      | first `z`                               |
//! | 48     | f64      | `dz`                                    |
//! | 56     | f64      | guiding centre `y₀`                     |

use std::io::{self, Read, Write};

use crate::wavefield::{Axis, Grid, SpinorField};

pub const MAGIC: &[u8; 8] = b"KLNBGRID";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    Density,
    Spinor,
}

impl Payload {
    pub fn width(self) -> u32 {
        match self {
            Payload::Density => 1,
            Payload::Spinor => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridHeader {
    pub grid: Grid,
    pub width: u32,
    pub guiding_center: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub header: GridHeader,
    pub values: Vec<f64>,
}

pub fn write_grid<W: Write>(mut out: W, field: &SpinorField, payload: Payload) -> io::Result<()> {
    let g = &field.grid;
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "axis too long"))
    };
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&dim(g.y.len)?.to_le_bytes());
    header.extend_from_slice(&dim(g.z.len)?.to_le_bytes());
    header.extend_from_slice(&payload.width().to_le_bytes());
    header.extend_from_slice(&VERSION.to_le_bytes());
    for v in [
        g.y.start,
        g.y.step,
        g.z.start,
        g.z.step,
        field.guiding_center,
    ] {
        header.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(header.len(), HEADER_LEN);
    out.write_all(&header)?;

    let mut buf = Vec::with_capacity(field.values.len() * payload.width() as usize * 8);
    for psi in &field.values {
        match payload {
            Payload::Density => {
                let rho: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
                buf.extend_from_slice(&rho.to_le_bytes());
            }
            Payload::Spinor => {
                for c in psi {
                    buf.extend_from_slice(&c.re.to_le_bytes());
                    buf.extend_from_slice(&c.im.to_le_bytes());
                }
            }
        }
    }
    out.write_all(&buf)
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_grid<R: Read>(mut input: R) -> io::Result<GridData> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if &header[0..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    if u32_at(20) != VERSION {
        return Err(bad("unsupported version"));
    }
    let (ny, nz, width) = (u32_at(8) as usize, u32_at(12) as usize, u32_at(16));
    if width != 1 && width != 8 {
        return Err(bad("unsupported value width"));
    }
    let grid = Grid {
        y: Axis::new(f64_at(24), f64_at(32), ny),
        z: Axis::new(f64_at(40), f64_at(48), nz),
    };
    let count = ny
        .checked_mul(nz)
        .and_then(|v| v.checked_mul(width as usize))
        .ok_or_else(|| bad("grid dimensions overflow"))?;
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != count * 8 {
        return Err(bad("payload length does not match header"));
    }
    let values = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(GridData {
        header: GridHeader {
            grid,
            width,
            guiding_center: f64_at(56),
        },
        values,
    })
}
