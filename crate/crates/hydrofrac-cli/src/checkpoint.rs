//! Binary state checkpoints.
//!
//! Layout: magic bytes `HPE1`, format version as `u16`, then `n_x` and
//! `n_z` as `u64`, the time `t` as `f64`, and the physical velocity array
//! row-major (z-major rows, x fastest), all little-endian. The payload is
//! the raw bit pattern of the stored values, so a write/read round trip is
//! bit-exact.

use std::io::{Read, Write};
use std::path::Path;

use hydrofrac_core::grid::Grid;
use hydrofrac_core::ndarray::Array2;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"HPE1";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a checkpoint: expected magic {expected:?}, found {found:?}")]
    MagicMismatch { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported checkpoint version {found} (this build reads version {expected})")]
    VersionMismatch { expected: u16, found: u16 },
    #[error("checkpoint truncated: expected {expected} payload bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("checkpoint has {0} trailing bytes after the payload")]
    TrailingData(usize),
    #[error("checkpoint header declares an invalid grid: {0}")]
    BadGrid(String),
}

/// A physical-space snapshot: the stored form of a solver state.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    /// Physical velocity, `(n_z + 1) x n_x`.
    pub u: Array2<f64>,
}

impl Checkpoint {
    pub fn grid(&self) -> Result<Grid, CheckpointError> {
        let (levels, n_x) = self.u.dim();
        Grid::new(n_x, levels.saturating_sub(1)).map_err(|e| CheckpointError::BadGrid(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), CheckpointError> {
        let (levels, n_x) = self.u.dim();
        let mut buf =
            Vec::with_capacity(4 + 2 + 8 + 8 + 8 + levels * n_x * std::mem::size_of::<f64>());
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.extend_from_slice(&(n_x as u64).to_le_bytes());
        buf.extend_from_slice(&((levels - 1) as u64).to_le_bytes());
        buf.extend_from_slice(&self.t.to_le_bytes());
        for row in self.u.rows() {
            for v in row {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        let mut file = std::fs::File::create(path)?;
        file.write_all(&buf)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Checkpoint, CheckpointError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Checkpoint::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
        const HEADER: usize = 4 + 2 + 8 + 8 + 8;
        if bytes.len() < 4 {
            return Err(CheckpointError::Truncated {
                expected: HEADER,
                found: bytes.len(),
            });
        }
        let found: [u8; 4] = bytes[0..4].try_into().unwrap();
        if found != MAGIC {
            return Err(CheckpointError::MagicMismatch {
                expected: MAGIC,
                found,
            });
        }
        if bytes.len() < HEADER {
            return Err(CheckpointError::Truncated {
                expected: HEADER,
                found: bytes.len(),
            });
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(CheckpointError::VersionMismatch {
                expected: VERSION,
                found: version,
            });
        }
        let n_x = u64::from_le_bytes(bytes[6..14].try_into().unwrap()) as usize;
        let n_z = u64::from_le_bytes(bytes[14..22].try_into().unwrap()) as usize;
        Grid::new(n_x, n_z).map_err(|e| CheckpointError::BadGrid(e.to_string()))?;
        let t = f64::from_le_bytes(bytes[22..30].try_into().unwrap());
        let count = (n_z + 1) * n_x;
        let expected = count * std::mem::size_of::<f64>();
        let payload = &bytes[HEADER..];
        if payload.len() < expected {
            return Err(CheckpointError::Truncated {
                expected,
                found: payload.len(),
            });
        }
        if payload.len() > expected {
            return Err(CheckpointError::TrailingData(payload.len() - expected));
        }
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let u = Array2::from_shape_vec((n_z + 1, n_x), values).expect("shape checked above");
        Ok(Checkpoint { t, u })
    }
}
