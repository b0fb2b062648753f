//! Binary map file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic          4 bytes  "KSOM"
//! version        u16
//! scalar tag     u8 length, then ASCII ("f64" / "f32")
//! rows, cols     u64, u64
//! dim            u64
//! seed           u64
//! steps_trained  u64
//! weights        rows * cols * dim raw IEEE-754 values, row-major
//! ```

use std::io::{self, Read, Write};

use super::SomMap;
use crate::error::{Result, SomError};
use crate::grid::GridShape;
use crate::scalar::Scalar;

pub const MAP_MAGIC: &[u8; 4] = b"KSOM";
pub const MAP_FORMAT_VERSION: u16 = 1;

const MAX_TAG_LEN: usize = 16;

fn truncated() -> SomError {
    SomError::Format("unexpected end of map file".into())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => truncated(),
        _ => SomError::Io(e),
    })
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_usize<R: Read>(r: &mut R, what: &str) -> Result<usize> {
    usize::try_from(read_u64(r)?)
        .map_err(|_| SomError::Format(format!("map file {what} does not fit in memory")))
}

impl<T: Scalar> SomMap<T> {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAP_MAGIC)?;
        w.write_all(&MAP_FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[T::TAG.len() as u8])?;
        w.write_all(T::TAG.as_bytes())?;
        for v in [
            self.shape.rows() as u64,
            self.shape.cols() as u64,
            self.dim as u64,
            self.seed,
            self.steps_trained,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for &x in &self.weights {
            let bytes = x.to_bits_u64().to_le_bytes();
            w.write_all(&bytes[..T::BYTES])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    /// Reads a map written by [`SomMap::write_to`]; rejects trailing bytes.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAP_MAGIC {
            return Err(SomError::Format("not a map file: bad magic bytes".into()));
        }
        let mut version = [0u8; 2];
        read_exact(&mut r, &mut version)?;
        let version = u16::from_le_bytes(version);
        if version != MAP_FORMAT_VERSION {
            return Err(SomError::Format(format!(
                "unsupported map format version {version} (expected {MAP_FORMAT_VERSION})"
            )));
        }
        let mut tag_len = [0u8; 1];
        read_exact(&mut r, &mut tag_len)?;
        let tag_len = usize::from(tag_len[0]);
        if tag_len > MAX_TAG_LEN {
            return Err(SomError::Format("map file scalar tag is malformed".into()));
        }
        let mut tag = vec![0u8; tag_len];
        read_exact(&mut r, &mut tag)?;
        if tag != T::TAG.as_bytes() {
            return Err(SomError::Format(format!(
                "map file holds {} weights, expected {}",
                String::from_utf8_lossy(&tag),
                T::TAG
            )));
        }

        let rows = read_usize(&mut r, "row count")?;
        let cols = read_usize(&mut r, "column count")?;
        let dim = read_usize(&mut r, "dimension")?;
        let seed = read_u64(&mut r)?;
        let steps_trained = read_u64(&mut r)?;
        let shape = GridShape::new(rows, cols)
            .map_err(|e| SomError::Format(format!("map file has invalid shape: {e}")))?;
        let count = shape
            .node_count()
            .checked_mul(dim)
            .ok_or_else(|| SomError::Format("map file weight count overflows".into()))?;

        // Grow as data arrives so a corrupt header cannot force a huge allocation.
        let mut weights = Vec::with_capacity(count.min(1 << 20));
        let mut buf = [0u8; 8];
        for _ in 0..count {
            read_exact(&mut r, &mut buf[..T::BYTES])?;
            let bits = u64::from_le_bytes(buf);
            let v = T::from_bits_u64(bits)
                .ok_or_else(|| SomError::Format("map file weight is malformed".into()))?;
            weights.push(v);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(SomError::Format("trailing data after map weights".into()));
        }
        SomMap::from_weights(shape, dim, weights, seed, steps_trained)
            .map_err(|e| SomError::Format(format!("map file is inconsistent: {e}")))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_from(bytes)
    }
}
