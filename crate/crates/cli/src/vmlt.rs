//! The VMLT latent container: a minimal, bit-exact on-disk format for
//! five-axis f32 latents.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "VMLT"
//! 4       2     format version (u16), currently 1
//! 6       20    five u32 extents: batch, channel, frames, height, width
//! 26      4*N   payload: row-major f32 values
//! 26+4N   8     FNV-1a-64 checksum of the payload bytes (u64)
//! ```
//!
//! Readers verify the magic, version, payload length, and checksum, and
//! reject trailing bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use videomerge_core::hash::Fnv1a64;
use videomerge_core::{LatentTensor, Shape5, Tensor};

use crate::error::{CliError, Result};

pub const MAGIC: [u8; 4] = *b"VMLT";
pub const VERSION: u16 = 1;

/// Serialize a latent tensor into `writer`; returns the payload checksum.
pub fn write_latent<W: Write>(writer: &mut W, tensor: &LatentTensor) -> std::io::Result<u64> {
    let shape = tensor.shape();
    writer.write_all(&MAGIC)?;
    writer.write_all(&VERSION.to_le_bytes())?;
    for extent in [
        shape.batch,
        shape.channel,
        shape.frames,
        shape.height,
        shape.width,
    ] {
        let extent = u32::try_from(extent).map_err(|_| {
            std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!("extent {extent} exceeds u32"),
            )
        })?;
        writer.write_all(&extent.to_le_bytes())?;
    }
    let mut hasher = Fnv1a64::new();
    for value in tensor.data() {
        let bytes = value.to_le_bytes();
        hasher.update(&bytes);
        writer.write_all(&bytes)?;
    }
    let checksum = hasher.finish();
    writer.write_all(&checksum.to_le_bytes())?;
    Ok(checksum)
}

/// Write a latent tensor to `path`; returns the payload checksum.
pub fn save_latent(path: &Path, tensor: &LatentTensor) -> Result<u64> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut writer = BufWriter::new(file);
    let checksum = write_latent(&mut writer, tensor).map_err(|e| CliError::io(path, e))?;
    writer.flush().map_err(|e| CliError::io(path, e))?;
    Ok(checksum)
}

fn format_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_owned(),
        message: message.into(),
    }
}

/// Deserialize a latent tensor; `path` is used for diagnostics only.
pub fn read_latent<R: Read>(reader: &mut R, path: &Path) -> Result<(LatentTensor, u64)> {
    let mut magic = [0u8; 4];
    reader
        .read_exact(&mut magic)
        .map_err(|e| CliError::io(path, e))?;
    if magic != MAGIC {
        return Err(format_err(path, "not a VMLT latent file (bad magic)"));
    }
    let mut version = [0u8; 2];
    reader
        .read_exact(&mut version)
        .map_err(|e| CliError::io(path, e))?;
    let version = u16::from_le_bytes(version);
    if version != VERSION {
        return Err(format_err(
            path,
            format!("unsupported format version {version} (expected {VERSION})"),
        ));
    }
    let mut extents = [0usize; 5];
    for extent in &mut extents {
        let mut buf = [0u8; 4];
        reader
            .read_exact(&mut buf)
            .map_err(|e| CliError::io(path, e))?;
        *extent = u32::from_le_bytes(buf) as usize;
    }
    let shape = Shape5::new(extents[0], extents[1], extents[2], extents[3], extents[4]);
    let len = shape
        .checked_len()
        .map_err(|e| format_err(path, e.to_string()))?;

    let mut payload = vec![0u8; len * 4];
    reader
        .read_exact(&mut payload)
        .map_err(|e| CliError::io(path, e))?;
    let mut hasher = Fnv1a64::new();
    hasher.update(&payload);
    let computed = hasher.finish();

    let mut stored = [0u8; 8];
    reader
        .read_exact(&mut stored)
        .map_err(|e| CliError::io(path, e))?;
    let stored = u64::from_le_bytes(stored);
    if stored != computed {
        return Err(CliError::Checksum {
            path: path.to_owned(),
            stored,
            computed,
        });
    }
    let mut trailing = [0u8; 1];
    match reader.read(&mut trailing) {
        Ok(0) => {}
        Ok(_) => return Err(format_err(path, "trailing bytes after checksum")),
        Err(e) => return Err(CliError::io(path, e)),
    }

    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    let tensor = Tensor::from_vec(shape, data).map_err(|e| format_err(path, e.to_string()))?;
    Ok((tensor, stored))
}

/// Read a latent tensor from `path`.
pub fn load_latent(path: &Path) -> Result<(LatentTensor, u64)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = BufReader::new(file);
    read_latent(&mut reader, path)
}
