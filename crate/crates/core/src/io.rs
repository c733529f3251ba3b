//! Field snapshot files: raw little-endian f64 pairs (re, im), row-major,
//! no header, with a JSON sidecar `{n, L, t, kind}`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid2D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub t: f64,
    pub kind: String,
}

fn sidecar_path(base: &Path) -> PathBuf {
    base.with_extension("json")
}

fn data_path(base: &Path) -> PathBuf {
    base.with_extension("bin")
}

/// Write `<base>.bin` and `<base>.json`.
pub fn write_snapshot(base: &Path, field: &ComplexField, t: f64, kind: &str) -> Result<()> {
    let meta = SnapshotMeta {
        n: field.grid().n(),
        l: field.grid().len_side(),
        t,
        kind: kind.to_string(),
    };
    let mut bytes = Vec::with_capacity(field.samples().len() * 16);
    for z in field.samples() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    let mut f = fs::File::create(data_path(base))?;
    f.write_all(&bytes)?;
    fs::write(sidecar_path(base), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Read a snapshot pair written by `write_snapshot`.
pub fn read_snapshot(base: &Path) -> Result<(ComplexField, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(base))?)?;
    let grid = Grid2D::new(meta.n, meta.l)?;
    let mut bytes = Vec::new();
    fs::File::open(data_path(base))?.read_to_end(&mut bytes)?;
    let expected = grid.points() * 16;
    if bytes.len() != expected {
        return Err(Error::InvalidConfig(format!(
            "snapshot payload is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let mut data = Vec::with_capacity(grid.points());
    for chunk in bytes.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
        data.push(Complex64::new(re, im));
    }
    Ok((ComplexField::from_data(grid, data)?, meta))
}
