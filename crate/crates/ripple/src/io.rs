//! Field persistence (RIPL v1 binary), JSON sidecars, run manifests,
//! fresh output directories, and small CSV helpers.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 4] = b"RIPL";
const VERSION: u32 = 1;

fn format_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), reason: reason.into() }
}

/// Write a field: magic "RIPL", version 1, n1, n2 (u32 LE), then n1*n2
/// f64 LE values in row-major order with x2 as the outer index.
pub fn write_field(path: &Path, field: &Field) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(field.grid().n1() as u32).to_le_bytes())?;
    out.write_all(&(field.grid().n2() as u32).to_le_bytes())?;
    for v in field.data() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a RIPL v1 field. Unknown versions are refused, not guessed.
pub fn read_field(path: &Path) -> Result<Field> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    input
        .read_exact(&mut magic)
        .map_err(|_| format_err(path, "truncated header"))?;
    if &magic != MAGIC {
        return Err(format_err(path, "bad magic, not a RIPL field file"));
    }
    let mut word = [0u8; 4];
    input
        .read_exact(&mut word)
        .map_err(|_| format_err(path, "truncated version"))?;
    let version = u32::from_le_bytes(word);
    if version != VERSION {
        return Err(format_err(
            path,
            format!("unsupported version {version}, this build reads version {VERSION}"),
        ));
    }
    input
        .read_exact(&mut word)
        .map_err(|_| format_err(path, "truncated dimensions"))?;
    let n1 = u32::from_le_bytes(word) as usize;
    input
        .read_exact(&mut word)
        .map_err(|_| format_err(path, "truncated dimensions"))?;
    let n2 = u32::from_le_bytes(word) as usize;
    let grid = Grid::new(n1, n2)?;
    let mut data = vec![0.0f64; grid.len()];
    let mut buf = [0u8; 8];
    for slot in data.iter_mut() {
        input
            .read_exact(&mut buf)
            .map_err(|_| format_err(path, "truncated payload"))?;
        *slot = f64::from_le_bytes(buf);
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(format_err(path, "trailing bytes after payload"));
    }
    Field::from_data(grid, data)
}

/// Write a field plus a `<name>.meta.json` sidecar describing it.
pub fn write_field_with_meta(
    path: &Path,
    field: &Field,
    meta: &serde_json::Value,
) -> Result<()> {
    write_field(path, field)?;
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".meta.json");
    let file = File::create(PathBuf::from(sidecar))?;
    serde_json::to_writer_pretty(BufWriter::new(file), meta)?;
    Ok(())
}

/// Everything needed to reproduce a run exactly.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub code_version: &'static str,
    pub command: String,
    /// Full configuration echo with all defaults applied.
    pub config: serde_json::Value,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            seed,
        }
    }
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let file = File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(BufWriter::new(file), manifest)?;
    Ok(())
}

/// Create the requested output directory, suffixing `-1`, `-2`, ... if it
/// already exists. Existing results are never overwritten.
pub fn fresh_dir(requested: &Path) -> Result<PathBuf> {
    if !requested.exists() {
        fs::create_dir_all(requested)?;
        return Ok(requested.to_path_buf());
    }
    for suffix in 1..10_000u32 {
        let candidate = PathBuf::from(format!("{}-{suffix}", requested.display()));
        if !candidate.exists() {
            fs::create_dir_all(&candidate)?;
            return Ok(candidate);
        }
    }
    Err(Error::InvalidParameter {
        name: "out_dir",
        reason: format!("no free suffix for {}", requested.display()),
    })
}

/// Write a CSV file with a header row.
pub fn write_csv(path: &Path, header: &str, rows: &str) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{header}")?;
    out.write_all(rows.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::sample_white;

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("xi.ripl");
        let g = Grid::square(16).unwrap();
        let f = sample_white(g, 99);
        write_field(&path, &f).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.grid().n1(), 16);
        for (a, b) in f.data().iter().zip(back.data().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_future_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ripl");
        fs::write(&path, b"JUNKxxxxxxxxxxxxxxxx").unwrap();
        let err = read_field(&path).unwrap_err().to_string();
        assert!(err.contains("magic"), "{err}");

        let g = Grid::square(8).unwrap();
        let f = Field::zeros(g);
        let path2 = dir.path().join("future.ripl");
        write_field(&path2, &f).unwrap();
        let mut bytes = fs::read(&path2).unwrap();
        bytes[4] = 2; // bump version
        fs::write(&path2, bytes).unwrap();
        let err = read_field(&path2).unwrap_err().to_string();
        assert!(err.contains("version"), "{err}");
    }

    #[test]
    fn rejects_truncation_and_trailing_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::square(8).unwrap();
        let f = Field::zeros(g);
        let path = dir.path().join("f.ripl");
        write_field(&path, &f).unwrap();
        let bytes = fs::read(&path).unwrap();
        let cut = dir.path().join("cut.ripl");
        fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_field(&cut).is_err());
        let fat = dir.path().join("fat.ripl");
        let mut extended = bytes.clone();
        extended.push(0);
        fs::write(&fat, extended).unwrap();
        assert!(read_field(&fat).is_err());
    }

    #[test]
    fn sidecar_and_manifest_written() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::square(8).unwrap();
        let path = dir.path().join("v.ripl");
        let meta = serde_json::json!({"kind": "linear_solution", "seed": 5});
        write_field_with_meta(&path, &Field::zeros(g), &meta).unwrap();
        let sidecar = dir.path().join("v.ripl.meta.json");
        let text = fs::read_to_string(sidecar).unwrap();
        assert!(text.contains("linear_solution"));

        let manifest = RunManifest::new("noise", serde_json::json!({"n1": 8}), 5);
        write_manifest(dir.path(), &manifest).unwrap();
        let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(text.contains("code_version"));
        assert!(text.contains("\"n1\": 8"));
    }

    #[test]
    fn fresh_dir_increments_suffix() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("run");
        let first = fresh_dir(&base).unwrap();
        let second = fresh_dir(&base).unwrap();
        let third = fresh_dir(&base).unwrap();
        assert_eq!(first, base);
        assert!(second.ends_with("run-1"));
        assert!(third.ends_with("run-2"));
        assert!(first.exists() && second.exists() && third.exists());
    }
}
