//! Snapshot-set directory format.
//!
//! A set is a directory holding `manifest.json` plus one raw data file per
//! time step. Data files are headerless little-endian IEEE-754 float64 with
//! the manifest's fields concatenated in declaration order.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FieldError, FieldInfo, SnapshotSet, StructuredGrid};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub grid: StructuredGrid,
    pub fields: Vec<FieldInfo>,
    pub times: Vec<f64>,
    /// Data file name template; `{index}` is replaced by the time index.
    pub pattern: String,
}

impl Manifest {
    pub fn data_file_name(&self, index: usize) -> String {
        self.pattern.replace("{index}", &index.to_string())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> FieldError {
    FieldError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `set` into `dir` (created if missing) using the default
/// `snap_{index}.bin` file pattern.
pub fn save_snapshot_set(dir: &Path, set: &SnapshotSet) -> Result<(), FieldError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        grid: *set.grid(),
        fields: set.fields().to_vec(),
        times: set.times().to_vec(),
        pattern: "snap_{index}.bin".to_string(),
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| FieldError::BadManifest(e.to_string()))?;
    fs::write(&manifest_path, json + "\n").map_err(|e| io_err(&manifest_path, e))?;

    for s in 0..set.num_snapshots() {
        let path = dir.join(manifest.data_file_name(s));
        let mut bytes = Vec::new();
        for f in 0..set.fields().len() {
            for v in set.frame(s, f) {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
        }
        let mut file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        file.write_all(&bytes).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

/// Loads a snapshot set saved by [`save_snapshot_set`] (or anything else
/// following the manifest format).
pub fn load_snapshot_set(dir: &Path) -> Result<SnapshotSet, FieldError> {
    let manifest_path = dir.join("manifest.json");
    if !manifest_path.is_file() {
        return Err(FieldError::MissingManifest(
            manifest_path.display().to_string(),
        ));
    }
    let text = fs::read_to_string(&manifest_path).map_err(|e| io_err(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| FieldError::BadManifest(e.to_string()))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(FieldError::UnsupportedVersion(manifest.version));
    }
    manifest.grid.validate()?;

    let cells = manifest.grid.cell_count();
    let frame_values: usize = manifest.fields.iter().map(|f| cells * f.components).sum();

    let mut data = Vec::with_capacity(manifest.times.len());
    for s in 0..manifest.times.len() {
        let path = dir.join(manifest.data_file_name(s));
        let mut bytes = Vec::new();
        fs::File::open(&path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| io_err(&path, e))?;
        if bytes.len() != frame_values * 8 {
            return Err(FieldError::SizeMismatch {
                expected: frame_values,
                got: bytes.len() / 8,
            });
        }
        let mut values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut frame = Vec::with_capacity(manifest.fields.len());
        for f in &manifest.fields {
            frame.push(values.by_ref().take(cells * f.components).collect());
        }
        data.push(frame);
    }
    SnapshotSet::new(manifest.grid, manifest.fields, manifest.times, data)
}
