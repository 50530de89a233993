//! Minimal binary PGM (P5, 8-bit) writer for mode heatmaps.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// Value range recorded beside each heatmap so the gray levels can be
/// mapped back to field values.
#[derive(Debug, Serialize)]
pub struct HeatmapSidecar {
    pub min: f64,
    pub max: f64,
    pub width: usize,
    pub height: usize,
    pub plane: String,
    pub mode: usize,
}

/// Writes `values` (row-major, top row first) as an 8-bit PGM with a
/// linear min -> 0, max -> 255 gray mapping. Constant images map to 0.
/// Returns the (min, max) used.
pub fn write_pgm(
    path: &Path,
    width: usize,
    height: usize,
    values: &[f64],
) -> Result<(f64, f64), CliError> {
    assert_eq!(values.len(), width * height);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if values.is_empty() {
        min = 0.0;
        max = 0.0;
    }
    let span = max - min;
    let mut bytes = Vec::with_capacity(values.len());
    for &v in values {
        let g = if span > 0.0 {
            ((v - min) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        };
        bytes.push(g);
    }
    let mut file = fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    write!(file, "P5\n{width} {height}\n255\n")
        .and_then(|_| file.write_all(&bytes))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok((min, max))
}
