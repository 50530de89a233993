//! On-disk layout for decomposition results: the spatial modes are stored
//! as a pseudo-snapshot set (one "snapshot" per mode) with singular values,
//! temporal coefficients and mean metadata in `pod.json` beside it.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{PodError, PodResult};
use crate::field::{load_snapshot_set, save_snapshot_set, FieldError, SnapshotSet, StructuredGrid};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PodSidecar {
    pub singular_values: Vec<f64>,
    pub temporal_coeffs: Vec<Vec<f64>>,
    pub mean_subtracted: bool,
    pub weights_used: bool,
    /// Stored mean vector, present only when `mean_subtracted` is set;
    /// needed to reconstruct fields from disk.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
}

/// Writes modes as pseudo-snapshots (time stamp = 1-based mode index) plus
/// the `pod.json` sidecar into `dir`.
pub fn write_mode_set(
    dir: &Path,
    result: &PodResult,
    grid: &StructuredGrid,
    field_name: &str,
    components: usize,
) -> Result<(), PodError> {
    let n = grid.cell_count() * components;
    if result.modes().nrows() != n {
        return Err(PodError::LengthMismatch {
            expected: n,
            got: result.modes().nrows(),
        });
    }
    let times: Vec<f64> = (1..=result.rank()).map(|i| i as f64).collect();
    let frames: Vec<Vec<f64>> = (0..result.rank())
        .map(|m| result.modes().column(m).iter().copied().collect())
        .collect();
    let set = SnapshotSet::single_field(field_name, components, *grid, times, frames)?;
    save_snapshot_set(dir, &set)?;

    let sidecar = PodSidecar {
        singular_values: result.singular_values().to_vec(),
        temporal_coeffs: (0..result.rank())
            .map(|r| result.temporal_coeffs().row(r).iter().copied().collect())
            .collect(),
        mean_subtracted: result.mean_subtracted(),
        weights_used: result.weights().is_some(),
        mean: result.stored_mean().map(|m| m.as_slice().to_vec()),
    };
    let path = dir.join("pod.json");
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| PodError::Field(FieldError::BadManifest(e.to_string())))?;
    fs::write(&path, json + "\n").map_err(|e| {
        PodError::Field(FieldError::Io {
            path: path.display().to_string(),
            source: e,
        })
    })?;
    Ok(())
}

/// Reads a mode set written by [`write_mode_set`]. Quadrature weights are
/// not persisted (only the `weights_used` flag), so the returned result
/// supports reconstruction but re-projection does not re-apply weights.
pub fn read_mode_set(dir: &Path) -> Result<(PodResult, SnapshotSet), PodError> {
    let set = load_snapshot_set(dir)?;
    let path = dir.join("pod.json");
    let text = fs::read_to_string(&path).map_err(|e| {
        PodError::Field(FieldError::Io {
            path: path.display().to_string(),
            source: e,
        })
    })?;
    let sidecar: PodSidecar = serde_json::from_str(&text)
        .map_err(|e| PodError::Field(FieldError::BadManifest(e.to_string())))?;

    let rank = sidecar.singular_values.len();
    if set.num_snapshots() != rank || sidecar.temporal_coeffs.len() != rank {
        return Err(PodError::Field(FieldError::SizeMismatch {
            expected: rank,
            got: set.num_snapshots(),
        }));
    }
    let n = set.grid().cell_count() * set.fields()[0].components;
    let mut modes = DMatrix::zeros(n, rank);
    for m in 0..rank {
        let frame = set.frame(m, 0);
        for (row, &v) in frame.iter().enumerate() {
            modes[(row, m)] = v;
        }
    }
    let s = sidecar.temporal_coeffs.first().map_or(0, Vec::len);
    let mut coeffs = DMatrix::zeros(rank, s);
    for (r, row) in sidecar.temporal_coeffs.iter().enumerate() {
        if row.len() != s {
            return Err(PodError::Field(FieldError::SizeMismatch {
                expected: s,
                got: row.len(),
            }));
        }
        for (c, &v) in row.iter().enumerate() {
            coeffs[(r, c)] = v;
        }
    }
    let result = PodResult {
        modes,
        singular_values: sidecar.singular_values,
        temporal_coeffs: coeffs,
        weights: None,
        mean_subtracted: sidecar.mean_subtracted,
        stored_mean: sidecar.mean.map(DVector::from_vec),
    };
    Ok((result, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pod::{assemble_snapshot_matrix, pod_direct_svd, reconstruct};
    use crate::field::SnapshotSet;

    #[test]
    fn mode_set_round_trips_through_disk() {
        let grid = StructuredGrid::new(3, 2, 1, 1.0, 1.0, 1.0, [0.0; 3]).unwrap();
        let frames = vec![
            vec![1.0, 0.5, -0.2, 0.0, 2.0, 1.0],
            vec![0.2, 1.5, 0.0, -1.0, 0.4, 2.2],
            vec![0.9, -0.3, 0.8, 0.1, 1.1, 0.6],
        ];
        let set =
            SnapshotSet::single_field("u", 1, grid, vec![0.0, 1.0, 2.0], frames).unwrap();
        let m = assemble_snapshot_matrix(&set, "u", None, true, None).unwrap();
        let r = pod_direct_svd(&m);

        let dir = tempfile::tempdir().unwrap();
        write_mode_set(dir.path(), &r, &grid, "u", 1).unwrap();
        let (loaded, mode_set) = read_mode_set(dir.path()).unwrap();

        assert_eq!(loaded.singular_values(), r.singular_values());
        assert_eq!(loaded.modes(), r.modes());
        assert_eq!(loaded.temporal_coeffs(), r.temporal_coeffs());
        assert_eq!(mode_set.num_snapshots(), r.rank());

        // reconstruction from disk matches reconstruction in memory
        let from_disk = reconstruct(&loaded, loaded.rank()).unwrap();
        let in_memory = reconstruct(&r, r.rank()).unwrap();
        assert_eq!(from_disk.data(), in_memory.data());
    }
}
