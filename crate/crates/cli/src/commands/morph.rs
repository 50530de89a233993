//! `wakekit morph` — RBF-morph a node grid and report cell validity.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wakekit::field::{save_snapshot_set, FieldInfo, SnapshotSet, StructuredGrid};
use wakekit::morph::{
    build_rbf, check_mesh_validity, morph_grid, read_control_points_csv, NodeGrid,
};

use crate::error::CliError;
use crate::util::{load_config, prepare_out_dir, write_json};

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct MorphGridSpec {
    /// Node counts per direction (2 or 3 entries).
    pub nodes: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
}

impl Default for MorphGridSpec {
    fn default() -> Self {
        Self {
            nodes: vec![33, 33],
            spacing: vec![1.0 / 32.0, 1.0 / 32.0],
            origin: vec![0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct MorphConfig {
    /// Control-point CSV: x, y[, z], dx, dy[, dz].
    pub points: Option<PathBuf>,
    pub grid: MorphGridSpec,
}

pub struct MorphOverrides {
    pub points: Option<PathBuf>,
}

fn node_grid(spec: &MorphGridSpec, dim: usize) -> Result<NodeGrid, CliError> {
    if spec.nodes.len() != dim || spec.spacing.len() != dim || spec.origin.len() != dim {
        return Err(CliError::Config(format!(
            "grid spec must have {dim} entries for nodes, spacing and origin (control points are {dim}D)"
        )));
    }
    if spec.nodes.iter().any(|&n| n < 2) || spec.spacing.iter().any(|&s| !(s > 0.0)) {
        return Err(CliError::Config(
            "grid needs at least 2 nodes per direction and positive spacing".into(),
        ));
    }
    Ok(match dim {
        2 => NodeGrid::uniform_2d(
            spec.nodes[0],
            spec.nodes[1],
            [spec.spacing[0], spec.spacing[1]],
            [spec.origin[0], spec.origin[1]],
        ),
        _ => NodeGrid::uniform_3d(
            [spec.nodes[0], spec.nodes[1], spec.nodes[2]],
            [spec.spacing[0], spec.spacing[1], spec.spacing[2]],
            [spec.origin[0], spec.origin[1], spec.origin[2]],
        ),
    })
}

/// Morphed node data as a snapshot set: node positions become cell centers
/// and two 3-component fields carry the coordinates and displacements
/// (z = 0 for 2D grids).
fn node_set(original: &NodeGrid, morphed: &NodeGrid) -> Result<SnapshotSet, CliError> {
    let dim = original.dim;
    let [n0, n1, n2] = original.shape;
    let first = original.node(0);
    let spacing_of = |axis: usize, count: usize| {
        if count > 1 {
            let second = original.node(match axis {
                0 => original.node_index(1, 0, 0),
                1 => original.node_index(0, 1, 0),
                _ => original.node_index(0, 0, 1),
            });
            second[axis] - first[axis]
        } else {
            1.0
        }
    };
    let (dx, dy) = (spacing_of(0, n0), spacing_of(1, n1));
    let dz = if dim == 3 { spacing_of(2, n2) } else { 1.0 };
    let origin = [
        first[0] - 0.5 * dx,
        first[1] - 0.5 * dy,
        if dim == 3 { first[2] - 0.5 * dz } else { -0.5 },
    ];
    let grid = StructuredGrid::new(n0, n1, n2, dx, dy, dz, origin)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let n_nodes = original.n_nodes();
    let mut coords = Vec::with_capacity(n_nodes * 3);
    let mut disps = Vec::with_capacity(n_nodes * 3);
    for n in 0..n_nodes {
        let a = original.node(n);
        let b = morphed.node(n);
        for c in 0..3 {
            let (orig, new) = if c < dim { (a[c], b[c]) } else { (0.0, 0.0) };
            coords.push(new);
            disps.push(new - orig);
        }
    }
    let fields = vec![
        FieldInfo {
            name: "coordinates".into(),
            components: 3,
        },
        FieldInfo {
            name: "displacement".into(),
            components: 3,
        },
    ];
    Ok(SnapshotSet::new(grid, fields, vec![0.0], vec![vec![coords, disps]])?)
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    overrides: &MorphOverrides,
) -> Result<i32, CliError> {
    let mut cfg: MorphConfig = load_config(config_path)?;
    if let Some(points) = &overrides.points {
        cfg.points = Some(points.clone());
    }
    let points_path = cfg
        .points
        .as_ref()
        .ok_or_else(|| CliError::Config("no control points (set `points` or --points)".into()))?;

    let (points, kernel) = read_control_points_csv(points_path)?;
    let interpolant = build_rbf(&points, kernel)?;
    let grid = node_grid(&cfg.grid, kernel.dim())?;
    let morphed = morph_grid(&grid, &interpolant)?;
    let report = check_mesh_validity(&grid, &morphed)?;

    prepare_out_dir(out, force)?;
    save_snapshot_set(&out.join("morphed"), &node_set(&grid, &morphed)?)?;
    write_json(&out.join("validity.json"), &report)?;

    println!(
        "morphed {} nodes: min Jacobian {:.6e}, {} inverted cell(s)",
        grid.n_nodes(),
        report.min_jacobian,
        report.inverted_cells
    );
    if report.inverted_cells > 0 {
        return Ok(3);
    }
    Ok(0)
}
