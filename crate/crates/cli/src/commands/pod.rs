//! `wakekit pod` — plane-wise modal decomposition of a snapshot set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wakekit::field::{
    default_wake_planes, Axis, PlaneSpec, SnapshotSet, StructuredGrid,
};
use wakekit::pod::{
    assemble_snapshot_matrix, cumulative_energy, pod_method_of_snapshots, write_mode_set,
    PodResult,
};

use crate::error::CliError;
use crate::pgm::{write_pgm, HeatmapSidecar};
use crate::util::{load_config, prepare_out_dir, write_json};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PlaneSelection {
    /// The built-in wake-analysis layout; needs `rotor_diameter` and
    /// `hub_height`.
    Named(String),
    Explicit(Vec<PlaneSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct PodConfig {
    pub input: Option<PathBuf>,
    pub field: Option<String>,
    /// Component to analyse; `null` flattens all components.
    pub component: Option<usize>,
    pub subtract_mean: bool,
    /// Mode counts for the retained/loss summary.
    pub modes: Vec<usize>,
    pub planes: Option<PlaneSelection>,
    pub rotor_diameter: f64,
    pub hub_height: f64,
    /// Number of leading modes rendered as heatmaps.
    pub heatmaps: usize,
}

impl Default for PodConfig {
    fn default() -> Self {
        Self {
            input: None,
            field: None,
            component: Some(0),
            subtract_mean: false,
            modes: vec![1, 2, 3],
            planes: None,
            rotor_diameter: 126.0,
            hub_height: 90.0,
            heatmaps: 3,
        }
    }
}

pub struct PodOverrides {
    pub input: Option<PathBuf>,
    pub field: Option<String>,
    pub component: Option<usize>,
    pub all_components: bool,
    pub mean: bool,
    pub modes: Option<Vec<usize>>,
}

#[derive(Debug, Serialize)]
struct PlaneSummary {
    label: String,
    axis: Axis,
    offset: f64,
    rank: usize,
    singular_values: Vec<f64>,
    retained: BTreeMap<usize, f64>,
    loss: BTreeMap<usize, f64>,
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    threads: usize,
    overrides: &PodOverrides,
) -> Result<i32, CliError> {
    let mut cfg: PodConfig = load_config(config_path)?;
    if let Some(input) = &overrides.input {
        cfg.input = Some(input.clone());
    }
    if let Some(field) = &overrides.field {
        cfg.field = Some(field.clone());
    }
    if overrides.all_components {
        cfg.component = None;
    } else if let Some(c) = overrides.component {
        cfg.component = Some(c);
    }
    if overrides.mean {
        cfg.subtract_mean = true;
    }
    if let Some(modes) = &overrides.modes {
        cfg.modes = modes.clone();
    }

    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("no input snapshot set (set `input` or --input)".into()))?;
    let set = wakekit::field::load_snapshot_set(input)?;
    let field = match &cfg.field {
        Some(f) => f.clone(),
        None => set.fields()[0].name.clone(),
    };
    set.field_index(&field)?;

    let planes: Vec<PlaneSpec> = match &cfg.planes {
        None => default_wake_planes(cfg.rotor_diameter, cfg.hub_height),
        Some(PlaneSelection::Named(name)) if name == "default_wake" => {
            default_wake_planes(cfg.rotor_diameter, cfg.hub_height)
        }
        Some(PlaneSelection::Named(other)) => {
            return Err(CliError::Config(format!(
                "unknown plane selection {other:?}; use \"default_wake\" or an explicit list"
            )))
        }
        Some(PlaneSelection::Explicit(list)) => {
            if list.is_empty() {
                return Err(CliError::Config("plane list is empty".into()));
            }
            list.clone()
        }
    };

    prepare_out_dir(out, force)?;

    let jobs: Vec<(usize, &PlaneSpec)> = planes.iter().enumerate().collect();
    let results: Vec<Result<(), CliError>> = if threads <= 1 {
        jobs.iter()
            .map(|(_, plane)| analyse_plane(&set, &field, &cfg, plane, out))
            .collect()
    } else {
        let mut slots: Vec<Option<Result<(), CliError>>> = (0..jobs.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let chunk = jobs.len().div_ceil(threads);
            for (jobs_chunk, slots_chunk) in jobs.chunks(chunk).zip(slots.chunks_mut(chunk)) {
                let set = &set;
                let field = &field;
                let cfg = &cfg;
                scope.spawn(move || {
                    for ((_, plane), slot) in jobs_chunk.iter().zip(slots_chunk.iter_mut()) {
                        *slot = Some(analyse_plane(set, field, cfg, plane, out));
                    }
                });
            }
        });
        slots.into_iter().map(Option::unwrap).collect()
    };
    for r in results {
        r?;
    }
    println!("analysed {} plane(s) into {}", planes.len(), out.display());
    Ok(0)
}

fn analyse_plane(
    set: &SnapshotSet,
    field: &str,
    cfg: &PodConfig,
    plane: &PlaneSpec,
    out: &Path,
) -> Result<(), CliError> {
    let sampled = set.sample_plane_set(field, plane)?;
    let matrix = assemble_snapshot_matrix(&sampled, field, cfg.component, cfg.subtract_mean, None)?;
    let result = pod_method_of_snapshots(&matrix);

    let dir = out.join(&plane.label);
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;

    let components = match cfg.component {
        Some(_) => 1,
        None => sampled.fields()[0].components,
    };
    write_mode_set(&dir.join("modes"), &result, sampled.grid(), field, components)?;
    write_energy_csv(&dir.join("energy.csv"), &result)?;

    let mut retained = BTreeMap::new();
    let mut loss = BTreeMap::new();
    for &n in &cfg.modes {
        let n = n.min(result.rank());
        let r = cumulative_energy(&result, n)?;
        retained.insert(n, r);
        loss.insert(n, 1.0 - r);
    }
    write_json(
        &dir.join("summary.json"),
        &PlaneSummary {
            label: plane.label.clone(),
            axis: plane.axis,
            offset: plane.offset,
            rank: result.rank(),
            singular_values: result.singular_values().to_vec(),
            retained,
            loss,
        },
    )?;

    write_heatmaps(&dir, plane, sampled.grid(), &result, components, cfg.heatmaps)?;
    Ok(())
}

fn write_energy_csv(path: &Path, result: &PodResult) -> Result<(), CliError> {
    let total: f64 = result.singular_values().iter().map(|s| s * s).sum();
    let mut text = String::from("mode_index,sigma,energy_fraction,cumulative_retained,cumulative_loss\n");
    let mut cum = 0.0;
    for (i, &sigma) in result.singular_values().iter().enumerate() {
        let fraction = if total > 0.0 { sigma * sigma / total } else { 0.0 };
        cum += fraction;
        let _ = writeln!(text, "{},{sigma},{fraction},{cum},{}", i + 1, 1.0 - cum);
    }
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Renders the leading modes as PGM heatmaps. Vector-valued modes use their
/// first component.
fn write_heatmaps(
    dir: &Path,
    plane: &PlaneSpec,
    grid: &StructuredGrid,
    result: &PodResult,
    components: usize,
    count: usize,
) -> Result<(), CliError> {
    // in-plane axes: the collapsed axis has a single cell
    let (width_axis, height_axis) = match plane.axis {
        Axis::X => (Axis::Y, Axis::Z),
        Axis::Y => (Axis::X, Axis::Z),
        Axis::Z => (Axis::X, Axis::Y),
    };
    let width = grid.cells(width_axis);
    let height = grid.cells(height_axis);

    for m in 0..count.min(result.rank()) {
        let mode = result.modes().column(m);
        let mut values = Vec::with_capacity(width * height);
        // top image row = highest in-plane coordinate
        for row in (0..height).rev() {
            for col in 0..width {
                let cell = row * width + col;
                values.push(mode[cell * components]);
            }
        }
        let path = dir.join(format!("mode_{}.pgm", m + 1));
        let (min, max) = write_pgm(&path, width, height, &values)?;
        write_json(
            &dir.join(format!("mode_{}.json", m + 1)),
            &HeatmapSidecar {
                min,
                max,
                width,
                height,
                plane: plane.label.clone(),
                mode: m + 1,
            },
        )?;
    }
    Ok(())
}
