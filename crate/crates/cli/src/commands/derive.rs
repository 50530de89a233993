//! `wakekit derive` — gradient, strain-rate and Q-criterion fields.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wakekit::field::{
    compute_gradient, compute_q_criterion, compute_strain_rate, load_snapshot_set,
    save_snapshot_set, FieldInfo, SnapshotSet,
};

use crate::error::CliError;
use crate::util::{load_config, prepare_out_dir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivedQuantity {
    Gradient,
    Strain,
    Q,
}

impl DerivedQuantity {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "gradient" => Ok(Self::Gradient),
            "strain" => Ok(Self::Strain),
            "q" => Ok(Self::Q),
            other => Err(CliError::Config(format!(
                "unknown derived quantity {other:?} (expected gradient, strain or q)"
            ))),
        }
    }

    fn dir_name(self) -> &'static str {
        match self {
            Self::Gradient => "gradient",
            Self::Strain => "strain",
            Self::Q => "q",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct DeriveConfig {
    pub input: Option<PathBuf>,
    pub field: Option<String>,
    pub what: Vec<DerivedQuantity>,
}

impl Default for DeriveConfig {
    fn default() -> Self {
        Self {
            input: None,
            field: None,
            what: vec![DerivedQuantity::Q],
        }
    }
}

pub struct DeriveOverrides {
    pub input: Option<PathBuf>,
    pub field: Option<String>,
    pub what: Option<Vec<DerivedQuantity>>,
}

/// Tensor components are written as nine scalar fields named
/// `<prefix>_ij` (i, j = row, column of du_i/dx_j).
fn tensor_set(
    prefix: &str,
    snaps: &[wakekit::field::FieldSnapshot],
) -> Result<SnapshotSet, CliError> {
    let grid = snaps[0].grid;
    let cells = grid.cell_count();
    let fields: Vec<FieldInfo> = (0..3)
        .flat_map(|i| {
            (0..3).map(move |j| FieldInfo {
                name: format!("{prefix}_{i}{j}"),
                components: 1,
            })
        })
        .collect();
    let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
    let data: Vec<Vec<Vec<f64>>> = snaps
        .iter()
        .map(|s| {
            (0..9)
                .map(|c| (0..cells).map(|cell| s.data[cell * 9 + c]).collect())
                .collect()
        })
        .collect();
    Ok(SnapshotSet::new(grid, fields, times, data)?)
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    overrides: &DeriveOverrides,
) -> Result<i32, CliError> {
    let mut cfg: DeriveConfig = load_config(config_path)?;
    if let Some(input) = &overrides.input {
        cfg.input = Some(input.clone());
    }
    if let Some(field) = &overrides.field {
        cfg.field = Some(field.clone());
    }
    if let Some(what) = &overrides.what {
        cfg.what = what.clone();
    }
    if cfg.what.is_empty() {
        return Err(CliError::Config("nothing to derive (empty `what`)".into()));
    }
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("no input snapshot set (set `input` or --input)".into()))?;

    let set = load_snapshot_set(input)?;
    let field = match &cfg.field {
        Some(f) => f.clone(),
        None => set.fields()[0].name.clone(),
    };
    let fi = set.field_index(&field)?;

    prepare_out_dir(out, force)?;

    let gradients: Vec<_> = (0..set.num_snapshots())
        .map(|s| compute_gradient(&set.snapshot(s, fi)))
        .collect::<Result<_, _>>()?;

    for what in &cfg.what {
        let dir = out.join(what.dir_name());
        match what {
            DerivedQuantity::Gradient => {
                save_snapshot_set(&dir, &tensor_set("grad", &gradients)?)?;
            }
            DerivedQuantity::Strain => {
                let strains: Vec<_> = gradients
                    .iter()
                    .map(compute_strain_rate)
                    .collect::<Result<_, _>>()?;
                save_snapshot_set(&dir, &tensor_set("strain", &strains)?)?;
            }
            DerivedQuantity::Q => {
                let qs: Vec<_> = gradients
                    .iter()
                    .map(compute_q_criterion)
                    .collect::<Result<_, _>>()?;
                save_snapshot_set(&dir, &SnapshotSet::from_snapshots("q", qs)?)?;
            }
        }
    }
    println!(
        "derived {} quantity set(s) into {}",
        cfg.what.len(),
        out.display()
    );
    Ok(0)
}
