//! `wakekit reconstruct` — rebuild snapshots from a stored mode set.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wakekit::field::{save_snapshot_set, SnapshotSet};
use wakekit::pod::{read_mode_set, reconstruct};

use crate::error::CliError;
use crate::util::{load_config, prepare_out_dir};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct ReconstructConfig {
    /// Mode-set directory written by `wakekit pod` (the `modes/` folder).
    pub input: Option<PathBuf>,
    /// Number of modes to keep; defaults to the full rank.
    pub modes: Option<usize>,
}

pub struct ReconstructOverrides {
    pub input: Option<PathBuf>,
    pub modes: Option<usize>,
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    overrides: &ReconstructOverrides,
) -> Result<i32, CliError> {
    let mut cfg: ReconstructConfig = load_config(config_path)?;
    if let Some(input) = &overrides.input {
        cfg.input = Some(input.clone());
    }
    if overrides.modes.is_some() {
        cfg.modes = overrides.modes;
    }
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("no input mode set (set `input` or --input)".into()))?;

    let (result, mode_set) = read_mode_set(input)?;
    let n = cfg.modes.unwrap_or_else(|| result.rank());
    let rebuilt = reconstruct(&result, n)?;

    prepare_out_dir(out, force)?;
    let s = rebuilt.data().ncols();
    let times: Vec<f64> = (0..s).map(|i| i as f64).collect();
    let frames: Vec<Vec<f64>> = (0..s)
        .map(|c| rebuilt.data().column(c).iter().copied().collect())
        .collect();
    let field = &mode_set.fields()[0];
    let set = SnapshotSet::single_field(
        field.name.clone(),
        field.components,
        *mode_set.grid(),
        times,
        frames,
    )?;
    save_snapshot_set(out, &set)?;
    println!(
        "reconstructed {s} snapshot(s) from {n} mode(s) into {}",
        out.display()
    );
    Ok(0)
}
