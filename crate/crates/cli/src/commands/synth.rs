//! `wakekit synth` — generate a synthetic wake snapshot set.

use std::path::Path;

use serde::Deserialize;
use wakekit::field::{save_snapshot_set, SnapshotSet, StructuredGrid};
use wakekit::synth::{generate_wake_snapshot, WakeModelParams};

use crate::error::CliError;
use crate::util::{load_config, prepare_out_dir};

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct TimeSpec {
    pub start: f64,
    pub dt: f64,
    pub count: usize,
}

impl Default for TimeSpec {
    fn default() -> Self {
        Self {
            start: 0.0,
            dt: 1.0,
            count: 48,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub grid: StructuredGrid,
    pub times: TimeSpec,
    pub params: WakeModelParams,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            // x in [0, 403.2], y in [-126, 126], z in [0, 216]: spans the
            // default rotor and the 0.5D..2.5D analysis planes
            grid: StructuredGrid {
                nx: 32,
                ny: 24,
                nz: 24,
                dx: 12.6,
                dy: 10.5,
                dz: 9.0,
                origin: [0.0, -126.0, 0.0],
            },
            times: TimeSpec::default(),
            params: WakeModelParams::default(),
        }
    }
}

pub struct SynthOverrides {
    pub seed: Option<u64>,
    pub snapshots: Option<usize>,
    pub dt: Option<f64>,
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    overrides: &SynthOverrides,
) -> Result<i32, CliError> {
    let mut cfg: SynthConfig = load_config(config_path)?;
    if let Some(seed) = overrides.seed {
        cfg.params.seed = seed;
    }
    if let Some(count) = overrides.snapshots {
        cfg.times.count = count;
    }
    if let Some(dt) = overrides.dt {
        cfg.times.dt = dt;
    }
    cfg.params.validate()?;
    cfg.grid.validate()?;
    if cfg.times.count == 0 || !(cfg.times.dt > 0.0) {
        return Err(CliError::Config(format!(
            "times must have count >= 1 and dt > 0 (count = {}, dt = {})",
            cfg.times.count, cfg.times.dt
        )));
    }
    prepare_out_dir(out, force)?;

    let mut snaps = Vec::with_capacity(cfg.times.count);
    for i in 0..cfg.times.count {
        let t = cfg.times.start + i as f64 * cfg.times.dt;
        snaps.push(generate_wake_snapshot(&cfg.params, &cfg.grid, t)?);
    }
    let set = SnapshotSet::from_snapshots("velocity", snaps)?;
    save_snapshot_set(out, &set)?;
    println!(
        "wrote {} snapshots ({}x{}x{} cells) to {}",
        cfg.times.count,
        cfg.grid.nx,
        cfg.grid.ny,
        cfg.grid.nz,
        out.display()
    );
    Ok(0)
}
