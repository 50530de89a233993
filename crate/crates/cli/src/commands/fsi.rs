//! `wakekit fsi` — run a coupled model problem and write its history.

use std::path::Path;

use serde::Deserialize;
use wakekit::fsi::{
    run_fsi, write_history_csv, write_trace_csv, CouplingConfig, FsiRunConfig, NewmarkParams,
    PistonParams, ProblemSpec, StiffnessRamp,
};

use crate::error::CliError;
use crate::util::{load_config, prepare_out_dir};

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct FsiConfig {
    #[serde(flatten)]
    pub problem: ProblemSpec,
    pub newmark: NewmarkParams,
    pub coupling: CouplingConfig,
    pub t_end: f64,
    pub ramp: Option<StiffnessRamp>,
}

impl Default for FsiConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::Piston(PistonParams::default()),
            newmark: NewmarkParams {
                dt: 0.05,
                ..Default::default()
            },
            coupling: CouplingConfig::default(),
            t_end: 10.0,
            ramp: None,
        }
    }
}

pub struct FsiOverrides {
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
}

pub fn run(
    config_path: Option<&Path>,
    out: &Path,
    force: bool,
    overrides: &FsiOverrides,
) -> Result<i32, CliError> {
    let mut cfg: FsiConfig = load_config(config_path)?;
    if let Some(t_end) = overrides.t_end {
        cfg.t_end = t_end;
    }
    if let Some(dt) = overrides.dt {
        cfg.newmark.dt = dt;
    }
    prepare_out_dir(out, force)?;

    let run_config = FsiRunConfig {
        newmark: cfg.newmark,
        coupling: cfg.coupling,
        t_end: cfg.t_end,
        ramp: cfg.ramp,
    };
    let (history, trace) = run_fsi(&cfg.problem, &run_config)?;
    write_history_csv(&out.join("history.csv"), &history, &trace)?;
    write_trace_csv(&out.join("trace.csv"), &trace)?;

    let failed = trace.steps.iter().filter(|s| !s.converged).count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} steps did not converge (history still written)",
            trace.steps.len()
        );
        return Ok(3);
    }
    println!(
        "ran {} steps to t = {} into {}",
        trace.steps.len(),
        cfg.t_end,
        out.display()
    );
    Ok(0)
}
