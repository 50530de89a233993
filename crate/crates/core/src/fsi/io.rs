//! CSV output for coupled-run histories and traces.

use std::fs;
use std::path::Path;

use super::{CouplingTrace, FsiError, FsiHistory};

fn write(path: &Path, content: String) -> Result<(), FsiError> {
    fs::write(path, content)
        .map_err(|e| FsiError::BadRunConfig(format!("cannot write {}: {e}", path.display())))
}

/// History CSV: `t, d0..d{n-1}, v0..v{n-1}, inner_iters, residual_final,
/// omega_final`, one row per time step.
pub fn write_history_csv(
    path: &Path,
    history: &FsiHistory,
    trace: &CouplingTrace,
) -> Result<(), FsiError> {
    let n = history.n_dof();
    let mut out = String::from("t");
    for i in 0..n {
        out.push_str(&format!(",d{i}"));
    }
    for i in 0..n {
        out.push_str(&format!(",v{i}"));
    }
    out.push_str(",inner_iters,residual_final,omega_final\n");

    for (s, &t) in history.times.iter().enumerate() {
        out.push_str(&format!("{t}"));
        for v in history.displacements[s].iter() {
            out.push_str(&format!(",{v}"));
        }
        for v in history.velocities[s].iter() {
            out.push_str(&format!(",{v}"));
        }
        let st = &trace.steps[s];
        let residual = st.residuals.last().copied().unwrap_or(0.0);
        let omega = st.omegas.last().copied().unwrap_or(f64::NAN);
        out.push_str(&format!(",{},{residual},{omega}\n", st.inner_iters));
    }
    write(path, out)
}

/// Trace CSV: one row per inner iteration with columns
/// `step, t, iter, residual, omega, converged`.
pub fn write_trace_csv(path: &Path, trace: &CouplingTrace) -> Result<(), FsiError> {
    let mut out = String::from("step,t,iter,residual,omega,converged\n");
    for (s, st) in trace.steps.iter().enumerate() {
        for (k, (&r, &w)) in st.residuals.iter().zip(&st.omegas).enumerate() {
            out.push_str(&format!("{s},{},{k},{r},{w},{}\n", st.time, st.converged));
        }
    }
    write(path, out)
}
