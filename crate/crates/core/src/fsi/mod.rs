//! Partitioned fluid-structure coupling kernel.
//!
//! The structural side integrates M d'' + C d' + K d = F with the Newmark
//! scheme; the fluid side is a pluggable surrogate returning interface
//! forces. Each time step sub-iterates the exchange until the interface
//! displacement residual converges, with Aitken dynamic relaxation to keep
//! strongly coupled (added-mass dominated) problems stable.

mod coupling;
mod io;
mod newmark;
mod problems;

pub use coupling::{
    aitken_update, coupled_step, force_imbalance, interface_residual, AddedMassPiston,
    FluidSurrogate, QuasiSteadyAero,
};
pub use io::{write_history_csv, write_trace_csv};
pub use newmark::{discrete_energy, newmark_step, NewmarkIntegrator};
pub use problems::{
    run_fsi, ChainLoad, ChainParams, FsiHistory, FsiRunConfig, PistonParams, ProblemSpec,
    StiffnessRamp,
};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FsiError {
    #[error("system matrices must be square with matching dimensions")]
    DimensionMismatch,
    #[error("mass matrix is not symmetric positive definite")]
    MassNotSpd,
    #[error("{name} matrix is not symmetric")]
    NotSymmetric { name: &'static str },
    #[error("stiffness matrix is not positive semidefinite")]
    StiffnessNotPsd,
    #[error("force vector has length {got}, expected {expected}")]
    ForceLength { expected: usize, got: usize },
    #[error("effective Newmark matrix is singular")]
    SingularEffectiveMatrix,
    #[error("newmark parameters out of range (beta = {beta}, gamma = {gamma}, dt = {dt})")]
    BadNewmarkParams { beta: f64, gamma: f64, dt: f64 },
    #[error("coupling config out of range: need 0 < omega_min <= omega0 <= omega_max <= 2")]
    BadCouplingConfig,
    #[error("non-finite value in inner iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("interface vectors have mismatched lengths {a} and {b}")]
    InterfaceLength { a: usize, b: usize },
    #[error("run configuration invalid: {0}")]
    BadRunConfig(String),
}

/// Linear structural system M d'' + C d' + K d = F.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralSystem {
    mass: DMatrix<f64>,
    damping: DMatrix<f64>,
    stiffness: DMatrix<f64>,
}

fn is_symmetric(a: &DMatrix<f64>) -> bool {
    let scale = a.amax().max(1.0);
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

impl StructuralSystem {
    pub fn new(
        mass: DMatrix<f64>,
        damping: DMatrix<f64>,
        stiffness: DMatrix<f64>,
    ) -> Result<Self, FsiError> {
        let n = mass.nrows();
        if n == 0
            || mass.ncols() != n
            || damping.nrows() != n
            || damping.ncols() != n
            || stiffness.nrows() != n
            || stiffness.ncols() != n
        {
            return Err(FsiError::DimensionMismatch);
        }
        if !is_symmetric(&mass) {
            return Err(FsiError::NotSymmetric { name: "mass" });
        }
        if !is_symmetric(&damping) {
            return Err(FsiError::NotSymmetric { name: "damping" });
        }
        if !is_symmetric(&stiffness) {
            return Err(FsiError::NotSymmetric { name: "stiffness" });
        }
        if mass.clone().cholesky().is_none() {
            return Err(FsiError::MassNotSpd);
        }
        // PSD check with a tiny diagonal shift to tolerate roundoff
        let shift = 1e-12 * stiffness.amax().max(1.0);
        let shifted = &stiffness + DMatrix::identity(n, n) * shift;
        if shifted.cholesky().is_none() {
            return Err(FsiError::StiffnessNotPsd);
        }
        Ok(Self {
            mass,
            damping,
            stiffness,
        })
    }

    /// Single-degree-of-freedom convenience constructor.
    pub fn sdof(mass: f64, damping: f64, stiffness: f64) -> Result<Self, FsiError> {
        Self::new(
            DMatrix::from_element(1, 1, mass),
            DMatrix::from_element(1, 1, damping),
            DMatrix::from_element(1, 1, stiffness),
        )
    }

    pub fn n_dof(&self) -> usize {
        self.mass.nrows()
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn damping(&self) -> &DMatrix<f64> {
        &self.damping
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    /// Returns a copy with the stiffness scaled by `factor` (used by the
    /// start-up ramp of the model problems).
    pub fn with_stiffness_scaled(&self, factor: f64) -> Self {
        Self {
            mass: self.mass.clone(),
            damping: self.damping.clone(),
            stiffness: &self.stiffness * factor,
        }
    }
}

/// Kinematic state (displacement, velocity, acceleration) at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct NewmarkState {
    pub displacement: DVector<f64>,
    pub velocity: DVector<f64>,
    pub acceleration: DVector<f64>,
    pub time: f64,
}

impl NewmarkState {
    pub fn at_rest(n_dof: usize) -> Self {
        Self {
            displacement: DVector::zeros(n_dof),
            velocity: DVector::zeros(n_dof),
            acceleration: DVector::zeros(n_dof),
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.displacement.iter().all(|v| v.is_finite())
            && self.velocity.iter().all(|v| v.is_finite())
            && self.acceleration.iter().all(|v| v.is_finite())
            && self.time.is_finite()
    }
}

/// Newmark integrator parameters; the (1/4, 1/2) defaults are the
/// unconditionally stable average-acceleration variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewmarkParams {
    pub beta: f64,
    pub gamma: f64,
    pub dt: f64,
}

impl Default for NewmarkParams {
    fn default() -> Self {
        Self {
            beta: 0.25,
            gamma: 0.5,
            dt: 0.01,
        }
    }
}

impl NewmarkParams {
    pub fn validate(&self) -> Result<(), FsiError> {
        let ok = (0.0..=0.5).contains(&self.beta)
            && (0.0..=1.0).contains(&self.gamma)
            && self.dt > 0.0
            && self.dt.is_finite();
        if ok {
            Ok(())
        } else {
            Err(FsiError::BadNewmarkParams {
                beta: self.beta,
                gamma: self.gamma,
                dt: self.dt,
            })
        }
    }
}

/// Inner-loop controls for the implicit interface exchange.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CouplingConfig {
    /// Absolute convergence threshold on the interface displacement
    /// residual norm.
    pub tol: f64,
    pub max_inner: usize,
    /// Relaxation used for the first update of each step (and for every
    /// update when Aitken is disabled).
    pub omega0: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub aitken_enabled: bool,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_inner: 50,
            omega0: 0.5,
            omega_min: 0.05,
            omega_max: 1.0,
            aitken_enabled: true,
        }
    }
}

impl CouplingConfig {
    pub fn validate(&self) -> Result<(), FsiError> {
        let ok = self.tol > 0.0
            && self.max_inner >= 1
            && self.omega_min > 0.0
            && self.omega_min <= self.omega0
            && self.omega0 <= self.omega_max
            && self.omega_max <= 2.0;
        if ok {
            Ok(())
        } else {
            Err(FsiError::BadCouplingConfig)
        }
    }
}

/// Inner-loop record for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub time: f64,
    pub inner_iters: usize,
    pub residuals: Vec<f64>,
    pub omegas: Vec<f64>,
    pub converged: bool,
}

/// Per-step convergence telemetry of a coupled run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CouplingTrace {
    pub steps: Vec<StepTrace>,
}

impl CouplingTrace {
    pub fn all_converged(&self) -> bool {
        self.steps.iter().all(|s| s.converged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_system_validates_spd_mass() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]); // indefinite
        let id = DMatrix::identity(2, 2);
        assert!(matches!(
            StructuralSystem::new(bad, id.clone(), id.clone()),
            Err(FsiError::MassNotSpd)
        ));
    }

    #[test]
    fn structural_system_rejects_asymmetry() {
        let id = DMatrix::identity(2, 2);
        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        assert!(matches!(
            StructuralSystem::new(id.clone(), id.clone(), skew),
            Err(FsiError::NotSymmetric { name: "stiffness" })
        ));
    }

    #[test]
    fn coupling_config_bounds_are_enforced() {
        let mut cfg = CouplingConfig::default();
        cfg.validate().unwrap();
        cfg.omega_max = 2.5;
        assert!(cfg.validate().is_err());
        cfg.omega_max = 2.0;
        cfg.omega_min = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn newmark_params_bounds_are_enforced() {
        NewmarkParams::default().validate().unwrap();
        assert!(NewmarkParams {
            beta: 0.6,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(NewmarkParams {
            dt: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
