//! Coupled model problems: an added-mass piston and a lumped-mass
//! cantilever chain under wind loading.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coupling::{coupled_step, AddedMassPiston, FluidSurrogate, QuasiSteadyAero};
use super::newmark::NewmarkIntegrator;
use super::{CouplingConfig, CouplingTrace, FsiError, NewmarkParams, NewmarkState, StructuralSystem};

/// Single-dof piston pushing against a pure added-mass fluid reaction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PistonParams {
    pub mass: f64,
    pub stiffness: f64,
    pub damping: f64,
    pub added_mass: f64,
    pub initial_displacement: f64,
    pub initial_velocity: f64,
}

impl Default for PistonParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            stiffness: 1.0,
            damping: 0.0,
            added_mass: 2.0,
            initial_displacement: 1.0,
            initial_velocity: 0.0,
        }
    }
}

/// Load on the cantilever chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChainLoad {
    None,
    Constant { force_per_node: f64 },
    Aero { u_inf: f64, rho: f64, chord: f64, lift_coeff: f64 },
}

/// Chain of lumped masses linked by springs, clamped at one end; a crude
/// stand-in for a cantilever under distributed wind load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChainParams {
    pub n_masses: usize,
    pub mass_per_node: f64,
    pub spring_stiffness: f64,
    /// Rayleigh damping C = alpha M + beta K.
    pub damping_alpha: f64,
    pub damping_beta: f64,
    pub load: ChainLoad,
}

impl Default for ChainParams {
    fn default() -> Self {
        Self {
            n_masses: 8,
            mass_per_node: 1.0,
            spring_stiffness: 100.0,
            damping_alpha: 2.0,
            damping_beta: 0.02,
            load: ChainLoad::Aero {
                u_inf: 11.4,
                rho: 1.2,
                chord: 1.0,
                lift_coeff: 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ProblemSpec {
    Piston(PistonParams),
    Chain(ChainParams),
}

/// Linear stiffness ramp-down at the start of a run: the stiffness starts
/// at `start_factor` times its nominal value and decreases linearly to the
/// nominal value over `steps` time steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessRamp {
    pub steps: usize,
    pub start_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsiRunConfig {
    pub newmark: NewmarkParams,
    pub coupling: CouplingConfig,
    pub t_end: f64,
    pub ramp: Option<StiffnessRamp>,
}

impl Default for FsiRunConfig {
    fn default() -> Self {
        Self {
            newmark: NewmarkParams::default(),
            coupling: CouplingConfig::default(),
            t_end: 1.0,
            ramp: None,
        }
    }
}

/// Time history of a coupled run; one entry per step after the initial
/// state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FsiHistory {
    pub times: Vec<f64>,
    pub displacements: Vec<DVector<f64>>,
    pub velocities: Vec<DVector<f64>>,
    pub accelerations: Vec<DVector<f64>>,
    pub interface_forces: Vec<DVector<f64>>,
}

impl FsiHistory {
    pub fn n_dof(&self) -> usize {
        self.displacements.first().map_or(0, DVector::len)
    }
}

/// Assembles the structural system, the initial state and the fluid
/// surrogate of a model problem.
pub fn build_problem(
    spec: &ProblemSpec,
) -> Result<(StructuralSystem, NewmarkState, Box<dyn FluidSurrogate>), FsiError> {
    match spec {
        ProblemSpec::Piston(p) => {
            let sys = StructuralSystem::sdof(p.mass, p.damping, p.stiffness)?;
            let state = NewmarkState {
                displacement: DVector::from_vec(vec![p.initial_displacement]),
                velocity: DVector::from_vec(vec![p.initial_velocity]),
                acceleration: DVector::zeros(1),
                time: 0.0,
            };
            Ok((
                sys,
                state,
                Box::new(AddedMassPiston {
                    added_mass: p.added_mass,
                }),
            ))
        }
        ProblemSpec::Chain(c) => {
            if c.n_masses == 0 {
                return Err(FsiError::BadRunConfig("chain needs at least one mass".into()));
            }
            let n = c.n_masses;
            let mass = DMatrix::from_diagonal(&DVector::from_element(n, c.mass_per_node));
            let k = c.spring_stiffness;
            let mut stiffness = DMatrix::zeros(n, n);
            for i in 0..n {
                // spring to the previous node (the wall for i = 0)
                stiffness[(i, i)] += k;
                if i + 1 < n {
                    stiffness[(i, i)] += k;
                    stiffness[(i, i + 1)] -= k;
                    stiffness[(i + 1, i)] -= k;
                }
            }
            let damping = &mass * c.damping_alpha + &stiffness * c.damping_beta;
            let sys = StructuralSystem::new(mass, damping, stiffness)?;
            let state = NewmarkState::at_rest(n);
            let fluid: Box<dyn FluidSurrogate> = match c.load {
                ChainLoad::None => Box::new(ConstantLoad {
                    force: DVector::zeros(n),
                }),
                ChainLoad::Constant { force_per_node } => Box::new(ConstantLoad {
                    force: DVector::from_element(n, force_per_node),
                }),
                ChainLoad::Aero {
                    u_inf,
                    rho,
                    chord,
                    lift_coeff,
                } => Box::new(QuasiSteadyAero {
                    u_inf,
                    rho,
                    chord,
                    lift_coeff,
                }),
            };
            Ok((sys, state, fluid))
        }
    }
}

struct ConstantLoad {
    force: DVector<f64>,
}

impl FluidSurrogate for ConstantLoad {
    fn force(
        &self,
        _d: &DVector<f64>,
        _v: &DVector<f64>,
        _a: &DVector<f64>,
        _t: f64,
    ) -> DVector<f64> {
        self.force.clone()
    }
}

/// Runs a model problem from rest (or its configured initial state) to
/// `t_end`, returning the time history and per-step coupling telemetry.
/// Non-convergent steps continue with the last inner iterate and are
/// flagged in the trace, never silently accepted.
pub fn run_fsi(
    spec: &ProblemSpec,
    cfg: &FsiRunConfig,
) -> Result<(FsiHistory, CouplingTrace), FsiError> {
    if !(cfg.t_end > 0.0) {
        return Err(FsiError::BadRunConfig(format!("t_end = {} must be > 0", cfg.t_end)));
    }
    cfg.newmark.validate()?;
    cfg.coupling.validate()?;
    if let Some(ramp) = &cfg.ramp {
        if !(ramp.start_factor >= 1.0) || !ramp.start_factor.is_finite() {
            return Err(FsiError::BadRunConfig(format!(
                "ramp start_factor = {} must be >= 1",
                ramp.start_factor
            )));
        }
    }

    let (sys, mut state, fluid) = build_problem(spec)?;
    let n_steps = (cfg.t_end / cfg.newmark.dt).ceil() as usize;
    let mut history = FsiHistory::default();
    let mut trace = CouplingTrace::default();

    let mut integrator = NewmarkIntegrator::new(&sys, cfg.newmark)?;
    let mut current_factor = 1.0;

    for step in 0..n_steps {
        let factor = match &cfg.ramp {
            Some(ramp) if ramp.steps > 0 && step < ramp.steps => {
                ramp.start_factor + (1.0 - ramp.start_factor) * step as f64 / ramp.steps as f64
            }
            _ => 1.0,
        };
        if factor != current_factor {
            integrator = NewmarkIntegrator::new(&sys.with_stiffness_scaled(factor), cfg.newmark)?;
            current_factor = factor;
        }

        let (next, step_trace) = coupled_step(&integrator, &state, fluid.as_ref(), &cfg.coupling)?;
        let force = fluid.force(
            &next.displacement,
            &next.velocity,
            &next.acceleration,
            next.time,
        );
        history.times.push(next.time);
        history.displacements.push(next.displacement.clone());
        history.velocities.push(next.velocity.clone());
        history.accelerations.push(next.acceleration.clone());
        history.interface_forces.push(force);
        trace.steps.push(step_trace);
        state = next;
    }
    Ok((history, trace))
}
