//! Fluid surrogates, Aitken relaxation and the implicit inner loop.

use nalgebra::DVector;

use super::newmark::NewmarkIntegrator;
use super::{CouplingConfig, FsiError, NewmarkState, StepTrace};

/// Interface force model standing in for the fluid solver. Implementations
/// must be deterministic and produce finite output for finite input.
pub trait FluidSurrogate {
    /// Interface force for the candidate end-of-step kinematics.
    fn force(
        &self,
        displacement: &DVector<f64>,
        velocity: &DVector<f64>,
        acceleration: &DVector<f64>,
        time: f64,
    ) -> DVector<f64>;
}

/// Pure added-mass reaction: force = -m_a * acceleration. The ratio of
/// `added_mass` to the structural mass controls how strongly coupled (and
/// how hard to converge without relaxation) the exchange is.
#[derive(Debug, Clone, Copy)]
pub struct AddedMassPiston {
    pub added_mass: f64,
}

impl FluidSurrogate for AddedMassPiston {
    fn force(
        &self,
        _d: &DVector<f64>,
        _v: &DVector<f64>,
        a: &DVector<f64>,
        _t: f64,
    ) -> DVector<f64> {
        a * (-self.added_mass)
    }
}

/// Quasi-steady aerodynamic load per node: f = rho/2 * c * C_l * V |V| with
/// relative velocity V = u_inf - v_node. The sign convention keeps the
/// force aligned with the relative wind.
#[derive(Debug, Clone, Copy)]
pub struct QuasiSteadyAero {
    pub u_inf: f64,
    /// Air density [kg/m^3].
    pub rho: f64,
    /// Reference chord length [m].
    pub chord: f64,
    pub lift_coeff: f64,
}

impl Default for QuasiSteadyAero {
    fn default() -> Self {
        Self {
            u_inf: 11.4,
            rho: 1.2,
            chord: 1.0,
            lift_coeff: 1.0,
        }
    }
}

impl FluidSurrogate for QuasiSteadyAero {
    fn force(
        &self,
        _d: &DVector<f64>,
        v: &DVector<f64>,
        _a: &DVector<f64>,
        _t: f64,
    ) -> DVector<f64> {
        DVector::from_fn(v.len(), |i, _| {
            let v_rel = self.u_inf - v[i];
            0.5 * self.rho * self.chord * self.lift_coeff * v_rel * v_rel.abs()
        })
    }
}

/// Dynamic relaxation factor from two successive interface residuals:
/// omega_new = -omega * <r_prev, r_curr - r_prev> / |r_curr - r_prev|^2,
/// clamped to the configured bounds. A vanishing residual difference
/// returns `omega` unchanged (stagnation guard).
pub fn aitken_update(
    omega: f64,
    r_prev: &DVector<f64>,
    r_curr: &DVector<f64>,
    cfg: &CouplingConfig,
) -> f64 {
    let diff = r_curr - r_prev;
    let denom = diff.norm_squared();
    if denom == 0.0 {
        return omega;
    }
    let raw = -omega * r_prev.dot(&diff) / denom;
    raw.clamp(cfg.omega_min, cfg.omega_max)
}

/// Euclidean norm of the interface displacement mismatch.
pub fn interface_residual(
    d_solid: &DVector<f64>,
    d_fluid: &DVector<f64>,
) -> Result<f64, FsiError> {
    if d_solid.len() != d_fluid.len() {
        return Err(FsiError::InterfaceLength {
            a: d_solid.len(),
            b: d_fluid.len(),
        });
    }
    Ok((d_solid - d_fluid).norm())
}

/// Euclidean norm of the interface force mismatch.
pub fn force_imbalance(f_solid: &DVector<f64>, f_fluid: &DVector<f64>) -> Result<f64, FsiError> {
    interface_residual(f_solid, f_fluid)
}

/// Advances one coupled time step with the implicit partitioned loop.
///
/// Starting from the previous converged displacement, each inner iteration
/// (1) derives candidate interface kinematics from the predicted
/// displacement via the Newmark relations, (2) queries the fluid surrogate
/// for the matching interface force, (3) solves the structure, and
/// (4) measures the residual between solved and predicted displacement.
/// The prediction is then relaxed (Aitken or fixed omega0) and the loop
/// repeats until the residual norm falls below `cfg.tol`. On `max_inner`
/// exhaustion the last solved state is returned flagged unconverged.
pub fn coupled_step(
    integrator: &NewmarkIntegrator,
    state: &NewmarkState,
    fluid: &dyn FluidSurrogate,
    cfg: &CouplingConfig,
) -> Result<(NewmarkState, StepTrace), FsiError> {
    cfg.validate()?;
    let t_new = state.time + integrator.params().dt;
    let mut d_pred = state.displacement.clone();
    let mut omega = cfg.omega0;
    let mut residuals = Vec::new();
    let mut omegas = Vec::new();
    let mut r_prev: Option<DVector<f64>> = None;
    let mut last_trial: Option<NewmarkState> = None;

    for iteration in 0..cfg.max_inner {
        let (v_pred, a_pred) = integrator.kinematics_from_displacement(state, &d_pred);
        let force = fluid.force(&d_pred, &v_pred, &a_pred, t_new);
        if force.iter().any(|v| !v.is_finite()) {
            return Err(FsiError::NonFinite { iteration });
        }
        let trial = integrator.step(state, &force)?;
        if !trial.is_finite() {
            return Err(FsiError::NonFinite { iteration });
        }
        let r = &trial.displacement - &d_pred;
        let r_norm = r.norm();
        if !r_norm.is_finite() {
            return Err(FsiError::NonFinite { iteration });
        }
        residuals.push(r_norm);

        if r_norm <= cfg.tol {
            omegas.push(omega);
            let trace = StepTrace {
                time: t_new,
                inner_iters: iteration + 1,
                residuals,
                omegas,
                converged: true,
            };
            return Ok((trial, trace));
        }

        if cfg.aitken_enabled {
            if let Some(prev) = &r_prev {
                omega = aitken_update(omega, prev, &r, cfg);
            }
        }
        omegas.push(omega);
        d_pred += &r * omega;
        r_prev = Some(r);
        last_trial = Some(trial);
    }

    let trial = last_trial.expect("max_inner >= 1 guarantees at least one iteration");
    let trace = StepTrace {
        time: t_new,
        inner_iters: residuals.len(),
        residuals,
        omegas,
        converged: false,
    };
    Ok((trial, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsi::{NewmarkParams, StructuralSystem};

    fn scalar(v: f64) -> DVector<f64> {
        DVector::from_vec(vec![v])
    }

    #[test]
    fn aitken_matches_hand_arithmetic_and_clamps() {
        let cfg = CouplingConfig::default(); // omega_max = 1.0
        // raw value: -1 * (1 * (0.5 - 1)) / 0.25 = 2.0 -> clamped to 1.0
        let w = aitken_update(1.0, &scalar(1.0), &scalar(0.5), &cfg);
        assert_eq!(w, 1.0);
        let wide = CouplingConfig {
            omega_max: 2.0,
            ..cfg
        };
        let w = aitken_update(1.0, &scalar(1.0), &scalar(0.5), &wide);
        assert_eq!(w, 2.0);
    }

    #[test]
    fn aitken_fixed_point_returns_omega() {
        let cfg = CouplingConfig {
            omega_max: 2.0,
            ..CouplingConfig::default()
        };
        // r_curr = 0: raw = -w <r, -r> / |r|^2 = w
        let w = aitken_update(0.7, &scalar(2.0), &scalar(0.0), &cfg);
        assert_eq!(w, 0.7);
        // identical residuals: stagnation guard
        let w = aitken_update(0.7, &scalar(2.0), &scalar(2.0), &cfg);
        assert_eq!(w, 0.7);
    }

    #[test]
    fn residual_norms_are_euclidean() {
        assert_eq!(
            interface_residual(&scalar(1.0), &scalar(1.0)).unwrap(),
            0.0
        );
        let a = DVector::from_vec(vec![1.0, 0.0]);
        let b = DVector::from_vec(vec![0.0, 1.0]);
        assert!((interface_residual(&a, &b).unwrap() - 2.0_f64.sqrt()).abs() <= 1e-15);
        assert!(force_imbalance(&a, &scalar(0.0)).is_err());
    }

    #[test]
    fn decoupled_piston_converges_immediately_and_matches_newmark() {
        let sys = StructuralSystem::sdof(1.0, 0.0, 1.0).unwrap();
        let p = NewmarkParams {
            dt: 0.05,
            ..Default::default()
        };
        let integrator = NewmarkIntegrator::new(&sys, p).unwrap();
        let fluid = AddedMassPiston { added_mass: 0.0 };
        let cfg = CouplingConfig {
            omega0: 1.0,
            ..CouplingConfig::default()
        };
        let mut coupled = NewmarkState {
            displacement: scalar(1.0),
            ..NewmarkState::at_rest(1)
        };
        let mut plain = coupled.clone();
        let zero = DVector::zeros(1);
        for _ in 0..40 {
            let (next, trace) = coupled_step(&integrator, &coupled, &fluid, &cfg).unwrap();
            assert!(trace.converged);
            assert!(trace.inner_iters <= 2, "inner iters {}", trace.inner_iters);
            // converged steps end with the interface residual below tol
            assert!(*trace.residuals.last().unwrap() <= cfg.tol);
            coupled = next;
            plain = integrator.step(&plain, &zero).unwrap();
            assert!((coupled.displacement[0] - plain.displacement[0]).abs() <= 1e-12);
        }
    }

    #[test]
    fn aitken_solves_a_divergent_linear_scalar_map() {
        // g(x) = -2x + 3 has fixed point x* = 1; plain iteration diverges
        let g = |x: f64| -2.0 * x + 3.0;
        let solve = |cfg: &CouplingConfig| -> (usize, f64, f64) {
            let mut x = 0.0;
            let mut omega = cfg.omega0;
            let mut r_prev: Option<DVector<f64>> = None;
            for k in 0..16 {
                let r = scalar(g(x) - x);
                if r[0].abs() <= 1e-12 {
                    return (k + 1, x, r[0].abs());
                }
                if cfg.aitken_enabled {
                    if let Some(prev) = &r_prev {
                        omega = aitken_update(omega, prev, &r, cfg);
                    }
                }
                x += omega * r[0];
                r_prev = Some(r);
            }
            (16, x, (g(x) - x).abs())
        };

        let aitken = CouplingConfig {
            omega_max: 2.0,
            ..CouplingConfig::default()
        };
        let (iters, x, _) = solve(&aitken);
        assert!(iters <= 4, "took {iters} iterations");
        assert!((x - 1.0).abs() <= 1e-11);

        let fixed = CouplingConfig {
            omega0: 1.0,
            omega_max: 1.0,
            aitken_enabled: false,
            ..CouplingConfig::default()
        };
        let (_, _, final_residual) = solve(&fixed);
        assert!(final_residual > 1.0, "fixed omega should diverge");
    }

    #[test]
    fn nan_from_the_surrogate_is_reported_with_its_iteration() {
        struct Broken;
        impl FluidSurrogate for Broken {
            fn force(
                &self,
                _d: &DVector<f64>,
                _v: &DVector<f64>,
                _a: &DVector<f64>,
                _t: f64,
            ) -> DVector<f64> {
                scalar(f64::NAN)
            }
        }
        let sys = StructuralSystem::sdof(1.0, 0.0, 1.0).unwrap();
        let integrator = NewmarkIntegrator::new(&sys, NewmarkParams::default()).unwrap();
        let err = coupled_step(
            &integrator,
            &NewmarkState::at_rest(1),
            &Broken,
            &CouplingConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, FsiError::NonFinite { iteration: 0 }));
    }
}
