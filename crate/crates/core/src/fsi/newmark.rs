//! Newmark time integration for linear structural systems.

use nalgebra::DVector;

use super::{FsiError, NewmarkParams, NewmarkState, StructuralSystem};

/// Newmark stepper with a cached factorization of the effective matrix
/// M + gamma dt C + beta dt^2 K. Rebuild it whenever the system or the
/// parameters change.
pub struct NewmarkIntegrator {
    system: StructuralSystem,
    params: NewmarkParams,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl NewmarkIntegrator {
    pub fn new(system: &StructuralSystem, params: NewmarkParams) -> Result<Self, FsiError> {
        params.validate()?;
        let dt = params.dt;
        let effective = system.mass()
            + system.damping() * (params.gamma * dt)
            + system.stiffness() * (params.beta * dt * dt);
        let lu = effective.lu();
        if !lu_is_nonsingular(&lu) {
            return Err(FsiError::SingularEffectiveMatrix);
        }
        Ok(Self {
            system: system.clone(),
            params,
            lu,
        })
    }

    pub fn params(&self) -> &NewmarkParams {
        &self.params
    }

    pub fn system(&self) -> &StructuralSystem {
        &self.system
    }

    pub fn n_dof(&self) -> usize {
        self.system.n_dof()
    }

    /// Displacement and velocity predictors (the force-independent parts of
    /// the Newmark update).
    fn predictors(&self, s: &NewmarkState) -> (DVector<f64>, DVector<f64>) {
        let dt = self.params.dt;
        let d_star = &s.displacement
            + &s.velocity * dt
            + &s.acceleration * ((0.5 - self.params.beta) * dt * dt);
        let v_star = &s.velocity + &s.acceleration * ((1.0 - self.params.gamma) * dt);
        (d_star, v_star)
    }

    /// Advances the state by one step under the given external force
    /// (evaluated at the end of the step).
    pub fn step(&self, s: &NewmarkState, force: &DVector<f64>) -> Result<NewmarkState, FsiError> {
        let n = self.system.n_dof();
        if force.len() != n {
            return Err(FsiError::ForceLength {
                expected: n,
                got: force.len(),
            });
        }
        let dt = self.params.dt;
        let (d_star, v_star) = self.predictors(s);
        let rhs = force - self.system.damping() * &v_star - self.system.stiffness() * &d_star;
        let a_new = self
            .lu
            .solve(&rhs)
            .ok_or(FsiError::SingularEffectiveMatrix)?;
        let v_new = &v_star + &a_new * (self.params.gamma * dt);
        let d_new = &d_star + &a_new * (self.params.beta * dt * dt);
        Ok(NewmarkState {
            displacement: d_new,
            velocity: v_new,
            acceleration: a_new,
            time: s.time + dt,
        })
    }

    /// Inverts the Newmark kinematic relations: given a candidate
    /// end-of-step displacement, returns the consistent velocity and
    /// acceleration. Requires beta > 0.
    pub fn kinematics_from_displacement(
        &self,
        s: &NewmarkState,
        d_new: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>) {
        let dt = self.params.dt;
        let (d_star, v_star) = self.predictors(s);
        let a_new = (d_new - d_star) / (self.params.beta * dt * dt);
        let v_new = v_star + &a_new * (self.params.gamma * dt);
        (v_new, a_new)
    }
}

fn lu_is_nonsingular(lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> bool {
    let u = lu.u();
    let n = u.nrows().min(u.ncols());
    let mut max_piv = 0.0_f64;
    let mut min_piv = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].abs();
        max_piv = max_piv.max(p);
        min_piv = min_piv.min(p);
    }
    min_piv > 0.0 && min_piv.is_finite() && min_piv > 1e-14 * max_piv
}

/// One-shot Newmark step; builds (and discards) the factorization. Use
/// [`NewmarkIntegrator`] directly when stepping repeatedly.
pub fn newmark_step(
    system: &StructuralSystem,
    state: &NewmarkState,
    params: NewmarkParams,
    force: &DVector<f64>,
) -> Result<NewmarkState, FsiError> {
    NewmarkIntegrator::new(system, params)?.step(state, force)
}

/// Discrete mechanical energy v^T M v / 2 + d^T K d / 2.
pub fn discrete_energy(system: &StructuralSystem, state: &NewmarkState) -> f64 {
    let kinetic = 0.5 * state.velocity.dot(&(system.mass() * &state.velocity));
    let elastic = 0.5 * state.displacement.dot(&(system.stiffness() * &state.displacement));
    kinetic + elastic
}
