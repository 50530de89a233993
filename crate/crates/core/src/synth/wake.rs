//! Parametric rotor-wake generator.
//!
//! The field is a transparent sum of interpretable terms on top of a
//! uniform inflow: a Gaussian axial momentum deficit whose center meanders
//! laterally as it convects downstream, a helical tip-vortex perturbation
//! rotating at blade-passing frequency, and a tower-wake strip below hub
//! height whose lateral oscillation follows a Strouhal shedding frequency.
//! Every term scales linearly with its amplitude and is deterministic in
//! (parameters, position, time), so decomposition results on generated data
//! can be checked against closed forms.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::field::{FieldSnapshot, StructuredGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WakeModelParams {
    /// Free-stream wind speed [m/s].
    pub u_inf: f64,
    /// Rotor speed [rpm]; the tip perturbation rotates at three times this
    /// rate (blade passing of a three-bladed rotor).
    pub rotor_rpm: f64,
    /// Rotor diameter D [m].
    pub rotor_diameter: f64,
    /// Hub height above the domain floor [m].
    pub hub_height: f64,
    /// Peak axial deficit as a fraction of `u_inf`.
    pub deficit_amplitude: f64,
    /// Growth of the deficit radius per meter downstream.
    pub deficit_radius_growth: f64,
    /// Tip-vortex velocity perturbation amplitude [m/s].
    pub tip_vortex_amplitude: f64,
    /// Tower-wake velocity deficit amplitude [m/s].
    pub tower_wake_amplitude: f64,
    /// Strouhal number of the tower shedding.
    pub tower_strouhal: f64,
    /// Tower diameter [m], sets the shedding frequency scale.
    pub tower_diameter: f64,
    /// Lateral wake-meander excursion per diameter downstream [m].
    pub meander_amplitude: f64,
    /// Strouhal number of the wake meander (frequency u_inf/D scale).
    pub meander_strouhal: f64,
    /// Seed for the phase jitter of the unsteady terms.
    pub seed: u64,
}

impl Default for WakeModelParams {
    fn default() -> Self {
        Self {
            u_inf: 11.4,
            rotor_rpm: 12.1,
            rotor_diameter: 126.0,
            hub_height: 90.0,
            deficit_amplitude: 0.45,
            deficit_radius_growth: 0.1,
            tip_vortex_amplitude: 1.5,
            tower_wake_amplitude: 2.0,
            tower_strouhal: 0.2,
            tower_diameter: 6.0,
            meander_amplitude: 5.0,
            meander_strouhal: 0.25,
            seed: 0,
        }
    }
}

impl WakeModelParams {
    pub fn validate(&self) -> Result<(), SynthError> {
        let positive: [(&'static str, f64); 4] = [
            ("u_inf", self.u_inf),
            ("rotor_diameter", self.rotor_diameter),
            ("hub_height", self.hub_height),
            ("tower_diameter", self.tower_diameter),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(SynthError::NonPositive { field, value });
            }
        }
        let non_negative: [(&'static str, f64); 8] = [
            ("rotor_rpm", self.rotor_rpm),
            ("deficit_amplitude", self.deficit_amplitude),
            ("deficit_radius_growth", self.deficit_radius_growth),
            ("tip_vortex_amplitude", self.tip_vortex_amplitude),
            ("tower_wake_amplitude", self.tower_wake_amplitude),
            ("tower_strouhal", self.tower_strouhal),
            ("meander_amplitude", self.meander_amplitude),
            ("meander_strouhal", self.meander_strouhal),
        ];
        for (field, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(SynthError::NegativeAmplitude { field, value });
            }
        }
        Ok(())
    }
}

struct Phases {
    tip: f64,
    tower: f64,
    meander: f64,
}

fn phases_from_seed(seed: u64) -> Phases {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Phases {
        tip: rng.gen::<f64>() * 2.0 * PI,
        tower: rng.gen::<f64>() * 2.0 * PI,
        meander: rng.gen::<f64>() * 2.0 * PI,
    }
}

fn velocity_at(p: &WakeModelParams, ph: &Phases, point: [f64; 3], t: f64) -> [f64; 3] {
    let [x, y, z] = point;
    let mut u = p.u_inf;
    let mut v = 0.0;
    let mut w = 0.0;
    if x < 0.0 {
        return [u, v, w];
    }

    let d = p.rotor_diameter;
    let xd = x / d;
    let dz = z - p.hub_height;
    // retarded time: perturbations convect downstream with the free stream
    let tau = t - x / p.u_inf;

    // meandering Gaussian deficit
    let f_meander = p.meander_strouhal * p.u_inf / d;
    let y_center = p.meander_amplitude * xd * (2.0 * PI * f_meander * tau + ph.meander).sin();
    let radius = 0.5 * d + p.deficit_radius_growth * x;
    let r_m2 = (y - y_center).powi(2) + dz * dz;
    u -= p.deficit_amplitude * p.u_inf * (-r_m2 / (radius * radius)).exp();

    // helical tip-vortex perturbation on the blade-tip annulus
    let r = (y * y + dz * dz).sqrt();
    let theta = dz.atan2(y);
    let omega = p.rotor_rpm * 2.0 * PI / 60.0;
    let tip_width = 0.075 * d;
    let annulus = (-((r - 0.5 * d) / tip_width).powi(2)).exp();
    let tip_phase = 3.0 * (theta - omega * tau) + ph.tip;
    u += p.tip_vortex_amplitude * annulus * tip_phase.cos();
    v += p.tip_vortex_amplitude * annulus * (-theta.sin()) * tip_phase.sin();
    w += p.tip_vortex_amplitude * annulus * theta.cos() * tip_phase.sin();

    // tower-wake strip below hub height, oscillating laterally
    if z < p.hub_height {
        let taper = ((p.hub_height - z) / 10.0).min(1.0);
        let f_tower = p.tower_strouhal * p.u_inf / p.tower_diameter;
        let excursion = p.tower_diameter * (0.5 + 0.5 * xd);
        let sway_phase = 2.0 * PI * f_tower * tau + ph.tower;
        let y_t = excursion * sway_phase.sin();
        let strip_width = 1.5 * p.tower_diameter;
        let strip = (-((y - y_t) / strip_width).powi(2)).exp();
        u -= p.tower_wake_amplitude * taper * strip;
        v += 0.5 * p.tower_wake_amplitude * taper * strip * sway_phase.cos();
    }

    [u, v, w]
}

/// Wind velocity of the wake model at a single point, for probes and
/// oracles. Deterministic in (params, point, t).
pub fn wake_velocity(params: &WakeModelParams, point: [f64; 3], t: f64) -> [f64; 3] {
    let ph = phases_from_seed(params.seed);
    velocity_at(params, &ph, point, t)
}

/// Evaluates the wake model on every cell center of `grid` at time `t`.
///
/// The grid must span the rotor: its z range has to contain the hub height
/// and it has to reach into the x >= 0 wake region.
pub fn generate_wake_snapshot(
    params: &WakeModelParams,
    grid: &StructuredGrid,
    t: f64,
) -> Result<FieldSnapshot, SynthError> {
    params.validate()?;
    grid.validate()?;
    let (lo, hi) = grid.bounds();
    if !(lo[2] <= params.hub_height && params.hub_height <= hi[2] && hi[0] >= 0.0) {
        return Err(SynthError::GridMissesRotor {
            hub: params.hub_height,
            zmin: lo[2],
            zmax: hi[2],
        });
    }

    let ph = phases_from_seed(params.seed);
    let mut data = Vec::with_capacity(grid.cell_count() * 3);
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let vel = velocity_at(params, &ph, grid.cell_center(i, j, k), t);
                data.extend(vel);
            }
        }
    }
    Ok(FieldSnapshot::new(*grid, 3, t, data)?)
}
