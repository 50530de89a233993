//! Analytic field generators with known structure.
//!
//! Everything here has a closed form, so the fields double as ground-truth
//! oracles for the decomposition and derived-field operators: affine fields
//! for gradient exactness, separable sums of orthogonal shapes for known
//! singular values, and a parametric rotor-wake model whose terms are each
//! interpretable and individually switchable.

mod separable;
mod wake;

pub use separable::{
    generate_separable_field, SeparableSpec, SeparableTerm, SpatialShape, TemporalCoeff,
};
pub use wake::{generate_wake_snapshot, wake_velocity, WakeModelParams};

use crate::field::{FieldSnapshot, StructuredGrid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("parameter {field} must be non-negative, got {value}")]
    NegativeAmplitude { field: &'static str, value: f64 },
    #[error("parameter {field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("grid does not contain the rotor (hub height {hub} outside z range [{zmin}, {zmax}] or no x >= 0 wake region)")]
    GridMissesRotor { hub: f64, zmin: f64, zmax: f64 },
    #[error("separable spec needs at least one term")]
    EmptySpec,
    #[error("separable spec needs at least one time sample")]
    EmptyTimes,
    #[error("spatial shapes must be pairwise orthogonal: terms {a} and {b} share wavenumbers {k:?}")]
    NonOrthogonalShapes { a: usize, b: usize, k: [usize; 3] },
    #[error("temporal coefficient list of term {term} has {got} values for {expected} times")]
    CoeffLengthMismatch {
        term: usize,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// Exact affine velocity field u(x) = G x + c sampled at cell centers.
pub fn generate_affine_field(
    gradient: [[f64; 3]; 3],
    constant: [f64; 3],
    grid: &StructuredGrid,
) -> FieldSnapshot {
    let mut data = Vec::with_capacity(grid.cell_count() * 3);
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let p = grid.cell_center(i, j, k);
                for row in 0..3 {
                    data.push(
                        gradient[row][0] * p[0]
                            + gradient[row][1] * p[1]
                            + gradient[row][2] * p[2]
                            + constant[row],
                    );
                }
            }
        }
    }
    FieldSnapshot::new(*grid, 3, 0.0, data).expect("affine field matches its grid by construction")
}
