//! Separable space-time fields with known modal content.
//!
//! A generated set is exactly `sum_n alpha_n(t) * phi_n(x)` where the
//! spatial shapes are mutually orthogonal unit-norm lattice cosine modes.
//! When the coefficient vectors over the sampled times are also orthogonal,
//! the singular values of the snapshot matrix are the coefficient norms,
//! which makes these sets exact decomposition oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::field::{SnapshotSet, StructuredGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpatialShape {
    /// Product of per-axis cosine lattice modes; distinct wavenumber
    /// triples are orthogonal over the cell-center lattice.
    Fourier { wavenumbers: [usize; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TemporalCoeff {
    Constant(f64),
    Sinusoid {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// One value per generated time sample.
    Values(Vec<f64>),
}

impl TemporalCoeff {
    fn eval(&self, t: f64, index: usize) -> f64 {
        match self {
            TemporalCoeff::Constant(c) => *c,
            TemporalCoeff::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin(),
            TemporalCoeff::Values(v) => v[index],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub shape: SpatialShape,
    pub coeff: TemporalCoeff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableSpec {
    pub grid: StructuredGrid,
    pub terms: Vec<SeparableTerm>,
}

/// Unit-norm lattice cosine mode for one wavenumber triple.
fn shape_vector(grid: &StructuredGrid, k: [usize; 3]) -> Vec<f64> {
    let axis_norm_sq = |n: usize, kk: usize| -> f64 {
        if kk == 0 {
            n as f64
        } else {
            n as f64 / 2.0
        }
    };
    let norm = (axis_norm_sq(grid.nx, k[0])
        * axis_norm_sq(grid.ny, k[1])
        * axis_norm_sq(grid.nz, k[2]))
    .sqrt();
    let axis_factor = |idx: usize, n: usize, kk: usize| -> f64 {
        (PI * (idx as f64 + 0.5) * kk as f64 / n as f64).cos()
    };
    let mut out = Vec::with_capacity(grid.cell_count());
    for kz in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                out.push(
                    axis_factor(i, grid.nx, k[0])
                        * axis_factor(j, grid.ny, k[1])
                        * axis_factor(kz, grid.nz, k[2])
                        / norm,
                );
            }
        }
    }
    out
}

/// Generates the snapshot set together with the implied per-term singular
/// values (the Euclidean norms of the coefficient vectors over `times`).
pub fn generate_separable_field(
    spec: &SeparableSpec,
    times: &[f64],
) -> Result<(SnapshotSet, Vec<f64>), SynthError> {
    if spec.terms.is_empty() {
        return Err(SynthError::EmptySpec);
    }
    if times.is_empty() {
        return Err(SynthError::EmptyTimes);
    }
    spec.grid.validate()?;

    let mut wavenumbers = Vec::new();
    for (n, term) in spec.terms.iter().enumerate() {
        let SpatialShape::Fourier { wavenumbers: k } = term.shape;
        if k[0] >= spec.grid.nx || k[1] >= spec.grid.ny || k[2] >= spec.grid.nz {
            return Err(SynthError::NonOrthogonalShapes { a: n, b: n, k });
        }
        if let Some(prev) = wavenumbers.iter().position(|&w| w == k) {
            return Err(SynthError::NonOrthogonalShapes { a: prev, b: n, k });
        }
        wavenumbers.push(k);
        if let TemporalCoeff::Values(v) = &term.coeff {
            if v.len() != times.len() {
                return Err(SynthError::CoeffLengthMismatch {
                    term: n,
                    expected: times.len(),
                    got: v.len(),
                });
            }
        }
    }

    let shapes: Vec<Vec<f64>> = wavenumbers
        .iter()
        .map(|&k| shape_vector(&spec.grid, k))
        .collect();

    let cells = spec.grid.cell_count();
    let mut frames = Vec::with_capacity(times.len());
    let mut implied_sigma = vec![0.0; spec.terms.len()];
    for (s, &t) in times.iter().enumerate() {
        let mut frame = vec![0.0; cells];
        for (n, term) in spec.terms.iter().enumerate() {
            let alpha = term.coeff.eval(t, s);
            implied_sigma[n] += alpha * alpha;
            for (out, &phi) in frame.iter_mut().zip(&shapes[n]) {
                *out += alpha * phi;
            }
        }
        frames.push(frame);
    }
    for s in &mut implied_sigma {
        *s = s.sqrt();
    }

    let set = SnapshotSet::single_field("u", 1, spec.grid, times.to_vec(), frames)?;
    Ok((set, implied_sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> StructuredGrid {
        StructuredGrid::new(8, 4, 2, 0.1, 0.1, 0.1, [0.0; 3]).unwrap()
    }

    fn term(k: [usize; 3], coeff: TemporalCoeff) -> SeparableTerm {
        SeparableTerm {
            shape: SpatialShape::Fourier { wavenumbers: k },
            coeff,
        }
    }

    #[test]
    fn shapes_are_orthonormal_on_the_lattice() {
        let g = grid();
        let ks = [[0, 0, 0], [1, 0, 0], [3, 2, 1], [0, 1, 0]];
        let shapes: Vec<_> = ks.iter().map(|&k| shape_vector(&g, k)).collect();
        for (a, sa) in shapes.iter().enumerate() {
            for (b, sb) in shapes.iter().enumerate() {
                let dot: f64 = sa.iter().zip(sb).map(|(x, y)| x * y).sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() <= 1e-12, "({a},{b}) dot = {dot}");
            }
        }
    }

    #[test]
    fn constant_coefficient_gives_sqrt_s_norm() {
        let spec = SeparableSpec {
            grid: grid(),
            terms: vec![term([1, 0, 0], TemporalCoeff::Constant(1.0))],
        };
        let (set, sigma) = generate_separable_field(&spec, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(set.num_snapshots(), 3);
        assert!((sigma[0] - 3.0_f64.sqrt()).abs() <= 1e-15);
    }

    #[test]
    fn duplicate_wavenumbers_are_rejected() {
        let spec = SeparableSpec {
            grid: grid(),
            terms: vec![
                term([1, 0, 0], TemporalCoeff::Constant(1.0)),
                term([1, 0, 0], TemporalCoeff::Constant(2.0)),
            ],
        };
        assert!(matches!(
            generate_separable_field(&spec, &[0.0]),
            Err(SynthError::NonOrthogonalShapes { a: 0, b: 1, .. })
        ));
    }

    #[test]
    fn coefficient_value_lists_must_match_times() {
        let spec = SeparableSpec {
            grid: grid(),
            terms: vec![term([1, 0, 0], TemporalCoeff::Values(vec![1.0, 2.0]))],
        };
        assert!(matches!(
            generate_separable_field(&spec, &[0.0, 1.0, 2.0]),
            Err(SynthError::CoeffLengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_amplitude_term_contributes_nothing() {
        let one = SeparableSpec {
            grid: grid(),
            terms: vec![term([1, 0, 0], TemporalCoeff::Values(vec![2.0, -1.0]))],
        };
        let two = SeparableSpec {
            grid: grid(),
            terms: vec![
                term([1, 0, 0], TemporalCoeff::Values(vec![2.0, -1.0])),
                term([2, 0, 0], TemporalCoeff::Constant(0.0)),
            ],
        };
        let times = [0.0, 1.0];
        let (a, _) = generate_separable_field(&one, &times).unwrap();
        let (b, sigma_b) = generate_separable_field(&two, &times).unwrap();
        assert_eq!(a.frame(0, 0), b.frame(0, 0));
        assert_eq!(a.frame(1, 0), b.frame(1, 0));
        assert_eq!(sigma_b[1], 0.0);
    }
}
