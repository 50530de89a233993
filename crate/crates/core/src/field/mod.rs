//! Structured-grid snapshot data model.
//!
//! Fields live at cell centers of an axis-aligned grid and are stored flat,
//! row-major with the x index fastest:
//! `index = ((k*ny + j)*nx + i)*components + c`.

mod derive;
mod io;
mod sample;

pub use derive::{compute_gradient, compute_q_criterion, compute_spin_rate, compute_strain_rate};
pub use io::{load_snapshot_set, save_snapshot_set, Manifest};
pub use sample::{default_wake_planes, sample_plane};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("grid axes need at least one cell and positive spacing (nx={nx}, ny={ny}, nz={nz}, dx={dx}, dy={dy}, dz={dz})")]
    InvalidGrid {
        nx: usize,
        ny: usize,
        nz: usize,
        dx: f64,
        dy: f64,
        dz: f64,
    },
    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("field components must be 1 or 3, got {0}")]
    BadComponentCount(usize),
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
    #[error("snapshot times must be strictly increasing (t[{index}] = {value})")]
    NonMonotoneTimes { index: usize, value: f64 },
    #[error("snapshot {index} does not match the manifest grid or component count")]
    InconsistentSnapshot { index: usize },
    #[error("plane offset {offset} along {axis:?} lies outside the grid bounds [{min}, {max}]")]
    PlaneOutOfBounds {
        axis: Axis,
        offset: f64,
        min: f64,
        max: f64,
    },
    #[error("gradient needs a 3-component vector field, got {0} component(s)")]
    ScalarGradient(usize),
    #[error("axis {axis:?} has {cells} cell(s); differentiation needs at least 2")]
    DegenerateAxis { axis: Axis, cells: usize },
    #[error("expected a 9-component gradient tensor field, got {0} component(s)")]
    NotATensor(usize),
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("manifest not found at {0}")]
    MissingManifest(String),
    #[error("unsupported manifest version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid manifest: {0}")]
    BadManifest(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Grid axis, also used to name the normal direction of a sampling plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Axis-aligned structured grid; data samples sit at cell centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuredGrid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub origin: [f64; 3],
}

impl StructuredGrid {
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        dx: f64,
        dy: f64,
        dz: f64,
        origin: [f64; 3],
    ) -> Result<Self, FieldError> {
        let grid = Self {
            nx,
            ny,
            nz,
            dx,
            dy,
            dz,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let ok = self.nx >= 1
            && self.ny >= 1
            && self.nz >= 1
            && self.dx > 0.0
            && self.dy > 0.0
            && self.dz > 0.0
            && self.dx.is_finite()
            && self.dy.is_finite()
            && self.dz.is_finite()
            && self.origin.iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(FieldError::InvalidGrid {
                nx: self.nx,
                ny: self.ny,
                nz: self.nz,
                dx: self.dx,
                dy: self.dy,
                dz: self.dz,
            })
        }
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    /// Flat cell index with i (x) fastest.
    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ny + j) * self.nx + i
    }

    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.dx,
            self.origin[1] + (j as f64 + 0.5) * self.dy,
            self.origin[2] + (k as f64 + 0.5) * self.dz,
        ]
    }

    pub fn cells(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
            Axis::Z => self.nz,
        }
    }

    pub fn spacing(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
            Axis::Z => self.dz,
        }
    }

    /// Bounding box as (min corner, max corner).
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let max = [
            self.origin[0] + self.nx as f64 * self.dx,
            self.origin[1] + self.ny as f64 * self.dy,
            self.origin[2] + self.nz as f64 * self.dz,
        ];
        (self.origin, max)
    }
}

/// One time sample of a scalar or vector field on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub grid: StructuredGrid,
    pub components: usize,
    pub time: f64,
    pub data: Vec<f64>,
}

impl FieldSnapshot {
    pub fn new(
        grid: StructuredGrid,
        components: usize,
        time: f64,
        data: Vec<f64>,
    ) -> Result<Self, FieldError> {
        grid.validate()?;
        if components != 1 && components != 3 {
            return Err(FieldError::BadComponentCount(components));
        }
        let expected = grid.cell_count() * components;
        if data.len() != expected {
            return Err(FieldError::SizeMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self {
            grid,
            components,
            time,
            data,
        })
    }

    /// Tensor-valued snapshots (9 components) are produced internally by the
    /// derived-field operators and bypass the 1-or-3 component rule.
    pub(crate) fn new_tensor(grid: StructuredGrid, time: f64, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.cell_count() * 9);
        Self {
            grid,
            components: 9,
            time,
            data,
        }
    }

    pub fn value(&self, i: usize, j: usize, k: usize, c: usize) -> f64 {
        self.data[self.grid.cell_index(i, j, k) * self.components + c]
    }

    pub fn check_finite(&self) -> Result<(), FieldError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(FieldError::NonFinite { index }),
            None => Ok(()),
        }
    }
}

/// Axis-normal sampling plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    /// Normal direction of the plane.
    pub axis: Axis,
    /// Coordinate of the plane along its normal.
    pub offset: f64,
    pub label: String,
}

impl PlaneSpec {
    pub fn new(axis: Axis, offset: f64, label: impl Into<String>) -> Self {
        Self {
            axis,
            offset,
            label: label.into(),
        }
    }
}

/// Declared field of a snapshot set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub name: String,
    pub components: usize,
}

/// An ordered collection of snapshots sharing one grid and field layout.
///
/// `data[time_index][field_index]` holds the flat samples of one field at
/// one time; on disk every time step is one raw file with the fields
/// concatenated in manifest order.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    grid: StructuredGrid,
    fields: Vec<FieldInfo>,
    times: Vec<f64>,
    data: Vec<Vec<Vec<f64>>>,
}

impl SnapshotSet {
    pub fn new(
        grid: StructuredGrid,
        fields: Vec<FieldInfo>,
        times: Vec<f64>,
        data: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self, FieldError> {
        grid.validate()?;
        for f in &fields {
            if f.components != 1 && f.components != 3 {
                return Err(FieldError::BadComponentCount(f.components));
            }
        }
        for (i, w) in times.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(FieldError::NonMonotoneTimes {
                    index: i + 1,
                    value: w[1],
                });
            }
        }
        if data.len() != times.len() {
            return Err(FieldError::SizeMismatch {
                expected: times.len(),
                got: data.len(),
            });
        }
        for (s, frame) in data.iter().enumerate() {
            if frame.len() != fields.len() {
                return Err(FieldError::InconsistentSnapshot { index: s });
            }
            for (f, block) in frame.iter().enumerate() {
                let expected = grid.cell_count() * fields[f].components;
                if block.len() != expected {
                    return Err(FieldError::SizeMismatch {
                        expected,
                        got: block.len(),
                    });
                }
                if let Some(p) = block.iter().position(|v| !v.is_finite()) {
                    return Err(FieldError::NonFinite { index: p });
                }
            }
        }
        Ok(Self {
            grid,
            fields,
            times,
            data,
        })
    }

    /// Convenience constructor for the common single-field case.
    pub fn single_field(
        name: impl Into<String>,
        components: usize,
        grid: StructuredGrid,
        times: Vec<f64>,
        frames: Vec<Vec<f64>>,
    ) -> Result<Self, FieldError> {
        let fields = vec![FieldInfo {
            name: name.into(),
            components,
        }];
        let data = frames.into_iter().map(|f| vec![f]).collect();
        Self::new(grid, fields, times, data)
    }

    /// Builds a single-field set from snapshots that already share a grid.
    pub fn from_snapshots(
        name: impl Into<String>,
        snaps: Vec<FieldSnapshot>,
    ) -> Result<Self, FieldError> {
        let first = snaps.first().ok_or(FieldError::SizeMismatch {
            expected: 1,
            got: 0,
        })?;
        let grid = first.grid;
        let components = first.components;
        let mut times = Vec::with_capacity(snaps.len());
        let mut frames = Vec::with_capacity(snaps.len());
        for (i, s) in snaps.into_iter().enumerate() {
            if s.grid != grid || s.components != components {
                return Err(FieldError::InconsistentSnapshot { index: i });
            }
            times.push(s.time);
            frames.push(s.data);
        }
        Self::single_field(name, components, grid, times, frames)
    }

    pub fn grid(&self) -> &StructuredGrid {
        &self.grid
    }

    pub fn fields(&self) -> &[FieldInfo] {
        &self.fields
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_snapshots(&self) -> usize {
        self.times.len()
    }

    pub fn field_index(&self, name: &str) -> Result<usize, FieldError> {
        self.fields
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| FieldError::UnknownField(name.to_string()))
    }

    pub fn frame(&self, time_index: usize, field_index: usize) -> &[f64] {
        &self.data[time_index][field_index]
    }

    pub fn snapshot(&self, time_index: usize, field_index: usize) -> FieldSnapshot {
        FieldSnapshot {
            grid: self.grid,
            components: self.fields[field_index].components,
            time: self.times[time_index],
            data: self.data[time_index][field_index].clone(),
        }
    }

    /// Samples every snapshot of one field on a plane, producing a new set
    /// on the collapsed grid.
    pub fn sample_plane_set(
        &self,
        field: &str,
        plane: &PlaneSpec,
    ) -> Result<SnapshotSet, FieldError> {
        let fi = self.field_index(field)?;
        let mut sampled = Vec::with_capacity(self.num_snapshots());
        for s in 0..self.num_snapshots() {
            sampled.push(sample_plane(&self.snapshot(s, fi), plane)?);
        }
        SnapshotSet::from_snapshots(field.to_string(), sampled)
    }
}
