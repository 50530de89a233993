//! Radial-basis-function mesh morphing.
//!
//! Control points on a moving boundary carry known displacements; an RBF
//! interpolant with linear polynomial augmentation propagates them to every
//! node of the volume mesh. Thin-plate (2D) and cubic (3D) kernels are
//! parameter-free and reproduce affine displacement fields exactly, which
//! the validity tests exploit.

mod validity;

pub use validity::{check_mesh_validity, ValidityReport};

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorphError {
    #[error("control point {index} has a non-finite coordinate or displacement")]
    BadPoint { index: usize },
    #[error("control point {index} has {got} coordinates, expected {expected}")]
    WrongDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("control points {a} and {b} share the same position")]
    DuplicatePositions { a: usize, b: usize },
    #[error("need at least {needed} control points for dimension {dim}, got {got}")]
    TooFewPoints { needed: usize, dim: usize, got: usize },
    #[error("control points are affinely degenerate (interpolation system is singular)")]
    DegenerateSystem,
    #[error("evaluation point has {got} coordinates, expected {expected}")]
    EvalDimension { expected: usize, got: usize },
    #[error("node grids have different shapes or dimensions")]
    GridShapeMismatch,
    #[error("grid dimension must be 2 or 3, got {0}")]
    BadGridDimension(usize),
    #[error("cannot parse control point file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Boundary point with a prescribed displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPoint {
    pub position: Vec<f64>,
    pub displacement: Vec<f64>,
}

impl ControlPoint {
    pub fn new(position: Vec<f64>, displacement: Vec<f64>) -> Self {
        Self {
            position,
            displacement,
        }
    }
}

/// Kernel choice fixes the spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfKernel {
    /// Thin-plate spline r^2 ln r (2D).
    ThinPlate2d,
    /// Cubic r^3 (3D).
    Cubic3d,
}

impl RbfKernel {
    pub fn dim(self) -> usize {
        match self {
            RbfKernel::ThinPlate2d => 2,
            RbfKernel::Cubic3d => 3,
        }
    }

    fn phi(self, r: f64) -> f64 {
        match self {
            RbfKernel::ThinPlate2d => {
                if r == 0.0 {
                    0.0
                } else {
                    r * r * r.ln()
                }
            }
            RbfKernel::Cubic3d => r * r * r,
        }
    }
}

/// Interpolant mapping positions to displacement vectors: kernel weights on
/// the control centers plus an affine polynomial per component.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfInterpolant {
    kernel: RbfKernel,
    /// n x dim control positions.
    centers: DMatrix<f64>,
    /// n x dim kernel weights (one column per displacement component).
    weights: DMatrix<f64>,
    /// (dim+1) x dim affine coefficients: row 0 constant, rows 1..=dim the
    /// linear part.
    affine: DMatrix<f64>,
}

const REPRODUCTION_TOL: f64 = 1e-10;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Solves the augmented interpolation system for the given control points.
///
/// The dense symmetric system is factorized by LU with partial pivoting.
/// Build fails on duplicate positions, affinely degenerate point sets, or
/// whenever the solved interpolant does not reproduce its own control
/// displacements to 1e-10.
pub fn build_rbf(points: &[ControlPoint], kernel: RbfKernel) -> Result<RbfInterpolant, MorphError> {
    let dim = kernel.dim();
    let n = points.len();
    if n < dim + 1 {
        return Err(MorphError::TooFewPoints {
            needed: dim + 1,
            dim,
            got: n,
        });
    }
    for (i, p) in points.iter().enumerate() {
        if p.position.len() != dim || p.displacement.len() != dim {
            return Err(MorphError::WrongDimension {
                index: i,
                expected: dim,
                got: p.position.len(),
            });
        }
        if p.position.iter().chain(&p.displacement).any(|v| !v.is_finite()) {
            return Err(MorphError::BadPoint { index: i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if distance(&points[i].position, &points[j].position) == 0.0 {
                return Err(MorphError::DuplicatePositions { a: i, b: j });
            }
        }
    }

    let size = n + dim + 1;
    let mut a = DMatrix::zeros(size, size);
    for i in 0..n {
        for j in i..n {
            let v = kernel.phi(distance(&points[i].position, &points[j].position));
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a[(i, n)] = 1.0;
        a[(n, i)] = 1.0;
        for d in 0..dim {
            a[(i, n + 1 + d)] = points[i].position[d];
            a[(n + 1 + d, i)] = points[i].position[d];
        }
    }

    let mut rhs = DMatrix::zeros(size, dim);
    for (i, p) in points.iter().enumerate() {
        for d in 0..dim {
            rhs[(i, d)] = p.displacement[d];
        }
    }

    let lu = a.lu();
    let solution = lu.solve(&rhs).ok_or(MorphError::DegenerateSystem)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(MorphError::DegenerateSystem);
    }

    let mut centers = DMatrix::zeros(n, dim);
    for (i, p) in points.iter().enumerate() {
        for d in 0..dim {
            centers[(i, d)] = p.position[d];
        }
    }
    let interpolant = RbfInterpolant {
        kernel,
        centers,
        weights: solution.rows(0, n).into(),
        affine: solution.rows(n, dim + 1).into(),
    };

    // exactness at the control points doubles as the singularity guard:
    // near-degenerate sets solve to garbage that fails reproduction
    let scale = points
        .iter()
        .flat_map(|p| p.displacement.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for p in points {
        let d = interpolant.evaluate_displacement(&p.position)?;
        for c in 0..dim {
            if (d[c] - p.displacement[c]).abs() > REPRODUCTION_TOL * scale {
                return Err(MorphError::DegenerateSystem);
            }
        }
    }
    Ok(interpolant)
}

impl RbfInterpolant {
    pub fn kernel(&self) -> RbfKernel {
        self.kernel
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim()
    }

    pub fn n_centers(&self) -> usize {
        self.centers.nrows()
    }

    /// Sum of the weight column for one component; zero by the side
    /// conditions of the augmented system.
    pub fn weight_sum(&self, component: usize) -> f64 {
        self.weights.column(component).sum()
    }

    /// First moment of the weights against coordinate `axis`; zero by the
    /// side conditions.
    pub fn weight_moment(&self, component: usize, axis: usize) -> f64 {
        (0..self.n_centers())
            .map(|i| self.weights[(i, component)] * self.centers[(i, axis)])
            .sum()
    }

    /// Displacement at an arbitrary point.
    pub fn evaluate_displacement(&self, point: &[f64]) -> Result<Vec<f64>, MorphError> {
        let dim = self.dim();
        if point.len() != dim {
            return Err(MorphError::EvalDimension {
                expected: dim,
                got: point.len(),
            });
        }
        let mut out = vec![0.0; dim];
        for i in 0..self.n_centers() {
            let mut r2 = 0.0;
            for d in 0..dim {
                let diff = point[d] - self.centers[(i, d)];
                r2 += diff * diff;
            }
            let phi = self.kernel.phi(r2.sqrt());
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.weights[(i, c)] * phi;
            }
        }
        for (c, o) in out.iter_mut().enumerate() {
            *o += self.affine[(0, c)];
            for d in 0..dim {
                *o += self.affine[(1 + d, c)] * point[d];
            }
        }
        Ok(out)
    }
}

/// Structured lattice of mesh nodes (2D or 3D); flat storage with the
/// first index fastest, `dim` coordinates per node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGrid {
    pub dim: usize,
    /// Node counts per direction; `shape[2] == 1` for 2D grids.
    pub shape: [usize; 3],
    pub coords: Vec<f64>,
}

impl NodeGrid {
    pub fn uniform_2d(n0: usize, n1: usize, spacing: [f64; 2], origin: [f64; 2]) -> Self {
        let mut coords = Vec::with_capacity(n0 * n1 * 2);
        for j in 0..n1 {
            for i in 0..n0 {
                coords.push(origin[0] + i as f64 * spacing[0]);
                coords.push(origin[1] + j as f64 * spacing[1]);
            }
        }
        Self {
            dim: 2,
            shape: [n0, n1, 1],
            coords,
        }
    }

    pub fn uniform_3d(n: [usize; 3], spacing: [f64; 3], origin: [f64; 3]) -> Self {
        let mut coords = Vec::with_capacity(n[0] * n[1] * n[2] * 3);
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    coords.push(origin[0] + i as f64 * spacing[0]);
                    coords.push(origin[1] + j as f64 * spacing[1]);
                    coords.push(origin[2] + k as f64 * spacing[2]);
                }
            }
        }
        Self {
            dim: 3,
            shape: n,
            coords,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.shape[0] * self.shape[1] * self.shape[2]
    }

    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.shape[1] + j) * self.shape[0] + i
    }

    pub fn node(&self, index: usize) -> &[f64] {
        &self.coords[index * self.dim..(index + 1) * self.dim]
    }
}

/// Displaces every node of the grid by the interpolated field:
/// x -> x + f(x).
pub fn morph_grid(grid: &NodeGrid, f: &RbfInterpolant) -> Result<NodeGrid, MorphError> {
    if grid.dim != f.dim() {
        return Err(MorphError::EvalDimension {
            expected: f.dim(),
            got: grid.dim,
        });
    }
    let mut out = grid.clone();
    for n in 0..grid.n_nodes() {
        let d = f.evaluate_displacement(grid.node(n))?;
        for c in 0..grid.dim {
            out.coords[n * grid.dim + c] += d[c];
        }
    }
    Ok(out)
}

/// Control points from CSV rows `x, y[, z], dx, dy[, dz]`; 4 columns select
/// the 2D thin-plate kernel, 6 columns the 3D cubic kernel. `#` comments
/// and a non-numeric header line are skipped.
pub fn read_control_points_csv(path: &Path) -> Result<(Vec<ControlPoint>, RbfKernel), MorphError> {
    let text = fs::read_to_string(path).map_err(|e| MorphError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut points = Vec::new();
    let mut kernel: Option<RbfKernel> = None;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let values: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match values {
            Ok(v) => v,
            // allow one header line before any data
            Err(_) if points.is_empty() && kernel.is_none() => continue,
            Err(e) => {
                return Err(MorphError::Parse {
                    line: line_no + 1,
                    reason: e.to_string(),
                })
            }
        };
        let k = match values.len() {
            4 => RbfKernel::ThinPlate2d,
            6 => RbfKernel::Cubic3d,
            other => {
                return Err(MorphError::Parse {
                    line: line_no + 1,
                    reason: format!("expected 4 or 6 columns, got {other}"),
                })
            }
        };
        match kernel {
            None => kernel = Some(k),
            Some(prev) if prev != k => {
                return Err(MorphError::Parse {
                    line: line_no + 1,
                    reason: "mixed 2D and 3D rows".into(),
                })
            }
            _ => {}
        }
        let dim = k.dim();
        points.push(ControlPoint::new(
            values[..dim].to_vec(),
            values[dim..].to_vec(),
        ));
    }
    let kernel = kernel.ok_or(MorphError::Parse {
        line: 0,
        reason: "no control points in file".into(),
    })?;
    Ok((points, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_controls(disp: impl Fn(&[f64]) -> Vec<f64>) -> Vec<ControlPoint> {
        [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.4, 0.7]]
            .iter()
            .map(|p| ControlPoint::new(p.to_vec(), disp(p)))
            .collect()
    }

    #[test]
    fn zero_displacements_build_the_zero_interpolant() {
        let f = build_rbf(&square_controls(|_| vec![0.0, 0.0]), RbfKernel::ThinPlate2d).unwrap();
        for p in [[0.3, 0.3], [0.9, 0.1], [2.0, -1.0]] {
            let d = f.evaluate_displacement(&p).unwrap();
            assert!(d.iter().all(|v| v.abs() <= 1e-12));
        }
    }

    #[test]
    fn uniform_translation_is_carried_by_the_affine_term() {
        let f = build_rbf(&square_controls(|_| vec![0.25, -0.5]), RbfKernel::ThinPlate2d).unwrap();
        for p in [[0.5, 0.5], [3.0, 2.0], [-1.0, 0.2]] {
            let d = f.evaluate_displacement(&p).unwrap();
            assert!((d[0] - 0.25).abs() <= 1e-10);
            assert!((d[1] + 0.5).abs() <= 1e-10);
        }
    }

    #[test]
    fn affine_displacement_fields_are_reproduced() {
        let a = [[0.1, -0.3], [0.2, 0.05]];
        let b = [0.4, -0.1];
        let affine = move |p: &[f64]| {
            vec![
                a[0][0] * p[0] + a[0][1] * p[1] + b[0],
                a[1][0] * p[0] + a[1][1] * p[1] + b[1],
            ]
        };
        let points: Vec<ControlPoint> = [
            [0.0, 0.0],
            [1.3, 0.1],
            [0.2, 1.1],
            [0.8, 0.9],
            [1.9, 1.7],
            [0.5, 0.4],
        ]
        .iter()
        .map(|p| ControlPoint::new(p.to_vec(), affine(p)))
        .collect();
        let f = build_rbf(&points, RbfKernel::ThinPlate2d).unwrap();
        for p in [[0.33, 0.77], [1.5, 0.2], [2.5, 2.5], [-0.4, 0.9]] {
            let d = f.evaluate_displacement(&p).unwrap();
            let e = affine(&p);
            assert!((d[0] - e[0]).abs() <= 1e-8);
            assert!((d[1] - e[1]).abs() <= 1e-8);
        }
    }

    #[test]
    fn side_conditions_hold() {
        let f = build_rbf(
            &square_controls(|p| vec![p[0] * p[1], (p[0] - p[1]).sin()]),
            RbfKernel::ThinPlate2d,
        )
        .unwrap();
        for c in 0..2 {
            assert!(f.weight_sum(c).abs() <= 1e-10);
            for axis in 0..2 {
                assert!(f.weight_moment(c, axis).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn duplicates_and_collinear_sets_are_rejected() {
        let mut pts = square_controls(|_| vec![0.0, 0.0]);
        pts.push(ControlPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]));
        assert!(matches!(
            build_rbf(&pts, RbfKernel::ThinPlate2d),
            Err(MorphError::DuplicatePositions { .. })
        ));

        let collinear: Vec<ControlPoint> = (0..5)
            .map(|i| ControlPoint::new(vec![i as f64, 2.0 * i as f64], vec![0.1, 0.0]))
            .collect();
        assert!(build_rbf(&collinear, RbfKernel::ThinPlate2d).is_err());
    }

    #[test]
    fn too_few_points_is_an_error() {
        let pts = vec![
            ControlPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]),
            ControlPoint::new(vec![1.0, 0.0], vec![0.0, 0.0]),
        ];
        assert!(matches!(
            build_rbf(&pts, RbfKernel::ThinPlate2d),
            Err(MorphError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn cubic_kernel_handles_3d_translation() {
        let pts: Vec<ControlPoint> = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
        ]
        .iter()
        .map(|p| ControlPoint::new(p.to_vec(), vec![1.0, 2.0, 3.0]))
        .collect();
        let f = build_rbf(&pts, RbfKernel::Cubic3d).unwrap();
        let d = f.evaluate_displacement(&[0.2, 0.8, 0.5]).unwrap();
        assert!((d[0] - 1.0).abs() <= 1e-10);
        assert!((d[1] - 2.0).abs() <= 1e-10);
        assert!((d[2] - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn morph_with_zero_interpolant_is_identity() {
        let f = build_rbf(&square_controls(|_| vec![0.0, 0.0]), RbfKernel::ThinPlate2d).unwrap();
        let grid = NodeGrid::uniform_2d(5, 4, [0.25, 0.25], [0.0, 0.0]);
        let morphed = morph_grid(&grid, &f).unwrap();
        assert_eq!(morphed.coords, grid.coords);
    }

    #[test]
    fn small_sinusoidal_boundary_deflection_keeps_the_mesh_valid() {
        use super::validity::check_mesh_validity;
        // unit square, 32x32 cells; bottom edge bulges by 1% of the domain
        let wave = |x: f64| 0.01 * (2.0 * std::f64::consts::PI * x).sin();
        let mut points = Vec::new();
        for i in 0..=4 {
            let x = i as f64 / 4.0;
            points.push(ControlPoint::new(vec![x, 0.0], vec![0.0, wave(x)]));
            points.push(ControlPoint::new(vec![x, 1.0], vec![0.0, 0.0]));
        }
        points.push(ControlPoint::new(vec![0.0, 0.5], vec![0.0, 0.0]));
        points.push(ControlPoint::new(vec![1.0, 0.5], vec![0.0, 0.0]));

        let f = build_rbf(&points, RbfKernel::ThinPlate2d).unwrap();
        let grid = NodeGrid::uniform_2d(33, 33, [1.0 / 32.0, 1.0 / 32.0], [0.0, 0.0]);
        let morphed = morph_grid(&grid, &f).unwrap();
        let report = check_mesh_validity(&grid, &morphed).unwrap();
        assert_eq!(report.inverted_cells, 0);
        assert!(report.min_jacobian > 0.0);
    }

    #[test]
    fn csv_reader_detects_dimension_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("points.csv");
        fs::write(
            &path,
            "x,y,dx,dy\n# corner points\n0,0,0.1,0\n1,0,0,0\n0,1,0,0\n",
        )
        .unwrap();
        let (pts, kernel) = read_control_points_csv(&path).unwrap();
        assert_eq!(kernel, RbfKernel::ThinPlate2d);
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].displacement, vec![0.1, 0.0]);

        fs::write(&path, "0,0,0,0.1,0,0\n1,1,1,0,0,0\n").unwrap();
        let (_, kernel) = read_control_points_csv(&path).unwrap();
        assert_eq!(kernel, RbfKernel::Cubic3d);
    }
}
