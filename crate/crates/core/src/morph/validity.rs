//! Cell-validity check for morphed structured meshes.
//!
//! Each cell's bilinear (2D) or trilinear (3D) map from the reference
//! square/cube is differentiated at the cell corners; a negative Jacobian
//! determinant at any corner marks the cell as inverted.

use serde::Serialize;

use super::{MorphError, NodeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Smallest corner Jacobian determinant over all cells. For the
    /// identity morph of a uniform grid this is the cell area (2D) or
    /// volume (3D).
    pub min_jacobian: f64,
    /// Number of cells with a negative corner determinant.
    pub inverted_cells: usize,
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

fn sub<const D: usize>(a: &[f64], b: &[f64]) -> [f64; D] {
    std::array::from_fn(|i| a[i] - b[i])
}

fn lerp<const D: usize>(a: [f64; D], b: [f64; D], t: f64) -> [f64; D] {
    std::array::from_fn(|i| (1.0 - t) * a[i] + t * b[i])
}

/// Evaluates min corner Jacobian and inverted-cell count of `morphed`,
/// taking the structured connectivity from `original`. Both grids must
/// share shape and dimension.
pub fn check_mesh_validity(
    original: &NodeGrid,
    morphed: &NodeGrid,
) -> Result<ValidityReport, MorphError> {
    if original.shape != morphed.shape || original.dim != morphed.dim {
        return Err(MorphError::GridShapeMismatch);
    }
    match morphed.dim {
        2 => Ok(check_2d(morphed)),
        3 => Ok(check_3d(morphed)),
        d => Err(MorphError::BadGridDimension(d)),
    }
}

fn check_2d(grid: &NodeGrid) -> ValidityReport {
    let [n0, n1, _] = grid.shape;
    let mut min_jac = f64::INFINITY;
    let mut inverted = 0usize;
    for j in 0..n1.saturating_sub(1) {
        for i in 0..n0.saturating_sub(1) {
            let p00 = grid.node(grid.node_index(i, j, 0));
            let p10 = grid.node(grid.node_index(i + 1, j, 0));
            let p01 = grid.node(grid.node_index(i, j + 1, 0));
            let p11 = grid.node(grid.node_index(i + 1, j + 1, 0));
            let e_bottom = sub::<2>(p10, p00);
            let e_top = sub::<2>(p11, p01);
            let e_left = sub::<2>(p01, p00);
            let e_right = sub::<2>(p11, p10);
            let mut cell_min = f64::INFINITY;
            for (xi, eta) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let d_xi = lerp(e_bottom, e_top, eta);
                let d_eta = lerp(e_left, e_right, xi);
                cell_min = cell_min.min(det2(d_xi, d_eta));
            }
            min_jac = min_jac.min(cell_min);
            if cell_min < 0.0 {
                inverted += 1;
            }
        }
    }
    ValidityReport {
        min_jacobian: min_jac,
        inverted_cells: inverted,
    }
}

fn check_3d(grid: &NodeGrid) -> ValidityReport {
    let [n0, n1, n2] = grid.shape;
    let mut min_jac = f64::INFINITY;
    let mut inverted = 0usize;
    for k in 0..n2.saturating_sub(1) {
        for j in 0..n1.saturating_sub(1) {
            for i in 0..n0.saturating_sub(1) {
                let p = |di: usize, dj: usize, dk: usize| {
                    grid.node(grid.node_index(i + di, j + dj, k + dk))
                };
                let mut cell_min = f64::INFINITY;
                for corner in 0..8 {
                    let xi = (corner & 1) as f64;
                    let eta = ((corner >> 1) & 1) as f64;
                    let zeta = ((corner >> 2) & 1) as f64;
                    // trilinear tangents: blend the four parallel edges
                    let d_xi = lerp(
                        lerp(sub::<3>(p(1, 0, 0), p(0, 0, 0)), sub::<3>(p(1, 1, 0), p(0, 1, 0)), eta),
                        lerp(sub::<3>(p(1, 0, 1), p(0, 0, 1)), sub::<3>(p(1, 1, 1), p(0, 1, 1)), eta),
                        zeta,
                    );
                    let d_eta = lerp(
                        lerp(sub::<3>(p(0, 1, 0), p(0, 0, 0)), sub::<3>(p(1, 1, 0), p(1, 0, 0)), xi),
                        lerp(sub::<3>(p(0, 1, 1), p(0, 0, 1)), sub::<3>(p(1, 1, 1), p(1, 0, 1)), xi),
                        zeta,
                    );
                    let d_zeta = lerp(
                        lerp(sub::<3>(p(0, 0, 1), p(0, 0, 0)), sub::<3>(p(1, 0, 1), p(1, 0, 0)), xi),
                        lerp(sub::<3>(p(0, 1, 1), p(0, 1, 0)), sub::<3>(p(1, 1, 1), p(1, 1, 0)), xi),
                        eta,
                    );
                    cell_min = cell_min.min(det3(d_xi, d_eta, d_zeta));
                }
                min_jac = min_jac.min(cell_min);
                if cell_min < 0.0 {
                    inverted += 1;
                }
            }
        }
    }
    ValidityReport {
        min_jacobian: min_jac,
        inverted_cells: inverted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_2d_gives_cell_area_and_no_inversions() {
        let grid = NodeGrid::uniform_2d(5, 4, [0.5, 0.25], [1.0, -1.0]);
        let report = check_mesh_validity(&grid, &grid).unwrap();
        assert!((report.min_jacobian - 0.125).abs() <= 1e-15);
        assert_eq!(report.inverted_cells, 0);
    }

    #[test]
    fn identity_3d_gives_cell_volume() {
        let grid = NodeGrid::uniform_3d([3, 3, 3], [0.5, 1.0, 2.0], [0.0; 3]);
        let report = check_mesh_validity(&grid, &grid).unwrap();
        assert!((report.min_jacobian - 1.0).abs() <= 1e-15);
        assert_eq!(report.inverted_cells, 0);
    }

    #[test]
    fn folding_one_node_inverts_cells() {
        let grid = NodeGrid::uniform_2d(3, 3, [1.0, 1.0], [0.0, 0.0]);
        let mut folded = grid.clone();
        // reflect the center node across the right edge of its cell
        let idx = folded.node_index(1, 1, 0);
        folded.coords[idx * 2] = 2.5;
        let report = check_mesh_validity(&grid, &folded).unwrap();
        assert!(report.inverted_cells >= 1);
        assert!(report.min_jacobian < 0.0);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = NodeGrid::uniform_2d(3, 3, [1.0, 1.0], [0.0, 0.0]);
        let b = NodeGrid::uniform_2d(4, 3, [1.0, 1.0], [0.0, 0.0]);
        assert!(matches!(
            check_mesh_validity(&a, &b),
            Err(MorphError::GridShapeMismatch)
        ));
    }

    #[test]
    fn small_random_smooth_morphs_never_invert() {
        use rand::{Rng, SeedableRng};
        let grid = NodeGrid::uniform_2d(9, 9, [1.0, 1.0], [0.0, 0.0]);
        for seed in 0..20 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut morphed = grid.clone();
            let (ax, ay) = (rng.gen::<f64>() * 0.05, rng.gen::<f64>() * 0.05);
            let (px, py) = (rng.gen::<f64>() * std::f64::consts::TAU, rng.gen::<f64>() * std::f64::consts::TAU);
            for n in 0..grid.n_nodes() {
                let x = grid.coords[n * 2];
                let y = grid.coords[n * 2 + 1];
                morphed.coords[n * 2] += ax * (0.7 * y + px).sin();
                morphed.coords[n * 2 + 1] += ay * (0.9 * x + py).cos();
            }
            let report = check_mesh_validity(&grid, &morphed).unwrap();
            assert_eq!(report.inverted_cells, 0, "seed {seed}");
            assert!(report.min_jacobian > 0.0);
        }
    }
}
