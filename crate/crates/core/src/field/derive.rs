//! Derived kinematic fields: velocity gradient, strain rate, Q-criterion.

use super::{Axis, FieldError, FieldSnapshot};

/// Velocity gradient tensor du_i/dx_j, stored row-major per cell
/// (component index 3*i + j).
///
/// Second-order central differences in the interior, second-order one-sided
/// stencils at the boundaries. Axes with exactly two cells fall back to the
/// two-point difference, which is still exact for affine fields.
pub fn compute_gradient(snap: &FieldSnapshot) -> Result<FieldSnapshot, FieldError> {
    if snap.components != 3 {
        return Err(FieldError::ScalarGradient(snap.components));
    }
    let g = &snap.grid;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        if g.cells(axis) < 2 {
            return Err(FieldError::DegenerateAxis {
                axis,
                cells: g.cells(axis),
            });
        }
    }

    let cells = g.cell_count();
    let mut out = vec![0.0; cells * 9];
    let value = |i: usize, j: usize, k: usize, c: usize| snap.value(i, j, k, c);

    // derivative of component c along `axis` at (i, j, k)
    let deriv = |i: usize, j: usize, k: usize, c: usize, axis: Axis| -> f64 {
        let (n, h, pos) = match axis {
            Axis::X => (g.nx, g.dx, i),
            Axis::Y => (g.ny, g.dy, j),
            Axis::Z => (g.nz, g.dz, k),
        };
        let at = |p: usize| match axis {
            Axis::X => value(p, j, k, c),
            Axis::Y => value(i, p, k, c),
            Axis::Z => value(i, j, p, c),
        };
        // stencils written as neighbor differences so constant fields
        // differentiate to exactly zero
        if n == 2 {
            (at(1) - at(0)) / h
        } else if pos == 0 {
            (3.0 * (at(1) - at(0)) - (at(2) - at(1))) / (2.0 * h)
        } else if pos == n - 1 {
            (3.0 * (at(n - 1) - at(n - 2)) - (at(n - 2) - at(n - 3))) / (2.0 * h)
        } else {
            (at(pos + 1) - at(pos - 1)) / (2.0 * h)
        }
    };

    for k in 0..g.nz {
        for j in 0..g.ny {
            for i in 0..g.nx {
                let base = g.cell_index(i, j, k) * 9;
                for c in 0..3 {
                    out[base + 3 * c] = deriv(i, j, k, c, Axis::X);
                    out[base + 3 * c + 1] = deriv(i, j, k, c, Axis::Y);
                    out[base + 3 * c + 2] = deriv(i, j, k, c, Axis::Z);
                }
            }
        }
    }
    Ok(FieldSnapshot::new_tensor(*g, snap.time, out))
}

/// Symmetric part of the gradient, S_ij = (du_i/dx_j + du_j/dx_i) / 2.
/// Each off-diagonal pair is computed once, so S_ij == S_ji bitwise.
pub fn compute_strain_rate(grad: &FieldSnapshot) -> Result<FieldSnapshot, FieldError> {
    if grad.components != 9 {
        return Err(FieldError::NotATensor(grad.components));
    }
    let cells = grad.grid.cell_count();
    let mut out = vec![0.0; cells * 9];
    for cell in 0..cells {
        let b = cell * 9;
        for i in 0..3 {
            for j in i..3 {
                let s = 0.5 * (grad.data[b + 3 * i + j] + grad.data[b + 3 * j + i]);
                out[b + 3 * i + j] = s;
                out[b + 3 * j + i] = s;
            }
        }
    }
    Ok(FieldSnapshot::new_tensor(grad.grid, grad.time, out))
}

/// Antisymmetric part of the gradient, Omega_ij = (du_i/dx_j - du_j/dx_i) / 2.
/// Each pair is computed once and mirrored with a sign flip, so
/// Omega_ij == -Omega_ji bitwise.
pub fn compute_spin_rate(grad: &FieldSnapshot) -> Result<FieldSnapshot, FieldError> {
    if grad.components != 9 {
        return Err(FieldError::NotATensor(grad.components));
    }
    let cells = grad.grid.cell_count();
    let mut out = vec![0.0; cells * 9];
    for cell in 0..cells {
        let b = cell * 9;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let w = 0.5 * (grad.data[b + 3 * i + j] - grad.data[b + 3 * j + i]);
                out[b + 3 * i + j] = w;
                out[b + 3 * j + i] = -w;
            }
        }
    }
    Ok(FieldSnapshot::new_tensor(grad.grid, grad.time, out))
}

/// Q-criterion, Q = (|Omega|^2 - |S|^2) / 2 with Frobenius norms of the
/// antisymmetric and symmetric gradient parts. Positive where rotation
/// dominates strain.
pub fn compute_q_criterion(grad: &FieldSnapshot) -> Result<FieldSnapshot, FieldError> {
    if grad.components != 9 {
        return Err(FieldError::NotATensor(grad.components));
    }
    let cells = grad.grid.cell_count();
    let mut out = vec![0.0; cells];
    for cell in 0..cells {
        let b = cell * 9;
        let mut s_sq = 0.0;
        let mut w_sq = 0.0;
        for i in 0..3 {
            let d = grad.data[b + 3 * i + i];
            s_sq += d * d;
            for j in (i + 1)..3 {
                let a = grad.data[b + 3 * i + j];
                let c = grad.data[b + 3 * j + i];
                let s = 0.5 * (a + c);
                let w = 0.5 * (a - c);
                s_sq += 2.0 * s * s;
                w_sq += 2.0 * w * w;
            }
        }
        out[cell] = 0.5 * (w_sq - s_sq);
    }
    FieldSnapshot::new(grad.grid, 1, grad.time, out)
}
