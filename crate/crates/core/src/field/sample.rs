//! Plane sampling and the default wake-analysis plane layout.

use super::{Axis, FieldError, FieldSnapshot, PlaneSpec};

/// Interpolation stencil along one axis: contributing layers and the weight
/// of the upper one. Offsets in the half-cell margin next to a domain face
/// clamp to the boundary cell layer.
fn axis_stencil(n: usize, d: f64, origin: f64, coord: f64) -> (usize, usize, f64) {
    if n == 1 {
        return (0, 0, 0.0);
    }
    let s = (coord - origin) / d - 0.5;
    if s <= 0.0 {
        (0, 0, 0.0)
    } else if s >= (n - 1) as f64 {
        (n - 1, n - 1, 0.0)
    } else {
        let i0 = s.floor() as usize;
        let t = s - i0 as f64;
        if t == 0.0 {
            (i0, i0, 0.0)
        } else {
            (i0, i0 + 1, t)
        }
    }
}

/// Samples a snapshot on an axis-normal plane.
///
/// Sample points are the cell-center lattice of the two in-plane axes, so
/// only the normal direction is interpolated (linearly between the two
/// bracketing cell-center layers). When the offset coincides with a layer
/// the stored values are returned exactly. The result is a 2D snapshot: the
/// normal axis collapses to a single cell centered on the plane.
pub fn sample_plane(snap: &FieldSnapshot, plane: &PlaneSpec) -> Result<FieldSnapshot, FieldError> {
    let g = &snap.grid;
    let ax = plane.axis.index();
    let (lo, hi) = g.bounds();
    if !(plane.offset >= lo[ax] && plane.offset <= hi[ax]) {
        return Err(FieldError::PlaneOutOfBounds {
            axis: plane.axis,
            offset: plane.offset,
            min: lo[ax],
            max: hi[ax],
        });
    }

    let n = g.cells(plane.axis);
    let d = g.spacing(plane.axis);
    let (k0, k1, t) = axis_stencil(n, d, g.origin[ax], plane.offset);

    let mut out_grid = *g;
    match plane.axis {
        Axis::X => {
            out_grid.nx = 1;
            out_grid.origin[0] = plane.offset - 0.5 * g.dx;
        }
        Axis::Y => {
            out_grid.ny = 1;
            out_grid.origin[1] = plane.offset - 0.5 * g.dy;
        }
        Axis::Z => {
            out_grid.nz = 1;
            out_grid.origin[2] = plane.offset - 0.5 * g.dz;
        }
    }

    let comps = snap.components;
    let mut data = Vec::with_capacity(out_grid.cell_count() * comps);
    let mut push_interp = |idx0: usize, idx1: usize| {
        for c in 0..comps {
            let a = snap.data[idx0 * comps + c];
            if t == 0.0 {
                data.push(a);
            } else {
                let b = snap.data[idx1 * comps + c];
                data.push((1.0 - t) * a + t * b);
            }
        }
    };
    match plane.axis {
        Axis::X => {
            for k in 0..g.nz {
                for j in 0..g.ny {
                    push_interp(g.cell_index(k0, j, k), g.cell_index(k1, j, k));
                }
            }
        }
        Axis::Y => {
            for k in 0..g.nz {
                for i in 0..g.nx {
                    push_interp(g.cell_index(i, k0, k), g.cell_index(i, k1, k));
                }
            }
        }
        Axis::Z => {
            for j in 0..g.ny {
                for i in 0..g.nx {
                    push_interp(g.cell_index(i, j, k0), g.cell_index(i, j, k1));
                }
            }
        }
    }

    Ok(FieldSnapshot {
        grid: out_grid,
        components: comps,
        time: snap.time,
        data,
    })
}

/// Standard plane layout for wake analysis behind a rotor of diameter `d`
/// with hub height `hub`: spanwise (YZ) planes at 0.5–2.5 diameters
/// downstream, wall-parallel (XY) planes at nacelle/tip/tower heights, and
/// vertical (ZX) planes through the nacelle and one half-diameter to the
/// side. The rotor center is assumed at (0, 0, hub).
pub fn default_wake_planes(d: f64, hub: f64) -> Vec<PlaneSpec> {
    let mut planes = Vec::new();
    for m in [0.5, 1.0, 1.5, 2.0, 2.5] {
        planes.push(PlaneSpec::new(Axis::X, m * d, format!("yz_x{m:.1}D")));
    }
    planes.push(PlaneSpec::new(Axis::Z, hub, "xy_nacelle"));
    planes.push(PlaneSpec::new(Axis::Z, hub + 0.5 * d, "xy_tip"));
    planes.push(PlaneSpec::new(Axis::Z, hub - 0.5 * d, "xy_tower"));
    planes.push(PlaneSpec::new(Axis::Y, 0.0, "zx_near"));
    planes.push(PlaneSpec::new(Axis::Y, 0.5 * d, "zx_far"));
    planes
}
