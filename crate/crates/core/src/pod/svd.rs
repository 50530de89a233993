//! One-sided Jacobi singular value decomposition.
//!
//! Orthogonalizes the snapshot columns directly under the (optionally
//! weighted) spatial inner product, giving a code path fully independent of
//! the correlation-matrix eigensolver route; the two are cross-checked in
//! the test suite. Column pairs are visited in row-major order for a
//! deterministic rotation sequence.

use nalgebra::{DMatrix, DVector};

const PAIR_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

fn weighted_dot(a: &DMatrix<f64>, weights: Option<&DVector<f64>>, p: usize, q: usize) -> f64 {
    let mut sum = 0.0;
    match weights {
        Some(w) => {
            for r in 0..a.nrows() {
                sum += w[r] * a[(r, p)] * a[(r, q)];
            }
        }
        None => {
            for r in 0..a.nrows() {
                sum += a[(r, p)] * a[(r, q)];
            }
        }
    }
    sum
}

/// Decomposes `data` as U * diag(sigma) * V^T with U^T W U = I.
///
/// Returns `(sigma, u, v)` unsorted and unfiltered: `sigma[j] >= 0`, zero
/// columns keep `sigma[j] = 0` with a zero `u` column. `v` is the
/// accumulated product of the plane rotations (orthogonal).
pub(crate) fn one_sided_jacobi(
    data: &DMatrix<f64>,
    weights: Option<&DVector<f64>>,
) -> (DVector<f64>, DMatrix<f64>, DMatrix<f64>) {
    let s = data.ncols();
    let mut a = data.clone();
    let mut v = DMatrix::<f64>::identity(s, s);

    if s > 1 {
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..s - 1 {
                for q in (p + 1)..s {
                    let app = weighted_dot(&a, weights, p, p);
                    let aqq = weighted_dot(&a, weights, q, q);
                    let apq = weighted_dot(&a, weights, p, q);
                    if apq == 0.0 || apq.abs() <= PAIR_TOL * (app * aqq).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let sn = t * c;
                    for r in 0..a.nrows() {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = c * arp - sn * arq;
                        a[(r, q)] = sn * arp + c * arq;
                    }
                    for r in 0..s {
                        let vrp = v[(r, p)];
                        let vrq = v[(r, q)];
                        v[(r, p)] = c * vrp - sn * vrq;
                        v[(r, q)] = sn * vrp + c * vrq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut sigma = DVector::zeros(s);
    for j in 0..s {
        let norm = weighted_dot(&a, weights, j, j).sqrt();
        sigma[j] = norm;
        if norm > 0.0 {
            for r in 0..a.nrows() {
                a[(r, j)] /= norm;
            }
        }
    }
    (sigma, a, v)
}
