//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! Small and dependency-free; adequate for the S x S snapshot correlation
//! matrices this crate produces (S up to a few hundred). Sweeps visit the
//! upper triangle in row-major order, so the rotation sequence — and with
//! it the floating-point result — is deterministic.

use nalgebra::{DMatrix, DVector};

/// Relative off-diagonal Frobenius threshold for convergence.
const SWEEP_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a symmetric matrix: returns (eigenvalues,
/// eigenvectors as columns), unsorted.
pub(crate) fn jacobi_eigh(matrix: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "matrix must be square");
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    if n <= 1 {
        return (a.diagonal(), v);
    }

    let fro = a.norm();
    if fro == 0.0 {
        return (DVector::zeros(n), v);
    }
    let tol = SWEEP_TOL * fro;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // rotation annihilating a[(p, q)]
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for r in 0..n {
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    a[(r, p)] = c * arp - s * arq;
                    a[(r, q)] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[(p, r)];
                    let aqr = a[(q, r)];
                    a[(p, r)] = c * apr - s * aqr;
                    a[(q, r)] = s * apr + c * aqr;
                }
                // keep the pivot pair exactly symmetric
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_is_already_solved() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 0.5]));
        let (vals, vecs) = jacobi_eigh(&a);
        assert_eq!(vals.as_slice(), &[3.0, -1.0, 0.5]);
        assert_eq!(vecs, DMatrix::identity(3, 3));
    }

    #[test]
    fn recovers_known_2x2_spectrum() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = jacobi_eigh(&a);
        let mut sorted: Vec<f64> = vals.iter().copied().collect();
        sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((sorted[0] - 3.0).abs() <= 1e-14);
        assert!((sorted[1] - 1.0).abs() <= 1e-14);
        // residual A v = lambda v
        for c in 0..2 {
            let r = &a * vecs.column(c) - vals[c] * vecs.column(c);
            assert!(r.norm() <= 1e-13);
        }
    }

    #[test]
    fn eigenvectors_stay_orthonormal_on_random_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 6, 12] {
            let b = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
            let a = &b * b.transpose();
            let (vals, vecs) = jacobi_eigh(&a);
            let gram = vecs.transpose() * &vecs;
            assert!((gram - DMatrix::identity(n, n)).norm() <= 1e-12);
            let reconstructed = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
            assert!((reconstructed - a.clone()).norm() <= 1e-11 * a.norm().max(1.0));
        }
    }
}
