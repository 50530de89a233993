//! Decomposition oracles: cross-checks between the two factorization
//! routes, constructions with known singular values, and the Frobenius
//! bookkeeping identities.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wakekit::field::StructuredGrid;
use wakekit::pod::{
    assemble_snapshot_matrix, cumulative_energy, pod_direct_svd, pod_method_of_snapshots, project,
    reconstruct, PodResult, SnapshotMatrix,
};
use wakekit::synth::{
    generate_separable_field, SeparableSpec, SeparableTerm, SpatialShape, TemporalCoeff,
};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, s: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, s, |_, _| rng.gen::<f64>() * 2.0 - 1.0)
}

fn weighted_frobenius_sq(m: &DMatrix<f64>, weights: Option<&DVector<f64>>) -> f64 {
    let mut sum = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let w = weights.map_or(1.0, |w| w[r]);
            sum += w * m[(r, c)] * m[(r, c)];
        }
    }
    sum
}

fn reconstruction_error(
    original: &SnapshotMatrix,
    result: &PodResult,
    n_modes: usize,
) -> f64 {
    let rebuilt = reconstruct(result, n_modes).unwrap();
    let diff = original.data() - rebuilt.data();
    weighted_frobenius_sq(&diff, original.weights()).sqrt()
}

#[test]
fn cross_method_agreement_on_seeded_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..50 {
        let n = rng.gen_range(2..=64);
        let s = rng.gen_range(1..=16);
        let m = SnapshotMatrix::new(random_matrix(&mut rng, n, s), None).unwrap();

        let a = pod_method_of_snapshots(&m);
        let b = pod_direct_svd(&m);
        a.check_invariants().unwrap();
        b.check_invariants().unwrap();

        assert_eq!(a.rank(), b.rank(), "case {case}: rank mismatch");
        for (sa, sb) in a.singular_values().iter().zip(b.singular_values()) {
            assert!(
                (sa - sb).abs() <= 1e-10 * sa.max(*sb),
                "case {case}: sigma {sa} vs {sb}"
            );
        }

        // full-rank reconstruction is exact for both routes
        let norm = weighted_frobenius_sq(m.data(), None).sqrt();
        assert!(reconstruction_error(&m, &a, a.rank()) <= 1e-12 * norm, "case {case}");
        assert!(reconstruction_error(&m, &b, b.rank()) <= 1e-12 * norm, "case {case}");

        // energy bookkeeping: sum of sigma^2 equals the squared norm
        let energy: f64 = a.singular_values().iter().map(|s| s * s).sum();
        assert!((energy - norm * norm).abs() <= 1e-10 * norm * norm);

        // cumulative energy is monotone and ends at exactly 1
        let mut prev = 0.0;
        for k in 0..=a.rank() {
            let e = cumulative_energy(&a, k).unwrap();
            assert!(e >= prev - 1e-15);
            prev = e;
        }
        assert!((prev - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn modes_of_the_two_routes_match_after_sign_fixing() {
    // the seeded 8 x 4 cross-method example
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = SnapshotMatrix::new(random_matrix(&mut rng, 8, 4), None).unwrap();
    let a = pod_method_of_snapshots(&m);
    let b = pod_direct_svd(&m);
    assert_eq!(a.rank(), b.rank());
    for (sa, sb) in a.singular_values().iter().zip(b.singular_values()) {
        assert!((sa - sb).abs() <= 1e-10 * sa);
    }
    // both routes apply the same sign convention, so modes match directly
    for c in 0..a.rank() {
        for r in 0..8 {
            assert!(
                (a.modes()[(r, c)] - b.modes()[(r, c)]).abs() <= 1e-8,
                "mode {c} row {r}"
            );
        }
    }
}

#[test]
fn weighted_gram_matches_the_brute_force_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 40;
    let s = 6;
    let data = random_matrix(&mut rng, n, s);
    let weights = DVector::from_fn(n, |_, _| 0.1 + rng.gen::<f64>());
    let m = SnapshotMatrix::new(data.clone(), Some(weights.clone())).unwrap();
    let gram = m.gram_matrix();
    for p in 0..s {
        for q in 0..s {
            let mut oracle = 0.0;
            for r in 0..n {
                oracle += weights[r] * data[(r, p)] * data[(r, q)];
            }
            assert!(
                (gram[(p, q)] - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
                "entry ({p},{q})"
            );
        }
    }
}

#[test]
fn weighted_decompositions_agree_across_routes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let m = SnapshotMatrix::new(
        random_matrix(&mut rng, 30, 7),
        Some(DVector::from_fn(30, |_, _| 0.2 + rng.gen::<f64>())),
    )
    .unwrap();
    let a = pod_method_of_snapshots(&m);
    let b = pod_direct_svd(&m);
    a.check_invariants().unwrap();
    b.check_invariants().unwrap();
    for (sa, sb) in a.singular_values().iter().zip(b.singular_values()) {
        assert!((sa - sb).abs() <= 1e-10 * sa);
    }
    let energy: f64 = a.singular_values().iter().map(|x| x * x).sum();
    let norm_sq = m.weighted_frobenius_sq();
    assert!((energy - norm_sq).abs() <= 1e-10 * norm_sq);
}

/// Gram-Schmidt in test code: an oracle independent of the library paths.
fn orthonormal_columns(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, k);
    for c in 0..k {
        let mut v = DVector::from_fn(n, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
        for prev in 0..c {
            let proj = q.column(prev).dot(&v);
            v -= q.column(prev) * proj;
        }
        v /= v.norm();
        q.set_column(c, &v);
    }
    q
}

#[test]
fn eckart_young_errors_match_the_sigma_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (n, s) = (20, 8);
    for noise in [0.0, 1e-3] {
        let u = orthonormal_columns(&mut rng, n, 3);
        let v = orthonormal_columns(&mut rng, s, 3);
        let sigmas = [5.0, 2.0, 0.7];
        let mut data = DMatrix::zeros(n, s);
        for (i, &sv) in sigmas.iter().enumerate() {
            data += u.column(i) * v.column(i).transpose() * sv;
        }
        data += random_matrix(&mut rng, n, s) * noise;
        let m = SnapshotMatrix::new(data, None).unwrap();
        let r = pod_method_of_snapshots(&m);

        for keep in 0..=r.rank() {
            let tail: f64 = r.singular_values()[keep..].iter().map(|x| x * x).sum();
            let expected = tail.sqrt();
            let err = reconstruction_error(&m, &r, keep);
            let scale = r.singular_values()[0];
            assert!(
                (err - expected).abs() <= 1e-9 * scale,
                "noise {noise}, keep {keep}: {err} vs {expected}"
            );
        }

        if noise == 0.0 {
            // rank-2 truncation error in relative Frobenius form
            assert_eq!(r.rank(), 3);
            let total: f64 = sigmas.iter().map(|x| x * x).sum();
            let rel = reconstruction_error(&m, &r, 2) / total.sqrt();
            assert!((rel - 0.7 / total.sqrt()).abs() <= 1e-10);
        }
    }
}

#[test]
fn separable_construction_fixes_the_singular_values() {
    let grid = StructuredGrid::new(6, 5, 2, 0.2, 0.2, 0.2, [0.0; 3]).unwrap();
    // coefficient vectors over 4 times: orthogonal with norms 3 and 1
    let spec = SeparableSpec {
        grid,
        terms: vec![
            SeparableTerm {
                shape: SpatialShape::Fourier {
                    wavenumbers: [1, 0, 0],
                },
                coeff: TemporalCoeff::Values(vec![3.0, 0.0, 0.0, 0.0]),
            },
            SeparableTerm {
                shape: SpatialShape::Fourier {
                    wavenumbers: [0, 2, 1],
                },
                coeff: TemporalCoeff::Values(vec![0.0, 1.0, 0.0, 0.0]),
            },
        ],
    };
    let (set, implied) = generate_separable_field(&spec, &[0.0, 1.0, 2.0, 3.0]).unwrap();
    assert_eq!(implied, vec![3.0, 1.0]);
    let m = assemble_snapshot_matrix(&set, "u", None, false, None).unwrap();
    for result in [pod_method_of_snapshots(&m), pod_direct_svd(&m)] {
        assert_eq!(result.rank(), 2);
        assert!((result.singular_values()[0] - 3.0).abs() <= 1e-10);
        assert!((result.singular_values()[1] - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn single_constant_term_has_rank_one_and_sqrt_s_sigma() {
    let grid = StructuredGrid::new(8, 3, 1, 0.5, 0.5, 0.5, [0.0; 3]).unwrap();
    let spec = SeparableSpec {
        grid,
        terms: vec![SeparableTerm {
            shape: SpatialShape::Fourier {
                wavenumbers: [2, 1, 0],
            },
            coeff: TemporalCoeff::Constant(1.0),
        }],
    };
    let (set, _) = generate_separable_field(&spec, &[0.0, 1.0, 2.0]).unwrap();
    let m = assemble_snapshot_matrix(&set, "u", None, false, None).unwrap();
    let r = pod_method_of_snapshots(&m);
    assert_eq!(r.rank(), 1);
    assert!((r.singular_values()[0] - 3.0_f64.sqrt()).abs() <= 1e-12);
}

#[test]
fn out_of_sample_projection_stays_within_the_truncation_budget() {
    let grid = StructuredGrid::new(10, 4, 1, 0.1, 0.1, 0.1, [0.0; 3]).unwrap();
    let terms: Vec<SeparableTerm> = [(1, 2.0, 0.11), (2, 1.0, 0.23), (3, 0.4, 0.37)]
        .iter()
        .map(|&(k, amp, freq)| SeparableTerm {
            shape: SpatialShape::Fourier {
                wavenumbers: [k, 0, 0],
            },
            coeff: TemporalCoeff::Sinusoid {
                amplitude: amp,
                frequency: freq,
                phase: 0.4 * k as f64,
            },
        })
        .collect();
    let spec = SeparableSpec { grid, terms };
    let times: Vec<f64> = (0..8).map(|i| i as f64 * 0.5).collect();
    let (set, _) = generate_separable_field(&spec, &times).unwrap();
    let m = assemble_snapshot_matrix(&set, "u", None, false, None).unwrap();
    let r = pod_method_of_snapshots(&m);
    assert_eq!(r.rank(), 3);

    // an unseen time sample still lies in the span of the three shapes
    let (probe_set, _) = generate_separable_field(&spec, &[1.77]).unwrap();
    let probe = DVector::from_vec(probe_set.frame(0, 0).to_vec());

    let coeffs = project(&probe, &r, r.rank()).unwrap();
    let rebuilt = r.modes().columns(0, r.rank()) * coeffs;
    assert!((rebuilt - &probe).norm() <= 1e-10);

    // truncated projection error is bounded by the discarded amplitude
    let coeffs2 = project(&probe, &r, 2).unwrap();
    let rebuilt2 = r.modes().columns(0, 2) * coeffs2;
    let max_alpha3 = 0.4;
    assert!((rebuilt2 - &probe).norm() <= max_alpha3 + 1e-10);
}

#[test]
fn mean_shift_leaves_the_centered_decomposition_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let data = random_matrix(&mut rng, 12, 5);
    let shift = DVector::from_fn(12, |_, _| rng.gen::<f64>() * 10.0 - 5.0);
    let mut shifted = data.clone();
    for c in 0..5 {
        for r in 0..12 {
            shifted[(r, c)] += shift[r];
        }
    }
    let mut m1 = SnapshotMatrix::new(data, None).unwrap();
    let mut m2 = SnapshotMatrix::new(shifted, None).unwrap();
    m1.subtract_temporal_mean();
    m2.subtract_temporal_mean();
    let r1 = pod_direct_svd(&m1);
    let r2 = pod_direct_svd(&m2);
    assert_eq!(r1.rank(), r2.rank());
    for k in 0..r1.rank() {
        assert!((r1.singular_values()[k] - r2.singular_values()[k]).abs() <= 1e-10);
        for r in 0..12 {
            assert!((r1.modes()[(r, k)] - r2.modes()[(r, k)]).abs() <= 1e-10);
        }
        for s in 0..5 {
            assert!(
                (r1.temporal_coeffs()[(k, s)] - r2.temporal_coeffs()[(k, s)]).abs() <= 1e-10
            );
        }
    }
}
