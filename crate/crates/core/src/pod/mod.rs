//! Snapshot proper orthogonal decomposition.
//!
//! A snapshot matrix collects flattened field samples as columns; its
//! decomposition yields spatial modes (orthonormal under the optional
//! per-row quadrature weights), singular values and temporal coefficients.
//! Two independent routes produce the same factorization: the method of
//! snapshots (eigendecomposition of the S x S correlation matrix) and a
//! one-sided Jacobi SVD of the snapshot columns. Keeping both allows each
//! to serve as a cross-check of the other.

mod io;
mod jacobi;
mod svd;

pub use io::{read_mode_set, write_mode_set, PodSidecar};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::field::SnapshotSet;

/// Eigenvalues (squared singular values) below this fraction of the largest
/// one are truncated from the rank.
pub const RANK_CUTOFF_REL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PodError {
    #[error("snapshot matrix needs at least one row and one column")]
    EmptyMatrix,
    #[error("weights invalid: {0}")]
    BadWeights(String),
    #[error("mean-subtracted matrix must carry its stored mean")]
    MissingStoredMean,
    #[error("row {row} of a mean-subtracted matrix sums to {sum:e}")]
    MeanNotRemoved { row: usize, sum: f64 },
    #[error("component {component} out of range for field with {components} component(s)")]
    ComponentOutOfRange { component: usize, components: usize },
    #[error("requested {requested} modes but the decomposition rank is {rank}")]
    ExceedsRank { requested: usize, rank: usize },
    #[error("vector length {got} does not match the {expected} matrix rows")]
    LengthMismatch { expected: usize, got: usize },
    #[error("decomposition invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// Column-per-snapshot data matrix with optional per-row quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: DMatrix<f64>,
    weights: Option<DVector<f64>>,
    mean_subtracted: bool,
    stored_mean: Option<DVector<f64>>,
}

impl SnapshotMatrix {
    pub fn new(data: DMatrix<f64>, weights: Option<DVector<f64>>) -> Result<Self, PodError> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(PodError::EmptyMatrix);
        }
        if let Some(w) = &weights {
            if w.len() != data.nrows() {
                return Err(PodError::BadWeights(format!(
                    "{} weights for {} rows",
                    w.len(),
                    data.nrows()
                )));
            }
            if let Some(i) = w.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(PodError::BadWeights(format!("weight {i} = {} not > 0", w[i])));
            }
        }
        Ok(Self {
            data,
            weights,
            mean_subtracted: false,
            stored_mean: None,
        })
    }

    /// Removes the temporal (per-row) mean, storing it for reconstruction.
    pub fn subtract_temporal_mean(&mut self) {
        if self.mean_subtracted {
            return;
        }
        let s = self.data.ncols() as f64;
        let mean = DVector::from_fn(self.data.nrows(), |r, _| self.data.row(r).sum() / s);
        for c in 0..self.data.ncols() {
            for r in 0..self.data.nrows() {
                self.data[(r, c)] -= mean[r];
            }
        }
        self.stored_mean = Some(mean);
        self.mean_subtracted = true;
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn weights(&self) -> Option<&DVector<f64>> {
        self.weights.as_ref()
    }

    pub fn mean_subtracted(&self) -> bool {
        self.mean_subtracted
    }

    pub fn stored_mean(&self) -> Option<&DVector<f64>> {
        self.stored_mean.as_ref()
    }

    /// Correlation (Gram) matrix C = phi^T W phi, accumulated row-by-row in
    /// ascending index order so the result is deterministic.
    pub fn gram_matrix(&self) -> DMatrix<f64> {
        let s = self.data.ncols();
        let n = self.data.nrows();
        let mut c = DMatrix::zeros(s, s);
        for p in 0..s {
            for q in p..s {
                let mut sum = 0.0;
                match &self.weights {
                    Some(w) => {
                        for r in 0..n {
                            sum += w[r] * self.data[(r, p)] * self.data[(r, q)];
                        }
                    }
                    None => {
                        for r in 0..n {
                            sum += self.data[(r, p)] * self.data[(r, q)];
                        }
                    }
                }
                c[(p, q)] = sum;
                c[(q, p)] = sum;
            }
        }
        c
    }

    /// Squared Frobenius norm under the weighted inner product.
    pub fn weighted_frobenius_sq(&self) -> f64 {
        let mut sum = 0.0;
        for c in 0..self.data.ncols() {
            for r in 0..self.data.nrows() {
                let v = self.data[(r, c)];
                let w = self.weights.as_ref().map_or(1.0, |w| w[r]);
                sum += w * v * v;
            }
        }
        sum
    }

    /// Validates the declared state of the matrix (weights and, for
    /// mean-subtracted data, that every row actually sums to zero).
    pub fn check_invariants(&self) -> Result<(), PodError> {
        if self.mean_subtracted {
            let mean = self.stored_mean.as_ref().ok_or(PodError::MissingStoredMean)?;
            if mean.len() != self.data.nrows() {
                return Err(PodError::MissingStoredMean);
            }
            for r in 0..self.data.nrows() {
                let sum: f64 = self.data.row(r).sum();
                let scale = self.data.row(r).norm();
                if sum.abs() > (1e-10 * scale).max(1e-14) {
                    return Err(PodError::MeanNotRemoved { row: r, sum });
                }
            }
        }
        Ok(())
    }
}

/// Decomposition output: orthonormal spatial modes, descending singular
/// values and temporal coefficients (`coeffs[n][s]` is the amplitude of
/// mode n in snapshot s).
#[derive(Debug, Clone, PartialEq)]
pub struct PodResult {
    modes: DMatrix<f64>,
    singular_values: Vec<f64>,
    temporal_coeffs: DMatrix<f64>,
    weights: Option<DVector<f64>>,
    mean_subtracted: bool,
    stored_mean: Option<DVector<f64>>,
}

impl PodResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// N x r matrix of spatial modes.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// r x S matrix of temporal coefficients.
    pub fn temporal_coeffs(&self) -> &DMatrix<f64> {
        &self.temporal_coeffs
    }

    pub fn weights(&self) -> Option<&DVector<f64>> {
        self.weights.as_ref()
    }

    pub fn mean_subtracted(&self) -> bool {
        self.mean_subtracted
    }

    pub fn stored_mean(&self) -> Option<&DVector<f64>> {
        self.stored_mean.as_ref()
    }

    pub fn n_snapshots(&self) -> usize {
        self.temporal_coeffs.ncols()
    }

    /// Checks mode orthonormality (weighted), ordering of the singular
    /// values and the coefficient-row norms.
    pub fn check_invariants(&self) -> Result<(), PodError> {
        let r = self.rank();
        for a in 0..r {
            for b in a..r {
                let mut dot = 0.0;
                match &self.weights {
                    Some(w) => {
                        for row in 0..self.modes.nrows() {
                            dot += w[row] * self.modes[(row, a)] * self.modes[(row, b)];
                        }
                    }
                    None => {
                        for row in 0..self.modes.nrows() {
                            dot += self.modes[(row, a)] * self.modes[(row, b)];
                        }
                    }
                }
                let expected = if a == b { 1.0 } else { 0.0 };
                if (dot - expected).abs() > 1e-10 {
                    return Err(PodError::InvariantViolation(format!(
                        "modes {a},{b} inner product {dot}"
                    )));
                }
            }
        }
        for w in self.singular_values.windows(2) {
            if w[1] > w[0] {
                return Err(PodError::InvariantViolation(
                    "singular values not descending".into(),
                ));
            }
        }
        for n in 0..r {
            let norm = self.temporal_coeffs.row(n).norm();
            let sigma = self.singular_values[n];
            if (norm - sigma).abs() > 1e-9 * sigma.max(1e-300) {
                return Err(PodError::InvariantViolation(format!(
                    "coefficient row {n} has norm {norm}, sigma {sigma}"
                )));
            }
        }
        Ok(())
    }
}

/// Flattens one field (or one component of it) of a snapshot set into a
/// snapshot matrix, one column per time sample.
pub fn assemble_snapshot_matrix(
    set: &SnapshotSet,
    field: &str,
    component: Option<usize>,
    subtract_mean: bool,
    weights: Option<DVector<f64>>,
) -> Result<SnapshotMatrix, PodError> {
    let fi = set.field_index(field)?;
    let comps = set.fields()[fi].components;
    if let Some(c) = component {
        if c >= comps {
            return Err(PodError::ComponentOutOfRange {
                component: c,
                components: comps,
            });
        }
    }
    let cells = set.grid().cell_count();
    let n = match component {
        Some(_) => cells,
        None => cells * comps,
    };
    let s = set.num_snapshots();
    let mut data = DMatrix::zeros(n, s);
    for col in 0..s {
        let frame = set.frame(col, fi);
        match component {
            Some(c) => {
                for cell in 0..cells {
                    data[(cell, col)] = frame[cell * comps + c];
                }
            }
            None => {
                for (row, &v) in frame.iter().enumerate() {
                    data[(row, col)] = v;
                }
            }
        }
    }
    let mut m = SnapshotMatrix::new(data, weights)?;
    if subtract_mean {
        m.subtract_temporal_mean();
    }
    Ok(m)
}

fn descending_order(values: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Fixes mode signs so the largest-magnitude entry of every mode is
/// positive (ties broken by lowest row index); coefficient rows are flipped
/// along so the product is unchanged.
fn apply_sign_convention(modes: &mut DMatrix<f64>, coeffs: &mut DMatrix<f64>) {
    for c in 0..modes.ncols() {
        let mut best_row = 0;
        let mut best_mag = f64::NEG_INFINITY;
        for r in 0..modes.nrows() {
            let mag = modes[(r, c)].abs();
            if mag > best_mag {
                best_mag = mag;
                best_row = r;
            }
        }
        if modes[(best_row, c)] < 0.0 {
            for r in 0..modes.nrows() {
                modes[(r, c)] = -modes[(r, c)];
            }
            for s in 0..coeffs.ncols() {
                coeffs[(c, s)] = -coeffs[(c, s)];
            }
        }
    }
}

/// Decomposition via the S x S correlation matrix: eigenvalues of
/// C = phi^T W phi give the squared singular values, modes follow as
/// phi v_n / sigma_n. An all-zero matrix produces a rank-0 result.
pub fn pod_method_of_snapshots(m: &SnapshotMatrix) -> PodResult {
    let c = m.gram_matrix();
    let (eigvals, eigvecs) = jacobi::jacobi_eigh(&c);
    let order = descending_order(&eigvals);

    let lam_max = order.first().map_or(0.0, |&i| eigvals[i]);
    let cutoff = RANK_CUTOFF_REL * lam_max;
    let retained: Vec<usize> = if lam_max > 0.0 {
        order
            .iter()
            .copied()
            .take_while(|&i| eigvals[i] >= cutoff && eigvals[i] > 0.0)
            .collect()
    } else {
        Vec::new()
    };

    let rank = retained.len();
    let s = m.n_cols();
    let mut sigma = Vec::with_capacity(rank);
    let mut modes = DMatrix::zeros(m.n_rows(), rank);
    let mut coeffs = DMatrix::zeros(rank, s);
    for (n, &idx) in retained.iter().enumerate() {
        let sv = eigvals[idx].max(0.0).sqrt();
        sigma.push(sv);
        let v_n = eigvecs.column(idx);
        let mode = m.data() * v_n / sv;
        modes.set_column(n, &mode);
        for col in 0..s {
            coeffs[(n, col)] = sv * v_n[col];
        }
    }
    apply_sign_convention(&mut modes, &mut coeffs);
    PodResult {
        modes,
        singular_values: sigma,
        temporal_coeffs: coeffs,
        weights: m.weights().cloned(),
        mean_subtracted: m.mean_subtracted(),
        stored_mean: m.stored_mean().cloned(),
    }
}

/// Decomposition by one-sided Jacobi orthogonalization of the snapshot
/// columns; an independent code path cross-checking the method of
/// snapshots.
pub fn pod_direct_svd(m: &SnapshotMatrix) -> PodResult {
    let (sigma_all, u_all, v_all) = svd::one_sided_jacobi(m.data(), m.weights());
    let order = descending_order(&sigma_all);

    let sigma_max = order.first().map_or(0.0, |&i| sigma_all[i]);
    // same cutoff semantics as the eigenvalue route: compare sigma^2
    let cutoff_sq = RANK_CUTOFF_REL * sigma_max * sigma_max;
    let retained: Vec<usize> = if sigma_max > 0.0 {
        order
            .iter()
            .copied()
            .take_while(|&i| sigma_all[i] > 0.0 && sigma_all[i] * sigma_all[i] >= cutoff_sq)
            .collect()
    } else {
        Vec::new()
    };

    let rank = retained.len();
    let s = m.n_cols();
    let mut sigma = Vec::with_capacity(rank);
    let mut modes = DMatrix::zeros(m.n_rows(), rank);
    let mut coeffs = DMatrix::zeros(rank, s);
    for (n, &idx) in retained.iter().enumerate() {
        sigma.push(sigma_all[idx]);
        modes.set_column(n, &u_all.column(idx));
        for col in 0..s {
            coeffs[(n, col)] = sigma_all[idx] * v_all[(col, idx)];
        }
    }
    apply_sign_convention(&mut modes, &mut coeffs);
    PodResult {
        modes,
        singular_values: sigma,
        temporal_coeffs: coeffs,
        weights: m.weights().cloned(),
        mean_subtracted: m.mean_subtracted(),
        stored_mean: m.stored_mean().cloned(),
    }
}

/// Fraction of total modal energy captured by the first `n` modes
/// (ratio of partial to full sum of squared singular values). 1.0 at
/// `n == rank`; the complementary truncation loss is `1 - retained`.
pub fn cumulative_energy(r: &PodResult, n: usize) -> Result<f64, PodError> {
    if n > r.rank() {
        return Err(PodError::ExceedsRank {
            requested: n,
            rank: r.rank(),
        });
    }
    if r.rank() == 0 {
        return Ok(1.0);
    }
    let total: f64 = r.singular_values.iter().map(|s| s * s).sum();
    let partial: f64 = r.singular_values[..n].iter().map(|s| s * s).sum();
    Ok(partial / total)
}

/// Energy fraction discarded when keeping `n` modes.
pub fn truncation_loss(r: &PodResult, n: usize) -> Result<f64, PodError> {
    Ok(1.0 - cumulative_energy(r, n)?)
}

/// Rebuilds the snapshot matrix from the first `n` modes (plus the stored
/// mean when the input had it removed).
pub fn reconstruct(r: &PodResult, n: usize) -> Result<SnapshotMatrix, PodError> {
    if n > r.rank() {
        return Err(PodError::ExceedsRank {
            requested: n,
            rank: r.rank(),
        });
    }
    let s = r.n_snapshots();
    let mut out = if n == 0 {
        DMatrix::zeros(r.modes.nrows(), s)
    } else {
        r.modes.columns(0, n) * r.temporal_coeffs.rows(0, n)
    };
    if r.mean_subtracted {
        let mean = r.stored_mean.as_ref().ok_or(PodError::MissingStoredMean)?;
        for c in 0..s {
            for row in 0..out.nrows() {
                out[(row, c)] += mean[row];
            }
        }
    }
    SnapshotMatrix::new(out, r.weights.clone())
}

/// Projects a snapshot vector onto the first `n_modes` modes, returning the
/// modal coefficients modes^T W (x - mean).
pub fn project(snap: &DVector<f64>, r: &PodResult, n_modes: usize) -> Result<DVector<f64>, PodError> {
    if snap.len() != r.modes.nrows() {
        return Err(PodError::LengthMismatch {
            expected: r.modes.nrows(),
            got: snap.len(),
        });
    }
    if n_modes > r.rank() {
        return Err(PodError::ExceedsRank {
            requested: n_modes,
            rank: r.rank(),
        });
    }
    let mut x = snap.clone();
    if r.mean_subtracted {
        let mean = r.stored_mean.as_ref().ok_or(PodError::MissingStoredMean)?;
        x -= mean;
    }
    if let Some(w) = &r.weights {
        for row in 0..x.len() {
            x[row] *= w[row];
        }
    }
    Ok(r.modes.columns(0, n_modes).transpose() * x)
}
