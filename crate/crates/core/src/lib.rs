//! Desk-scale wake analysis toolkit.
//!
//! The crate bundles the numerical machinery needed to study the wake shed
//! behind a rotor on structured grids:
//!
//! - [`field`] — grid/snapshot data model, binary snapshot I/O, plane
//!   sampling and derived kinematic fields (gradient, strain rate,
//!   Q-criterion),
//! - [`pod`] — snapshot proper orthogonal decomposition with two
//!   independent factorization routes (method of snapshots and one-sided
//!   Jacobi SVD), energy spectra and reconstruction,
//! - [`synth`] — analytic field generators with known modal structure,
//!   used both as test oracles and as a stand-in for solver output,
//! - [`fsi`] — Newmark structural integration and the partitioned
//!   fluid-structure coupling loop with Aitken dynamic relaxation,
//! - [`morph`] — radial-basis-function mesh morphing with cell validity
//!   checking.

pub mod field;
pub mod fsi;
pub mod morph;
pub mod pod;
pub mod synth;

// matrix/vector types of the public API
pub use nalgebra;
