//! Shifted boundary discontinuous Galerkin solver for the Poisson problem on
//! implicitly defined domains, preconditioned by an hp-multigrid V-cycle with a
//! cell-wise SSOR smoother.
//!
//! The crate is `no_std` (with `alloc`); everything here is pure numerics.
//! IO, the command-line driver and the file formats live in `sbm-harness`.
//!
//! Layout:
//! - [`mesh`]: Cartesian background mesh hierarchy and face topology.
//! - [`geometry`]: level-set domains, cell classification, closest-point projection.
//! - [`basis`]: tensor-product Lagrange bases and Gauss rules on the reference cell.
//! - [`assembly`]: SIP-DG volume/face terms, shifted Nitsche boundary terms, level operators.
//! - [`linalg`]: CSR matrices, dense LU, GMRES, small nonsymmetric eigensolver.
//! - [`multigrid`]: hp hierarchy, transfer operators, smoothers, V-cycle.
//! - [`spectral1d`]: single-cell 1D eigenvalue study.
//! - [`problem`]: manufactured solutions, error norms and the end-to-end solve.
#![cfg_attr(not(feature = "std"), no_std)]
// index loops mirror the tensor-product formulas; negated comparisons reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod assembly;
pub mod basis;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod multigrid;
pub mod problem;
pub mod spectral1d;

mod math;

pub use error::{Error, Result};

/// A point in up to three dimensions; unused trailing components are zero.
pub type Point = [f64; 3];

/// Maximum spatial dimension supported by the crate.
pub const MAX_DIM: usize = 3;
