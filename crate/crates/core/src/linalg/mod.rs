//! Sparse and dense linear algebra used by the solver.

pub mod dense;
pub mod eig;
pub mod gmres;
pub mod sparse;

pub use dense::{direct_solve, DenseMatrix, LuFactor};
pub use eig::{small_eig, Complex};
pub use gmres::{gmres, GmresConfig, GmresOutcome};
pub use sparse::CsrMatrix;

use crate::Result;

/// A square linear map `y = A x`.
pub trait LinearOperator {
    fn size(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// A fixed linear approximation of `A^{-1}`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()>;
}

/// The identity preconditioner.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

impl<T: Preconditioner + ?Sized> Preconditioner for &T {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (**self).apply(r, z)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn size(&self) -> usize {
        (**self).size()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}
