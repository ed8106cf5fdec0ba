//! Spectrum of the single-cell 1D shifted Nitsche stiffness matrix.
//!
//! The surrogate is the unit cell `[0, 1]`, the true domain is `[0, xi]`. The
//! left end is a conforming Nitsche boundary, the right end is shifted by
//! `xi - 1`. The matrix comes from the same kernels as the multi-dimensional
//! assembly.

use alloc::vec::Vec;

use crate::assembly::{assemble_sbm_boundary, assemble_volume_and_faces, ElementTables, PenaltyScaling, RowBlock, SbmParameters};
use crate::geometry::{surrogate_boundary, CellClassification, FnProjector};
use crate::linalg::{small_eig, Complex, DenseMatrix};
use crate::math::abs;
use crate::mesh::{MeshBox, MeshLevel};
use crate::{Error, Point, Result};

/// Boundary formulation of the 1D study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Formulation {
    /// `alpha = +1`, `sigma = 5 p^2` (the cell has unit size).
    QuasiSymmetric,
    /// `alpha = -1`, `sigma = 0`.
    PenaltyFree,
}

impl Formulation {
    pub const ALL: [Formulation; 2] = [Formulation::QuasiSymmetric, Formulation::PenaltyFree];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::QuasiSymmetric => "quasi_symmetric",
            Formulation::PenaltyFree => "penalty_free",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Formulation::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn parameters(self) -> SbmParameters {
        let (alpha, c_gamma) = match self {
            Formulation::QuasiSymmetric => (1.0, 5.0),
            Formulation::PenaltyFree => (-1.0, 0.0),
        };
        SbmParameters {
            alpha,
            c_gamma,
            c_f: 1.0,
            scaling: PenaltyScaling::P2OverH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectral1dConfig {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_step: f64,
    pub degrees: Vec<usize>,
    pub formulations: Vec<Formulation>,
}

impl Default for Spectral1dConfig {
    fn default() -> Self {
        Spectral1dConfig {
            xi_min: 0.4,
            xi_max: 2.0,
            xi_step: 0.01,
            degrees: alloc::vec![1, 2, 3],
            formulations: Formulation::ALL.to_vec(),
        }
    }
}

impl Spectral1dConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi_min > 0.0) || !(self.xi_max >= self.xi_min) || !self.xi_max.is_finite() {
            return Err(Error::invalid("xi range must satisfy 0 < xi_min <= xi_max"));
        }
        if !(self.xi_step > 0.0) {
            return Err(Error::invalid("xi step must be positive"));
        }
        if self.degrees.iter().any(|&p| !(1..=3).contains(&p)) {
            return Err(Error::invalid("1D study degrees must be 1, 2 or 3"));
        }
        Ok(())
    }

    /// Sample points `xi_min + k step`, up to `xi_max` inclusive.
    pub fn samples(&self) -> Vec<f64> {
        let n = ((self.xi_max - self.xi_min) / self.xi_step + 1e-9) as usize;
        (0..=n).map(|k| self.xi_min + k as f64 * self.xi_step).collect()
    }
}

/// One row of the sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRow {
    pub xi: f64,
    pub degree: usize,
    pub formulation: Formulation,
    pub max_imag: f64,
}

/// The `(p+1) x (p+1)` system matrix for true domain `[0, xi]`.
pub fn stiffness_1d(xi: f64, degree: usize, formulation: Formulation) -> Result<DenseMatrix> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::invalid("xi must be positive"));
    }
    if !(1..=3).contains(&degree) {
        return Err(Error::invalid("1D study degrees must be 1, 2 or 3"));
    }
    let mesh = MeshLevel::new(&MeshBox::new(1, 0.0, 1.0, 1)?, 0)?;
    let params = formulation.parameters();
    let tables = ElementTables::new(&mesh, degree, &params, degree + 2)?;
    let cls = CellClassification::all_active(1);
    let faces = surrogate_boundary(&mesh, &cls);
    let projector = FnProjector(move |x: &Point| if x[0] < 0.5 { [0.0; 3] } else { [xi, 0.0, 0.0] });
    // the block may be singular for some xi, so it is read off unfactored
    let mut row = RowBlock::new(0, degree + 1);
    assemble_volume_and_faces(&mesh, &cls, &tables, &mut row);
    let mut shifts = Vec::new();
    for face in &faces {
        assemble_sbm_boundary(&mesh, &cls, &tables, &params, face, &projector, None, &mut row, &mut shifts)?;
    }
    DenseMatrix::from_row_major(degree + 1, degree + 1, row.diagonal)
}

pub fn spectrum_1d(xi: f64, degree: usize, formulation: Formulation) -> Result<Vec<Complex>> {
    small_eig(&stiffness_1d(xi, degree, formulation)?)
}

pub fn max_imag(eigenvalues: &[Complex]) -> f64 {
    eigenvalues.iter().map(|z| abs(z.im)).fold(0.0, f64::max)
}

/// Rows ordered by formulation, then degree, then `xi`.
pub fn max_imag_sweep(config: &Spectral1dConfig) -> Result<Vec<SpectralRow>> {
    config.validate()?;
    let xs = config.samples();
    let mut rows = Vec::with_capacity(xs.len() * config.degrees.len() * config.formulations.len());
    for &formulation in &config.formulations {
        for &degree in &config.degrees {
            for &xi in &xs {
                rows.push(SpectralRow {
                    xi,
                    degree,
                    formulation,
                    max_imag: max_imag(&spectrum_1d(xi, degree, formulation)?),
                });
            }
        }
    }
    Ok(rows)
}
