//! Manufactured solutions, error norms and the end-to-end MG-preconditioned solve.

use alloc::vec::Vec;

use crate::assembly::{DofLayout, ProblemData, SbmParameters};
use crate::basis::{map_from_reference, QuadratureDomain, QuadratureRule, ReferenceBasis, Tabulation};
use crate::geometry::{default_depth, shift_statistics, CellClassification, DeformedDomain, LevelSet};
use crate::linalg::{gmres, GmresConfig};
use crate::math::{cos, sin, sqrt};
use crate::mesh::{build_hierarchy as build_meshes, MeshBox, MeshLevel};
use crate::multigrid::{build_hierarchy, GeometryMode, Hierarchy, HierarchyOptions, MgConfig};
use crate::{Point, Result};

/// Exact solutions with their source `f = -Delta u` and boundary data `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manufactured {
    /// `u = 2 cos(x1) sin(x2)` (any dimension).
    Trigonometric,
    /// `u = x1 + x2`.
    Linear,
    /// `u = x1^2 - x2^2 + x1 x2`.
    Quadratic,
    /// `u = phi + 1` for the deformed domain, so `g = 1`.
    Deformed,
}

impl Manufactured {
    pub fn value(self, x: &Point) -> f64 {
        match self {
            Manufactured::Trigonometric => 2.0 * cos(x[0]) * sin(x[1]),
            Manufactured::Linear => x[0] + x[1],
            Manufactured::Quadratic => x[0] * x[0] - x[1] * x[1] + x[0] * x[1],
            Manufactured::Deformed => DeformedDomain.value(x) + 1.0,
        }
    }

    pub fn source(self, x: &Point) -> f64 {
        match self {
            Manufactured::Trigonometric => 4.0 * cos(x[0]) * sin(x[1]),
            Manufactured::Linear | Manufactured::Quadratic => 0.0,
            Manufactured::Deformed => -DeformedDomain.laplacian(x),
        }
    }

    pub fn dirichlet(self, x: &Point) -> f64 {
        match self {
            Manufactured::Deformed => 1.0,
            _ => self.value(x),
        }
    }
}

/// `|| u_h - u ||_{L2}` over the active cells, `degree + 2` Gauss points per axis.
pub fn l2_error(
    level: &MeshLevel,
    classification: &CellClassification,
    degree: usize,
    solution: &[f64],
    exact: &dyn Fn(&Point) -> f64,
) -> Result<f64> {
    let basis = ReferenceBasis::new(level.dim, degree)?;
    let rule = QuadratureRule::new(degree + 2, level.dim, QuadratureDomain::Cell)?;
    let tab = Tabulation::new(&basis, &rule.points);
    let layout = DofLayout::new(level, degree);
    let jac = level.cell_volume();
    let mut sum = 0.0;
    for cell in classification.active_cells() {
        let geom = level.cell(cell);
        let coeffs = &solution[layout.block(cell)];
        for q in 0..rule.len() {
            let uh: f64 = tab.values_at(q).iter().zip(coeffs).map(|(a, b)| a * b).sum();
            let x = map_from_reference(&geom, level.dim, &rule.points[q]);
            let e = uh - exact(&x);
            sum += e * e * rule.weights[q] * jac;
        }
    }
    Ok(sqrt(sum))
}

/// Everything needed for one solve on one finest level.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub mesh_box: MeshBox,
    pub level: usize,
    pub degree: usize,
    pub threshold: f64,
    pub depth: usize,
    pub params: SbmParameters,
    pub geometry: GeometryMode,
    pub mg: MgConfig,
    pub gmres: GmresConfig,
}

impl SolveConfig {
    /// Defaults on the standard box for the given dimension, level and degree.
    pub fn new(dim: usize, level: usize, degree: usize, threshold: f64) -> Result<Self> {
        Ok(SolveConfig {
            mesh_box: MeshBox::standard(dim)?,
            level,
            degree,
            threshold,
            depth: default_depth(dim),
            params: SbmParameters::default(),
            geometry: GeometryMode::Interpolated,
            mg: MgConfig {
                omega: MgConfig::default_omega(degree),
                ..MgConfig::default()
            },
            gmres: GmresConfig::default(),
        })
    }

    pub fn hierarchy_options(&self) -> HierarchyOptions {
        HierarchyOptions {
            degree: self.degree,
            threshold: self.threshold,
            depth: self.depth,
            params: self.params,
            geometry: self.geometry,
            mg: self.mg,
        }
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Degrees of freedom on active cells.
    pub dofs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub l2_error: f64,
    pub shift_min: f64,
    pub shift_max: f64,
    pub solution: Vec<f64>,
    pub mesh: MeshLevel,
    pub classification: CellClassification,
}

/// Builds the hierarchy for `phi` and `exact`, runs MG-preconditioned GMRES and
/// measures the error. A run that exhausts the iteration budget reports
/// `converged = false` with `iterations = max_iter`.
pub fn solve(config: &SolveConfig, phi: &dyn LevelSet, exact: Manufactured) -> Result<SolveReport> {
    let meshes = build_meshes(&config.mesh_box, config.level)?;
    let source = move |x: &Point| exact.source(x);
    let dirichlet = move |x: &Point| exact.dirichlet(x);
    let data = ProblemData {
        source: &source,
        dirichlet: &dirichlet,
    };
    let hierarchy = build_hierarchy(&meshes, phi, &config.hierarchy_options(), Some(data))?;
    let report = solve_with(&hierarchy, meshes.last().unwrap(), config, exact)?;
    Ok(report)
}

/// GMRES with one V-cycle of `hierarchy` as right preconditioner.
pub fn solve_with(
    hierarchy: &Hierarchy,
    mesh: &MeshLevel,
    config: &SolveConfig,
    exact: Manufactured,
) -> Result<SolveReport> {
    let finest = hierarchy.finest();
    let op = &finest.operator;
    let out = gmres(op, &op.rhs, hierarchy, &config.gmres)?;
    let l2 = l2_error(mesh, &finest.classification, finest.degree, &out.solution, &|x| exact.value(x))?;
    let (shift_min, shift_max) = if hierarchy.shifts.is_empty() {
        (0.0, 0.0)
    } else {
        shift_statistics(&hierarchy.shifts)?
    };
    Ok(SolveReport {
        dofs: finest.classification.n_active() * op.layout.dofs_per_cell,
        iterations: if out.converged { out.iterations } else { config.gmres.max_iter },
        converged: out.converged,
        l2_error: l2,
        shift_min,
        shift_max,
        solution: out.solution,
        mesh: mesh.clone(),
        classification: finest.classification.clone(),
    })
}
