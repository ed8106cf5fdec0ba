//! hp-multigrid: geometric levels at degree 1 followed by degree levels on
//! the finest mesh, rediscretized on every level, used as a single V-cycle
//! preconditioner.

pub mod smoother;
pub mod transfer;

use alloc::vec;
use alloc::vec::Vec;

pub use smoother::{smooth_block_jacobi, smooth_forward, smooth_ssor};
pub use transfer::TransferOperator;

use crate::assembly::{assemble_level, ElementTables, LevelOperator, ProblemData, SbmParameters};
use crate::geometry::{
    classify, interpolation_degree, surrogate_boundary, CellClassification, InterpolatedLevelSet, LevelSet,
    LevelSetProjector, ShiftRecord,
};
use crate::linalg::{LinearOperator, LuFactor, Preconditioner};
use crate::mesh::MeshLevel;
use crate::{Error, Result};

pub const DEFAULT_COARSE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    Ssor,
    BlockJacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgConfig {
    pub omega: f64,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub smoother: SmootherKind,
    pub coarse_cap: usize,
}

impl Default for MgConfig {
    fn default() -> Self {
        MgConfig {
            omega: 1.0,
            pre_sweeps: 1,
            post_sweeps: 1,
            smoother: SmootherKind::Ssor,
            coarse_cap: DEFAULT_COARSE_CAP,
        }
    }
}

impl MgConfig {
    /// Default relaxation for degree `p`.
    pub fn default_omega(p: usize) -> f64 {
        if p >= 3 {
            0.8
        } else {
            1.0
        }
    }
}

/// Which level set the classification and projection see on each mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryMode {
    Analytic,
    /// Lagrange interpolant of the level set on each mesh level.
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    pub degree: usize,
    pub threshold: f64,
    pub depth: usize,
    pub params: SbmParameters,
    pub geometry: GeometryMode,
    pub mg: MgConfig,
}

/// One level of the hierarchy.
#[derive(Debug, Clone)]
pub struct MgLevel {
    pub mesh_level: usize,
    pub degree: usize,
    pub classification: CellClassification,
    pub operator: LevelOperator,
}

/// Levels, transfers and coarse factorization; `levels[0]` is the coarsest.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<MgLevel>,
    /// `transfers[k]` maps level `k` to level `k + 1`.
    pub transfers: Vec<TransferOperator>,
    pub config: MgConfig,
    /// Shift records of the finest level's surrogate boundary.
    pub shifts: Vec<ShiftRecord>,
    coarse: LuFactor,
}

fn mesh_geometry(
    mesh: &MeshLevel,
    phi: &dyn LevelSet,
    degree: usize,
    opts: &HierarchyOptions,
) -> Result<(CellClassification, Option<InterpolatedLevelSet>)> {
    match opts.geometry {
        GeometryMode::Analytic => Ok((classify(mesh, phi, opts.threshold, opts.depth)?, None)),
        GeometryMode::Interpolated => {
            let interp = InterpolatedLevelSet::new(phi, mesh, interpolation_degree(degree))?;
            let cls = classify(mesh, &interp, opts.threshold, opts.depth)?;
            Ok((cls, Some(interp)))
        }
    }
}

/// Builds the hierarchy over `meshes` (coarsest first). The right-hand side of
/// the finest level is assembled from `data`; coarser levels carry none.
pub fn build_hierarchy(
    meshes: &[MeshLevel],
    phi: &dyn LevelSet,
    opts: &HierarchyOptions,
    data: Option<ProblemData<'_>>,
) -> Result<Hierarchy> {
    if meshes.is_empty() {
        return Err(Error::invalid("at least one mesh level is required"));
    }
    if opts.degree == 0 || opts.degree > crate::basis::MAX_DEGREE {
        return Err(Error::invalid("polynomial degree must be in 1..=8"));
    }
    let finest = meshes.len() - 1;
    let p = opts.degree;
    let mut specs: Vec<(usize, usize)> = (0..=finest).map(|m| (m, 1)).collect();
    specs.extend((2..=p).map(|d| (finest, d)));

    let mut levels: Vec<MgLevel> = Vec::with_capacity(specs.len());
    let mut transfers = Vec::with_capacity(specs.len().saturating_sub(1));
    let mut shifts = Vec::new();
    let mut finest_geom: Option<(CellClassification, Option<InterpolatedLevelSet>)> = None;
    for (k, &(m, degree)) in specs.iter().enumerate() {
        let mesh = &meshes[m];
        let owned;
        let (cls, interp) = if m == finest {
            if finest_geom.is_none() {
                finest_geom = Some(mesh_geometry(mesh, phi, p, opts)?);
            }
            let g = finest_geom.as_ref().unwrap();
            (&g.0, g.1.as_ref())
        } else {
            owned = mesh_geometry(mesh, phi, 1, opts)?;
            (&owned.0, owned.1.as_ref())
        };
        if cls.n_active() == 0 {
            return Err(Error::EmptyActiveSet { level: k });
        }
        let tables = ElementTables::standard(mesh, degree, &opts.params)?;
        let faces = surrogate_boundary(mesh, cls);
        let top = k + 1 == specs.len();
        let level_data = if top { data } else { None };
        let assembled = match interp {
            Some(ip) => assemble_level(mesh, cls, &tables, &opts.params, &faces, &LevelSetProjector(ip), level_data)?,
            None => assemble_level(mesh, cls, &tables, &opts.params, &faces, &LevelSetProjector(phi), level_data)?,
        };
        if top {
            shifts = assembled.shifts;
        }
        if k > 0 {
            let prev = &levels[k - 1];
            let t = if prev.mesh_level == m {
                TransferOperator::degree(mesh.dim, prev.degree, degree, &cls.active)?
            } else {
                TransferOperator::geometric(
                    &meshes[prev.mesh_level],
                    mesh,
                    degree,
                    &prev.classification.active,
                    &cls.active,
                )?
            };
            transfers.push(t);
        }
        levels.push(MgLevel {
            mesh_level: m,
            degree,
            classification: cls.clone(),
            operator: assembled.operator,
        });
    }
    Hierarchy::new(levels, transfers, opts.mg, shifts)
}

impl Hierarchy {
    /// Assembles a hierarchy from prebuilt levels and transfers.
    pub fn new(
        levels: Vec<MgLevel>,
        transfers: Vec<TransferOperator>,
        config: MgConfig,
        shifts: Vec<ShiftRecord>,
    ) -> Result<Self> {
        if levels.is_empty() || transfers.len() + 1 != levels.len() {
            return Err(Error::invalid("hierarchy needs one transfer between consecutive levels"));
        }
        let coarse_op = &levels[0].operator;
        let size = coarse_op.size();
        if size > config.coarse_cap {
            return Err(Error::CoarseTooLarge {
                size,
                cap: config.coarse_cap,
            });
        }
        let coarse = LuFactor::new(&coarse_op.matrix.to_dense(), 1e-14)?;
        Ok(Hierarchy {
            levels,
            transfers,
            config,
            shifts,
            coarse,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest(&self) -> &MgLevel {
        self.levels.last().unwrap()
    }

    pub fn smooth(&self, level: usize, rhs: &[f64], x: &mut [f64], sweeps: usize) {
        let op = &self.levels[level].operator;
        match self.config.smoother {
            SmootherKind::Ssor => smooth_ssor(op, rhs, x, self.config.omega, sweeps),
            SmootherKind::BlockJacobi => smooth_block_jacobi(op, rhs, x, self.config.omega, sweeps),
        }
    }

    /// Exact solve on the coarsest level.
    pub fn coarse_solve(&self, rhs: &[f64], x: &mut [f64]) {
        x.copy_from_slice(rhs);
        self.coarse.solve_in_place(x);
    }

    /// One V-cycle for `A_level x = rhs`, updating `x` in place.
    pub fn v_cycle(&self, level: usize, rhs: &[f64], x: &mut [f64]) {
        if level == 0 {
            self.coarse_solve(rhs, x);
            return;
        }
        self.smooth(level, rhs, x, self.config.pre_sweeps);
        let op = &self.levels[level].operator;
        let size = op.size();
        let mut r = vec![0.0; size];
        op.matrix.residual_rows(0..size, rhs, x, &mut r);
        let t = &self.transfers[level - 1];
        let mut rc = vec![0.0; t.coarse_size()];
        t.restrict(&r, &mut rc);
        drop(r);
        let mut ec = vec![0.0; rc.len()];
        self.v_cycle(level - 1, &rc, &mut ec);
        t.prolongate_add(&ec, x);
        self.smooth(level, rhs, x, self.config.post_sweeps);
    }
}

impl Preconditioner for Hierarchy {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.iter_mut().for_each(|v| *v = 0.0);
        self.v_cycle(self.levels.len() - 1, r, z);
        Ok(())
    }
}

impl LinearOperator for LevelOperator {
    fn size(&self) -> usize {
        self.layout.size()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matrix.spmv_into(x, y);
    }
}
