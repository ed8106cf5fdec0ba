//! Implicit geometry: level sets, cell classification and boundary projection.

pub mod classify;
pub mod levelset;
pub mod projection;

pub use classify::{
    cell_fractions, classify, default_depth, surrogate_boundary, volume_fraction, CellCategory,
    CellClassification, SurrogateFace,
};
pub use levelset::{
    interpolation_degree, AnalyticLevelSet, AxisBox, ConstantLevelSet, DeformedDomain, Geometry, Hessian,
    InterpolatedLevelSet, LevelSet, UnitBall,
};
pub use projection::{
    closest_point, shift_statistics, BoundaryProjector, FnProjector, LevelSetProjector, Projection, ShiftRecord,
    PROJECTION_TOL,
};
