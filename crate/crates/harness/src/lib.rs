//! Experiment driver for `sbm-core`: parameter sweeps, CSV tables, legacy VTK
//! output and the `sbm` command-line tool.

pub mod experiment;
pub mod records;
pub mod vtk;

pub use experiment::{
    observed_orders, project_check, run_complex_domain, run_convergence, run_eig1d, run_iterations, run_sweep,
    ExperimentConfig, ProjectionSummary,
};
pub use records::{read_csv, write_csv, EigRecord, ProjectionRecord, RunRecord};
pub use vtk::{write_vtk, write_vtk_to};
