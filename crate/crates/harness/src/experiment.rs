//! Sweeps over levels and activity thresholds.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use sbm_core::assembly::{PenaltyScaling, SbmParameters};
use sbm_core::basis::{QuadratureDomain, QuadratureRule};
use sbm_core::geometry::{
    classify, closest_point, default_depth, surrogate_boundary, Geometry, LevelSet, ShiftRecord,
};
use sbm_core::linalg::GmresConfig;
use sbm_core::mesh::{MeshBox, MeshLevel};
use sbm_core::multigrid::{GeometryMode, MgConfig};
use sbm_core::problem::{solve, Manufactured, SolveConfig};
use sbm_core::spectral1d::{max_imag_sweep, Spectral1dConfig};

use crate::records::{sort_runs, write_csv, EigRecord, ProjectionRecord, RunRecord};
use crate::vtk::write_vtk;

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub dim: usize,
    pub p: usize,
    pub min_level: usize,
    pub max_level: usize,
    pub lambdas: Vec<f64>,
    /// SSOR relaxation; `None` picks the degree default.
    pub omega: Option<f64>,
    pub sigma_gamma: f64,
    pub sigma_f: f64,
    pub scaling: PenaltyScaling,
    pub sweeps: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub out: Option<PathBuf>,
    pub vtk: bool,
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let params = SbmParameters::default();
        let gmres = GmresConfig::default();
        ExperimentConfig {
            geometry: Geometry::Disk,
            dim: 2,
            p: 1,
            min_level: 1,
            max_level: 5,
            lambdas: vec![1.0],
            omega: None,
            sigma_gamma: params.c_gamma,
            sigma_f: params.c_f,
            scaling: params.scaling,
            sweeps: 1,
            tol: gmres.rel_tol,
            max_iter: gmres.max_iter,
            out: None,
            vtk: false,
            timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            bail!("--dim must be 1, 2 or 3");
        }
        if self.min_level > self.max_level {
            bail!("minimum level {} exceeds maximum level {}", self.min_level, self.max_level);
        }
        if self.lambdas.is_empty() {
            bail!("at least one --lambda is required");
        }
        if let Some(w) = self.omega {
            if !(w > 0.0 && w < 2.0) {
                bail!("--omega must lie in (0, 2)");
            }
        }
        if self.sweeps == 0 {
            bail!("--sweeps must be positive");
        }
        self.params().validate()?;
        Ok(())
    }

    pub fn params(&self) -> SbmParameters {
        SbmParameters {
            alpha: 1.0,
            c_gamma: self.sigma_gamma,
            c_f: self.sigma_f,
            scaling: self.scaling,
        }
    }

    pub fn solve_config(&self, level: usize, lambda: f64) -> Result<SolveConfig> {
        let mut c = SolveConfig::new(self.dim, level, self.p, lambda)?;
        c.params = self.params();
        c.mg = MgConfig {
            omega: self.omega.unwrap_or_else(|| MgConfig::default_omega(self.p)),
            pre_sweeps: self.sweeps,
            post_sweeps: self.sweeps,
            ..MgConfig::default()
        };
        c.gmres = GmresConfig {
            rel_tol: self.tol,
            max_iter: self.max_iter,
        };
        c.geometry = GeometryMode::Interpolated;
        Ok(c)
    }
}

/// Solves every (lambda, level) pair. Solver failures are recorded as
/// `converged = false` and the sweep continues; setup errors abort it.
pub fn run_sweep(config: &ExperimentConfig, exact: Manufactured) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let phi = config.geometry.level_set(config.dim)?;
    let mut rows = Vec::new();
    for &lambda in &config.lambdas {
        for level in config.min_level..=config.max_level {
            let sc = config.solve_config(level, lambda)?;
            let start = Instant::now();
            let report = solve(&sc, phi.as_ref(), exact)
                .with_context(|| format!("solving level {level}, lambda {lambda}"))?;
            let seconds = if config.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            if config.vtk {
                if let Some(dir) = &config.out {
                    let path = dir.join(format!("solution_p{}_l{level}_lambda{lambda}.vtk", config.p));
                    write_vtk(&path, &report.mesh, &report.classification, config.p, &report.solution)?;
                }
            }
            rows.push(RunRecord {
                level,
                lambda,
                p: config.p,
                dofs: report.dofs,
                iterations: report.iterations,
                converged: report.converged,
                l2_error: report.l2_error,
                shift_min: report.shift_min,
                shift_max: report.shift_max,
                seconds,
            });
        }
    }
    sort_runs(&mut rows);
    Ok(rows)
}

fn finish(config: &ExperimentConfig, name: &str, rows: Vec<RunRecord>) -> Result<Vec<RunRecord>> {
    if let Some(dir) = &config.out {
        write_csv(&dir.join(format!("{name}_{}d_p{}.csv", config.dim, config.p)), &rows)?;
    }
    Ok(rows)
}

/// Convergence study with `u = 2 cos(x1) sin(x2)`.
pub fn run_convergence(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let rows = run_sweep(config, Manufactured::Trigonometric)?;
    finish(config, "converge", rows)
}

/// Iteration-count table; same solves as the convergence study.
pub fn run_iterations(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let rows = run_sweep(config, Manufactured::Trigonometric)?;
    finish(config, "iterations", rows)
}

/// Deformed domain with `u = phi + 1`, `g = 1`.
pub fn run_complex_domain(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    if config.dim != 2 {
        bail!("the deformed domain is two-dimensional");
    }
    let config = ExperimentConfig {
        geometry: Geometry::Deformed,
        ..config.clone()
    };
    let rows = run_sweep(&config, Manufactured::Deformed)?;
    finish(&config, "complex", rows)
}

/// Observed orders `log2(e_l / e_{l+1})` between consecutive levels of one
/// (p, lambda) series, as `(fine level, order)`.
pub fn observed_orders(rows: &[RunRecord], p: usize, lambda: f64) -> Vec<(usize, f64)> {
    let mut series: Vec<&RunRecord> = rows.iter().filter(|r| r.p == p && r.lambda == lambda).collect();
    series.sort_by_key(|r| r.level);
    series
        .windows(2)
        .filter(|w| w[1].level == w[0].level + 1)
        .map(|w| (w[1].level, (w[0].l2_error / w[1].l2_error).log2()))
        .collect()
}

pub fn run_eig1d(config: &Spectral1dConfig, out: Option<&PathBuf>) -> Result<Vec<EigRecord>> {
    let rows: Vec<EigRecord> = max_imag_sweep(config)?
        .into_iter()
        .map(|r| EigRecord {
            xi: r.xi,
            p: r.degree,
            formulation: r.formulation.name().to_string(),
            max_imag: r.max_imag,
        })
        .collect();
    if let Some(dir) = out {
        write_csv(&dir.join("eig1d.csv"), &rows)?;
    }
    Ok(rows)
}

/// Projection quality over all surrogate-boundary quadrature points of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSummary {
    pub record: ProjectionRecord,
    pub shifts: Vec<ShiftRecord>,
}

/// Projects the surrogate-boundary quadrature points of each level onto the
/// analytic boundary and reports residuals and shift extremes.
pub fn project_check(config: &ExperimentConfig, lambda: f64) -> Result<Vec<ProjectionSummary>> {
    config.validate()?;
    let phi = config.geometry.level_set(config.dim)?;
    let mesh_box = MeshBox::standard(config.dim)?;
    let mut out = Vec::new();
    for level in config.min_level..=config.max_level {
        let mesh = MeshLevel::new(&mesh_box, level)?;
        out.push(project_level(&mesh, phi.as_ref(), config, level, lambda)?);
    }
    if let Some(dir) = &config.out {
        let rows: Vec<ProjectionRecord> = out.iter().map(|s| s.record.clone()).collect();
        write_csv(&dir.join(format!("project_{}d_lambda{lambda}.csv", config.dim)), &rows)?;
    }
    Ok(out)
}

fn project_level(
    mesh: &MeshLevel,
    phi: &dyn LevelSet,
    config: &ExperimentConfig,
    level: usize,
    lambda: f64,
) -> Result<ProjectionSummary> {
    let cls = classify(mesh, phi, lambda, default_depth(config.dim))?;
    let faces = surrogate_boundary(mesh, &cls);
    let h = mesh.h();
    let mut shifts = Vec::new();
    let (mut max_phi, mut max_stat, mut fallbacks) = (0.0f64, 0.0f64, 0);
    for face in &faces {
        let rule = QuadratureRule::new(
            config.p + 1,
            config.dim,
            QuadratureDomain::Face {
                axis: face.axis,
                side: face.side,
            },
        )?;
        let cell = mesh.cell(face.cell);
        for xi in &rule.points {
            let xt = sbm_core::basis::map_from_reference(&cell, config.dim, xi);
            let proj = closest_point(&xt, phi)?;
            let x = proj.point;
            max_phi = max_phi.max(phi.value(&x).abs());
            // the residual of x - xt being parallel to grad phi
            let g = phi.gradient(&x);
            let gn: f64 = g[..config.dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            let d: Vec<f64> = (0..config.dim).map(|k| x[k] - xt[k]).collect();
            let dn: f64 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn > 0.0 && dn > 0.0 {
                let c: f64 = (0..config.dim).map(|k| d[k] * g[k]).sum::<f64>() / (dn * gn);
                max_stat = max_stat.max((1.0 - c.abs()) * dn);
            }
            if proj.fallback {
                fallbacks += 1;
            }
            shifts.push(ShiftRecord::new(xt, proj, face.normal(), h));
        }
    }
    let (shift_min, shift_max) = if shifts.is_empty() {
        (0.0, 0.0)
    } else {
        sbm_core::geometry::shift_statistics(&shifts)?
    };
    Ok(ProjectionSummary {
        record: ProjectionRecord {
            level,
            points: shifts.len(),
            max_phi,
            max_stationarity: max_stat,
            fallbacks,
            shift_min,
            shift_max,
        },
        shifts,
    })
}
