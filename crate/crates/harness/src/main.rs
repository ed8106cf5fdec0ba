use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use sbm_core::assembly::PenaltyScaling;
use sbm_core::geometry::Geometry;
use sbm_core::spectral1d::{Formulation, Spectral1dConfig};
use sbm_harness::{
    observed_orders, project_check, run_complex_domain, run_convergence, run_eig1d, run_iterations,
    ExperimentConfig, RunRecord,
};

/// Shifted boundary DG Poisson solver with hp-multigrid preconditioned GMRES.
#[derive(Parser)]
#[command(name = "sbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study with u = 2 cos(x1) sin(x2).
    Converge(SweepArgs),
    /// GMRES iteration counts per level and threshold.
    Iterations(SweepArgs),
    /// Deformed domain with u = phi + 1.
    Complex(SweepArgs),
    /// Maximal imaginary eigenvalue part of the 1D single-cell matrix.
    Eig1d(EigArgs),
    /// Closest-point projection residuals and shift statistics.
    ProjectCheck(SweepArgs),
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// disk (unit disk or sphere) or deformed
    #[arg(long, default_value = "disk")]
    geometry: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Finest refinement level.
    #[arg(long, default_value_t = 5)]
    levels: usize,
    /// Coarsest level reported.
    #[arg(long, default_value_t = 1)]
    min_level: usize,
    /// Activity threshold; repeat for several values.
    #[arg(long = "lambda", default_values_t = vec![1.0])]
    lambdas: Vec<f64>,
    /// SSOR relaxation (default 1, or 0.8 for p >= 3).
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    sigma_gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_f: f64,
    /// p2_over_h, pp1_over_h or flat
    #[arg(long, default_value = "pp1_over_h")]
    penalty_scaling: String,
    /// Pre- and post-smoothing sweeps.
    #[arg(long, default_value_t = 1)]
    sweeps: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one VTK file per (level, lambda) into --out.
    #[arg(long)]
    vtk: bool,
    /// Report zero seconds so repeated runs give identical CSVs.
    #[arg(long)]
    no_timing: bool,
}

impl SweepArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig {
            geometry: Geometry::from_name(&self.geometry)
                .ok_or_else(|| anyhow!("unknown geometry '{}'", self.geometry))?,
            dim: self.dim,
            p: self.p,
            min_level: self.min_level,
            max_level: self.levels,
            lambdas: self.lambdas.clone(),
            omega: self.omega,
            sigma_gamma: self.sigma_gamma,
            sigma_f: self.sigma_f,
            scaling: PenaltyScaling::from_name(&self.penalty_scaling)
                .ok_or_else(|| anyhow!("unknown penalty scaling '{}'", self.penalty_scaling))?,
            sweeps: self.sweeps,
            tol: self.tol,
            max_iter: self.max_iter,
            out: self.out.clone(),
            vtk: self.vtk,
            timing: !self.no_timing,
        })
    }
}

#[derive(Args)]
struct EigArgs {
    #[arg(long, default_value_t = 0.4)]
    xi_min: f64,
    #[arg(long, default_value_t = 2.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 0.01)]
    xi_step: f64,
    /// Polynomial degree; repeat for several.
    #[arg(long = "p", default_values_t = vec![1, 2, 3])]
    degrees: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn print_runs(rows: &[RunRecord]) {
    println!(
        "{:>2} {:>6} {:>2} {:>9} {:>5} {:>5} {:>11} {:>7} {:>7} {:>8}",
        "l", "lambda", "p", "dofs", "its", "conv", "l2_error", "s_min", "s_max", "seconds"
    );
    for r in rows {
        println!(
            "{:>2} {:>6} {:>2} {:>9} {:>5} {:>5} {:>11.4e} {:>7.3} {:>7.3} {:>8.2}",
            r.level, r.lambda, r.p, r.dofs, r.iterations, r.converged, r.l2_error, r.shift_min, r.shift_max, r.seconds
        );
    }
}

fn print_orders(rows: &[RunRecord]) {
    let Some(p) = rows.first().map(|r| r.p) else {
        return;
    };
    let mut lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    lambdas.dedup();
    for lambda in lambdas {
        let orders: Vec<String> = observed_orders(rows, p, lambda)
            .iter()
            .map(|(l, o)| format!("{}->{l}: {o:.2}", l - 1))
            .collect();
        println!("orders lambda={lambda}: {}", orders.join(", "));
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Converge(args) => {
            let rows = run_convergence(&args.config()?)?;
            print_runs(&rows);
            print_orders(&rows);
        }
        Command::Iterations(args) => print_runs(&run_iterations(&args.config()?)?),
        Command::Complex(args) => {
            let rows = run_complex_domain(&args.config()?)?;
            print_runs(&rows);
            print_orders(&rows);
        }
        Command::Eig1d(args) => {
            let config = Spectral1dConfig {
                xi_min: args.xi_min,
                xi_max: args.xi_max,
                xi_step: args.xi_step,
                degrees: args.degrees,
                formulations: Formulation::ALL.to_vec(),
            };
            let rows = run_eig1d(&config, args.out.as_ref())?;
            if args.out.is_none() {
                println!("xi,p,formulation,max_imag");
                for r in rows {
                    println!("{},{},{},{}", r.xi, r.p, r.formulation, r.max_imag);
                }
            }
        }
        Command::ProjectCheck(args) => {
            let config = args.config()?;
            for &lambda in &config.lambdas {
                for s in project_check(&config, lambda)? {
                    let r = s.record;
                    println!(
                        "lambda={lambda} level={} points={} max|phi|={:.2e} stationarity={:.2e} fallbacks={} shifts=[{:.3}, {:.3}]",
                        r.level, r.points, r.max_phi, r.max_stationarity, r.fallbacks, r.shift_min, r.shift_max
                    );
                }
            }
        }
    }
    Ok(())
}
