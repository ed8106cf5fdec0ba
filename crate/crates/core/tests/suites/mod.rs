//! Randomized invariants of the building blocks, shared by the `properties`
//! test target and the acceptance runner.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use sbm_core::assembly::{assemble_level, ElementTables, SbmParameters};
use sbm_core::basis::ReferenceBasis;
use sbm_core::geometry::{closest_point, surrogate_boundary, CellClassification, FnProjector, UnitBall};
use sbm_core::linalg::{direct_solve, small_eig, DenseMatrix};
use sbm_core::mesh::{MeshBox, MeshLevel};
use sbm_core::multigrid::{smooth_ssor, TransferOperator};
use sbm_core::Point;

type Check = std::result::Result<(), TestCaseError>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn active_mask(bits: &[bool], n: usize) -> Vec<bool> {
    (0..n).map(|i| bits[i % bits.len()]).collect()
}

fn transpose_pair(t: &TransferOperator, seed: f64) -> Check {
    let e: Vec<f64> = (0..t.coarse_size()).map(|i| (seed * (i as f64 + 1.0)).sin()).collect();
    let r: Vec<f64> = (0..t.fine_size()).map(|i| (seed * (i as f64 + 0.5)).cos()).collect();
    let mut pe = vec![0.0; t.fine_size()];
    t.prolongate(&e, &mut pe);
    let mut rr = vec![0.0; t.coarse_size()];
    t.restrict(&r, &mut rr);
    let (a, b) = (dot(&r, &pe), dot(&rr, &e));
    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    Ok(())
}

pub fn transfer_transpose((dim, degree, bits, seed): (usize, usize, Vec<bool>, f64)) -> Check {
    let b = MeshBox::new(dim, -1.0, 1.0, 2).unwrap();
    let coarse = MeshLevel::new(&b, 0).unwrap();
    let fine = MeshLevel::new(&b, 1).unwrap();
    let ca = active_mask(&bits, coarse.n_cells());
    let fa = active_mask(&bits, fine.n_cells());
    transpose_pair(&TransferOperator::geometric(&coarse, &fine, degree, &ca, &fa).unwrap(), seed)?;
    transpose_pair(&TransferOperator::degree(dim, degree, degree + 1, &fa).unwrap(), seed)
}

pub fn transfer_cases() -> impl Strategy<Value = (usize, usize, Vec<bool>, f64)> {
    (1usize..=3, 1usize..=3, prop::collection::vec(any::<bool>(), 1..9), 0.1f64..10.0)
}

pub fn ssor_single_cell((dim, degree, shift, seed): (usize, usize, f64, f64)) -> Check {
    let m = MeshLevel::new(&MeshBox::new(dim, 0.0, 1.0, 1).unwrap(), 0).unwrap();
    let params = SbmParameters::default();
    let t = ElementTables::standard(&m, degree, &params).unwrap();
    let cls = CellClassification::all_active(1);
    let faces = surrogate_boundary(&m, &cls);
    // dilate the boundary about the cell center
    let proj = FnProjector(move |x: &Point| {
        let mut y = *x;
        for k in 0..dim {
            y[k] += shift * (x[k] - 0.5);
        }
        y
    });
    let op = assemble_level(&m, &cls, &t, &params, &faces, &proj, None).unwrap().operator;
    let b: Vec<f64> = (0..op.size()).map(|i| (seed * (i as f64 + 1.0)).sin()).collect();
    let mut x = vec![0.0; op.size()];
    smooth_ssor(&op, &b, &mut x, 1.0, 1);
    let want = direct_solve(&op.matrix.to_dense(), &b).unwrap();
    let scale = want.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (u, v) in x.iter().zip(&want) {
        prop_assert!((u - v).abs() <= 1e-10 * scale);
    }
    Ok(())
}

pub fn ssor_cases() -> impl Strategy<Value = (usize, usize, f64, f64)> {
    (1usize..=3, 1usize..=3, -0.4f64..0.4, 0.1f64..10.0)
}

pub fn partition_of_unity((dim, degree, x): (usize, usize, [f64; 3])) -> Check {
    let basis = ReferenceBasis::new(dim, degree).unwrap();
    let (v, g) = basis.eval(&x, true);
    let s: f64 = v.iter().sum();
    prop_assert!((s - 1.0).abs() <= 1e-10 * (1.0 + v.iter().map(|a| a.abs()).sum::<f64>()));
    let g = g.unwrap();
    for k in 0..dim {
        let gs: f64 = g.iter().map(|gi| gi[k]).sum();
        prop_assert!(gs.abs() <= 1e-9 * (1.0 + g.iter().map(|gi| gi[k].abs()).sum::<f64>()));
    }
    Ok(())
}

/// Points include ones well outside the reference cell.
pub fn unity_cases() -> impl Strategy<Value = (usize, usize, [f64; 3])> {
    (1usize..=3, 1usize..=6, prop::array::uniform3(-1.5f64..2.5))
}

pub fn gradient_fd((dim, degree, x): (usize, usize, [f64; 3])) -> Check {
    let basis = ReferenceBasis::new(dim, degree).unwrap();
    let (_, g) = basis.eval(&x, true);
    let g = g.unwrap();
    let eps = 1e-6;
    for k in 0..dim {
        let mut xp = x;
        let mut xm = x;
        xp[k] += eps;
        xm[k] -= eps;
        let (vp, _) = basis.eval(&xp, false);
        let (vm, _) = basis.eval(&xm, false);
        for i in 0..basis.len() {
            let fd = (vp[i] - vm[i]) / (2.0 * eps);
            prop_assert!((fd - g[i][k]).abs() <= 1e-6 * (1.0 + g[i][k].abs()), "i={} k={}", i, k);
        }
    }
    Ok(())
}

pub fn gradient_cases() -> impl Strategy<Value = (usize, usize, [f64; 3])> {
    (1usize..=3, 1usize..=5, prop::array::uniform3(0.0f64..1.0))
}

pub fn eig_trace((n, entries): (usize, Vec<f64>)) -> Check {
    let m = DenseMatrix::from_row_major(n, n, entries[..n * n].to_vec()).unwrap();
    let ev = small_eig(&m).unwrap();
    prop_assert_eq!(ev.len(), n);
    let re: f64 = ev.iter().map(|z| z.re).sum();
    let im: f64 = ev.iter().map(|z| z.im).sum();
    let scale = (1.0 + m.norm()) * n as f64;
    prop_assert!((re - m.trace()).abs() <= 1e-9 * scale);
    prop_assert!(im.abs() <= 1e-9 * scale);
    Ok(())
}

pub fn eig_cases() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=12, prop::collection::vec(-10.0f64..10.0, 144))
}

pub fn disk_projection((r, t): (f64, f64)) -> Check {
    let xt = [r * t.cos(), r * t.sin(), 0.0];
    let disk = UnitBall { dim: 2 };
    let p = closest_point(&xt, &disk).unwrap();
    prop_assert!((p.point[0] - t.cos()).abs() <= 1e-8);
    prop_assert!((p.point[1] - t.sin()).abs() <= 1e-8);
    let again = closest_point(&p.point, &disk).unwrap();
    prop_assert!((again.point[0] - p.point[0]).hypot(again.point[1] - p.point[1]) <= 1e-8);
    Ok(())
}

pub fn projection_cases() -> impl Strategy<Value = (f64, f64)> {
    (0.05f64..5.0, 0.0f64..std::f64::consts::TAU)
}

fn run<S: Strategy>(cases: u32, strategy: S, check: fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

/// Every suite by name.
pub fn run_suite(name: &str, cases: u32) -> Result<(), String> {
    match name {
        "transfer_transpose" => run(cases, transfer_cases(), transfer_transpose),
        "ssor_single_cell" => run(cases, ssor_cases(), ssor_single_cell),
        "partition_of_unity" => run(cases, unity_cases(), partition_of_unity),
        "gradient_fd" => run(cases, gradient_cases(), gradient_fd),
        "eig_trace" => run(cases, eig_cases(), eig_trace),
        "disk_projection" => run(cases, projection_cases(), disk_projection),
        _ => Err(format!("unknown suite {name}")),
    }
}

pub const SUITES: [&str; 6] = [
    "transfer_transpose",
    "ssor_single_cell",
    "partition_of_unity",
    "gradient_fd",
    "eig_trace",
    "disk_projection",
];
