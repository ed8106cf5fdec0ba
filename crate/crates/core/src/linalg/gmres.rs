//! Full (unrestarted) right-preconditioned GMRES with modified Gram-Schmidt.
//!
//! Right preconditioning keeps the Arnoldi residual estimate equal to the
//! residual of the unpreconditioned system, so the stopping test is on
//! `||b - A x|| / ||b||` directly.

use alloc::vec;
use alloc::vec::Vec;

use super::{LinearOperator, Preconditioner};
use crate::math::{abs, hypot, norm, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        GmresConfig {
            rel_tol: 1e-12,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual estimate after each iteration (index 0 is the initial residual).
    pub residual_history: Vec<f64>,
    /// `||b - A x|| / ||b||` recomputed from the returned solution.
    pub true_residual: f64,
}

const BREAKDOWN: f64 = 1e-30;

pub fn gmres<A, P>(a: &A, b: &[f64], precond: &P, config: &GmresConfig) -> Result<GmresOutcome>
where
    A: LinearOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = a.size();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if !(config.rel_tol > 0.0) {
        return Err(Error::invalid("GMRES tolerance must be positive"));
    }
    let beta = norm(b);
    if beta == 0.0 {
        return Ok(GmresOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            converged: true,
            residual_history: vec![0.0],
            true_residual: 0.0,
        });
    }

    let m = config.max_iter;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(b.iter().map(|v| v / beta).collect());
    // Hessenberg columns after rotation, i.e. the R factor stored column-wise
    let mut r_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut cs: Vec<f64> = Vec::with_capacity(m);
    let mut sn: Vec<f64> = Vec::with_capacity(m);
    let mut g = vec![0.0; m + 1];
    g[0] = beta;
    let mut history = vec![1.0];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    for j in 0..m {
        precond.apply(&basis[j], &mut z)?;
        a.apply(&z, &mut w);
        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
            h[i] = hij;
            for (wk, vk) in w.iter_mut().zip(v) {
                *wk -= hij * vk;
            }
        }
        let h_next = norm(&w);
        h[j + 1] = h_next;

        for i in 0..j {
            let t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        let denom = hypot(h[j], h[j + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[j] / denom, h[j + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        h[j] = c * h[j] + s * h[j + 1];
        h[j + 1] = 0.0;
        g[j + 1] = -s * g[j];
        g[j] *= c;
        h.truncate(j + 1);
        r_cols.push(h);

        iterations = j + 1;
        let rel = abs(g[j + 1]) / beta;
        history.push(rel);

        if h_next < BREAKDOWN {
            // Invariant Krylov space: the least-squares solution is exact unless R is singular.
            if abs(r_cols[j][j]) < BREAKDOWN {
                return Err(Error::Breakdown { iteration: j + 1 });
            }
            converged = true;
            break;
        }
        if rel <= config.rel_tol {
            converged = true;
            break;
        }
        if j + 1 < m {
            basis.push(w.iter().map(|v| v / h_next).collect());
        }
    }

    // back substitution R y = g
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= r_cols[jj][i] * yj;
        }
        y[i] = s / r_cols[i][i];
    }
    let mut combo = vec![0.0; n];
    for (v, yi) in basis.iter().zip(&y) {
        for (c, vk) in combo.iter_mut().zip(v) {
            *c += yi * vk;
        }
    }
    let mut solution = vec![0.0; n];
    precond.apply(&combo, &mut solution)?;

    a.apply(&solution, &mut w);
    let res: f64 = sqrt(
        b.iter()
            .zip(&w)
            .map(|(bi, wi)| (bi - wi) * (bi - wi))
            .sum::<f64>(),
    );

    Ok(GmresOutcome {
        solution,
        iterations,
        converged,
        residual_history: history,
        true_residual: res / beta,
    })
}
