//! Cell-wise subspace-correction smoothers.

use alloc::vec;

use crate::assembly::LevelOperator;

/// `sweeps` symmetric sweeps: a forward pass over the active cells applying
/// `u_K += omega A_KK^{-1} (f - A u)_K` with the current iterate, then the same
/// pass in reverse order.
pub fn smooth_ssor(op: &LevelOperator, rhs: &[f64], x: &mut [f64], omega: f64, sweeps: usize) {
    let n = op.layout.dofs_per_cell;
    let mut r = vec![0.0; n];
    let n_cells = op.layout.n_cells;
    for _ in 0..sweeps {
        for cell in 0..n_cells {
            cell_update(op, cell, rhs, x, omega, &mut r);
        }
        for cell in (0..n_cells).rev() {
            cell_update(op, cell, rhs, x, omega, &mut r);
        }
    }
}

/// Forward pass only (block Gauss-Seidel).
pub fn smooth_forward(op: &LevelOperator, rhs: &[f64], x: &mut [f64], omega: f64) {
    let mut r = vec![0.0; op.layout.dofs_per_cell];
    for cell in 0..op.layout.n_cells {
        cell_update(op, cell, rhs, x, omega, &mut r);
    }
}

#[inline]
fn cell_update(op: &LevelOperator, cell: usize, rhs: &[f64], x: &mut [f64], omega: f64, r: &mut [f64]) {
    if let Some(lu) = &op.blocks[cell] {
        let range = op.layout.block(cell);
        op.matrix.residual_rows(range.clone(), rhs, x, r);
        lu.solve_in_place(r);
        for (xi, ri) in x[range].iter_mut().zip(r.iter()) {
            *xi += omega * ri;
        }
    }
}

/// Additive variant: all cell corrections from the same residual.
pub fn smooth_block_jacobi(op: &LevelOperator, rhs: &[f64], x: &mut [f64], omega: f64, sweeps: usize) {
    let size = op.size();
    let mut r = vec![0.0; size];
    for _ in 0..sweeps {
        op.matrix.residual_rows(0..size, rhs, x, &mut r);
        for cell in 0..op.layout.n_cells {
            if let Some(lu) = &op.blocks[cell] {
                let range = op.layout.block(cell);
                lu.solve_in_place(&mut r[range.clone()]);
                for i in range {
                    x[i] += omega * r[i];
                }
            }
        }
    }
}
