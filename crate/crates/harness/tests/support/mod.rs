//! Conforming symmetric-interior-penalty Nitsche matrix assembled face by face
//! over the whole mesh, independent of the row-wise solver assembly.

#![allow(dead_code)]

use std::collections::HashMap;

use sbm_core::basis::{gauss_legendre, ReferenceBasis};
use sbm_core::geometry::{AxisBox, CellClassification};
use sbm_core::linalg::CsrMatrix;
use sbm_core::mesh::{MeshLevel, Neighbor, Side};
use sbm_core::Point;

pub type Sparse = HashMap<(usize, usize), f64>;

/// `[-0.505, 0.505]^d`, which coincides with faces of the standard box mesh.
pub fn aligned_box(dim: usize) -> AxisBox {
    let mut half = [0.0; 3];
    for h in half.iter_mut().take(dim) {
        *h = 0.505;
    }
    AxisBox {
        dim,
        center: [0.0; 3],
        half_widths: half,
    }
}

struct Side1 {
    values: Vec<f64>,
    normal_derivs: Vec<f64>,
}

fn eval(basis: &ReferenceBasis, xi: &Point, axis: usize, sign: f64, h: f64) -> Side1 {
    let (values, grads) = basis.eval(xi, true);
    let normal_derivs = grads.unwrap().iter().map(|g| sign * g[axis] / h).collect();
    Side1 { values, normal_derivs }
}

/// Gauss points on the reference face `x[axis] = coord`, weights summing to one.
fn face_points(dim: usize, axis: usize, coord: f64, n: usize) -> Vec<(Point, f64)> {
    let (x, w) = gauss_legendre(n);
    let others: Vec<usize> = (0..dim).filter(|&k| k != axis).collect();
    let count = n.pow(others.len() as u32);
    (0..count)
        .map(|q| {
            let mut pt = [0.0; 3];
            pt[axis] = coord;
            let mut weight = 1.0;
            let mut rest = q;
            for &k in &others {
                pt[k] = x[rest % n];
                weight *= w[rest % n];
                rest /= n;
            }
            (pt, weight)
        })
        .collect()
}

fn add(m: &mut Sparse, i: usize, j: usize, v: f64) {
    *m.entry((i, j)).or_insert(0.0) += v;
}

/// Matrix of the conforming SIP discretization on the active cells with
/// Nitsche conditions on the boundary of the active region. Penalties are
/// `c p (p+1) / h`. Inactive cells carry identity rows.
pub fn conforming_nitsche(
    mesh: &MeshLevel,
    cls: &CellClassification,
    degree: usize,
    c_gamma: f64,
    c_f: f64,
) -> Sparse {
    let dim = mesh.dim;
    let basis = ReferenceBasis::new(dim, degree).unwrap();
    let n = basis.len();
    let h = mesh.cell_size[0];
    let pf = (degree * (degree + 1)) as f64 / h;
    let (sigma_g, sigma_f) = (c_gamma * pf, c_f * pf);
    let face_area = h.powi(dim as i32 - 1);
    let mut m = Sparse::new();

    // cell stiffness
    let (x1, w1) = gauss_legendre(degree + 1);
    let q = degree + 1;
    for cell in 0..mesh.n_cells() {
        let base = cell * n;
        if !cls.is_active(cell) {
            for i in 0..n {
                add(&mut m, base + i, base + i, 1.0);
            }
            continue;
        }
        for idx in 0..q.pow(dim as u32) {
            let mut pt = [0.0; 3];
            let mut w = h.powi(dim as i32);
            let mut rest = idx;
            for p in pt.iter_mut().take(dim) {
                *p = x1[rest % q];
                w *= w1[rest % q];
                rest /= q;
            }
            let (_, g) = basis.eval(&pt, true);
            let g = g.unwrap();
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..dim).map(|k| g[i][k] * g[j][k]).sum::<f64>() / (h * h);
                    add(&mut m, base + i, base + j, w * s);
                }
            }
        }
    }

    // every face once
    for face in mesh.faces() {
        let owner_active = cls.is_active(face.owner);
        let nb = match face.neighbor {
            Neighbor::Cell(c) => Some(c),
            Neighbor::Outside => None,
        };
        let nb_active = nb.is_some_and(|c| cls.is_active(c));
        let axis = face.axis;
        if owner_active && nb_active {
            let nb = nb.unwrap();
            // owner on the low side, normal +e_axis
            for (pt, w) in face_points(dim, axis, 1.0, degree + 1) {
                let mut pn = pt;
                pn[axis] = 0.0;
                let a = eval(&basis, &pt, axis, 1.0, h);
                let b = eval(&basis, &pn, axis, 1.0, h);
                let w = w * face_area;
                let sides = [(face.owner, &a, 1.0), (nb, &b, -1.0)];
                for &(ci, si, ji) in &sides {
                    for &(cj, sj, jj) in &sides {
                        for i in 0..n {
                            for j in 0..n {
                                // -{du}[v] - {dv}[u] + sigma [u][v]
                                let v = -0.5 * sj.normal_derivs[j] * ji * si.values[i]
                                    - 0.5 * si.normal_derivs[i] * jj * sj.values[j]
                                    + sigma_f * ji * jj * si.values[i] * sj.values[j];
                                add(&mut m, ci * n + i, cj * n + j, w * v);
                            }
                        }
                    }
                }
            }
        } else if owner_active != nb_active {
            let (cell, side) = if owner_active {
                (face.owner, face.side)
            } else {
                (nb.unwrap(), Side::Low)
            };
            boundary_face(&mut m, &basis, cell * n, axis, side, h, face_area, sigma_g, dim, degree);
        }
    }
    m
}

#[allow(clippy::too_many_arguments)]
fn boundary_face(
    m: &mut Sparse,
    basis: &ReferenceBasis,
    base: usize,
    axis: usize,
    side: Side,
    h: f64,
    face_area: f64,
    sigma: f64,
    dim: usize,
    degree: usize,
) {
    let n = basis.len();
    let (coord, sign) = match side {
        Side::Low => (0.0, -1.0),
        Side::High => (1.0, 1.0),
    };
    for (pt, w) in face_points(dim, axis, coord, degree + 1) {
        let s = eval(basis, &pt, axis, sign, h);
        let w = w * face_area;
        for i in 0..n {
            for j in 0..n {
                let v = -s.normal_derivs[j] * s.values[i] - s.normal_derivs[i] * s.values[j]
                    + sigma * s.values[i] * s.values[j];
                add(m, base + i, base + j, w * v);
            }
        }
    }
}

/// Largest entrywise difference between `a` and the oracle.
pub fn max_difference(a: &CsrMatrix, oracle: &Sparse) -> f64 {
    let mut seen = 0usize;
    let mut worst = 0.0f64;
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            let o = oracle.get(&(i, j)).copied().unwrap_or(0.0);
            if oracle.contains_key(&(i, j)) {
                seen += 1;
            }
            worst = worst.max((v - o).abs());
        }
    }
    // oracle entries absent from the CSR pattern
    if seen != oracle.len() {
        for (&(i, j), &o) in oracle {
            if a.get(i, j) == 0.0 && !a.row(i).0.contains(&j) {
                worst = worst.max(o.abs());
            }
        }
    }
    worst
}
