//! Prolongation by nodal embedding of nested DG spaces, restriction as its transpose.

use alloc::vec::Vec;

use crate::basis::ReferenceBasis;
use crate::linalg::DenseMatrix;
use crate::mesh::MeshLevel;
use crate::{Result, MAX_DIM};

#[derive(Debug, Clone)]
enum Kind {
    /// One embedding matrix per child position; `parent[f]` is the coarse cell of fine cell `f`.
    Geometric {
        child: Vec<DenseMatrix>,
        parent: Vec<usize>,
        position: Vec<u8>,
    },
    /// Same mesh, lower to higher degree.
    Degree { embed: DenseMatrix },
}

/// Transfer between two consecutive multigrid levels.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    kind: Kind,
    coarse_n: usize,
    fine_n: usize,
    coarse_active: Vec<bool>,
    fine_active: Vec<bool>,
}

impl TransferOperator {
    /// Embedding of degree-`degree` polynomials on `coarse` cells into their children on `fine`.
    pub fn geometric(
        coarse: &MeshLevel,
        fine: &MeshLevel,
        degree: usize,
        coarse_active: &[bool],
        fine_active: &[bool],
    ) -> Result<Self> {
        let dim = fine.dim;
        let basis = ReferenceBasis::new(dim, degree)?;
        let n = basis.len();
        let nodes = basis.nodes();
        let mut child = Vec::with_capacity(1 << dim);
        for bits in 0..(1usize << dim) {
            let mut m = DenseMatrix::zeros(n, n);
            let mut values = alloc::vec![0.0; n];
            for (i, node) in nodes.iter().enumerate() {
                let mut xi = [0.0; MAX_DIM];
                for k in 0..dim {
                    xi[k] = 0.5 * (((bits >> k) & 1) as f64 + node[k]);
                }
                basis.eval_into(&xi, &mut values, None);
                for j in 0..n {
                    m[(i, j)] = values[j];
                }
            }
            child.push(m);
        }
        let parent = (0..fine.n_cells()).map(|c| fine.parent(c, coarse)).collect();
        let position = (0..fine.n_cells()).map(|c| fine.child_position(c) as u8).collect();
        Ok(TransferOperator {
            kind: Kind::Geometric { child, parent, position },
            coarse_n: n,
            fine_n: n,
            coarse_active: coarse_active.to_vec(),
            fine_active: fine_active.to_vec(),
        })
    }

    /// Embedding of degree `low` into degree `high` on the same cells.
    pub fn degree(dim: usize, low: usize, high: usize, active: &[bool]) -> Result<Self> {
        let lo = ReferenceBasis::new(dim, low)?;
        let hi = ReferenceBasis::new(dim, high)?;
        let mut embed = DenseMatrix::zeros(hi.len(), lo.len());
        let mut values = alloc::vec![0.0; lo.len()];
        for (i, node) in hi.nodes().iter().enumerate() {
            lo.eval_into(node, &mut values, None);
            for j in 0..lo.len() {
                embed[(i, j)] = values[j];
            }
        }
        Ok(TransferOperator {
            kind: Kind::Degree { embed },
            coarse_n: lo.len(),
            fine_n: hi.len(),
            coarse_active: active.to_vec(),
            fine_active: active.to_vec(),
        })
    }

    pub fn coarse_size(&self) -> usize {
        self.coarse_active.len() * self.coarse_n
    }

    pub fn fine_size(&self) -> usize {
        self.fine_active.len() * self.fine_n
    }

    /// Coarse cell and embedding matrix feeding `fine_cell`, if both are active.
    fn source(&self, fine_cell: usize) -> Option<(usize, &DenseMatrix)> {
        if !self.fine_active[fine_cell] {
            return None;
        }
        let (c, m) = match &self.kind {
            Kind::Geometric { child, parent, position } => (parent[fine_cell], &child[position[fine_cell] as usize]),
            Kind::Degree { embed } => (fine_cell, embed),
        };
        if self.coarse_active[c] {
            Some((c, m))
        } else {
            None
        }
    }

    /// `fine += P coarse`; entries of cells without a source are untouched.
    pub fn prolongate_add(&self, coarse: &[f64], fine: &mut [f64]) {
        let (nc, nf) = (self.coarse_n, self.fine_n);
        for f in 0..self.fine_active.len() {
            if let Some((c, m)) = self.source(f) {
                let x = &coarse[c * nc..(c + 1) * nc];
                let y = &mut fine[f * nf..(f + 1) * nf];
                for i in 0..nf {
                    let row = m.row(i);
                    let mut s = 0.0;
                    for j in 0..nc {
                        s += row[j] * x[j];
                    }
                    y[i] += s;
                }
            }
        }
    }

    /// `fine = P coarse`.
    pub fn prolongate(&self, coarse: &[f64], fine: &mut [f64]) {
        fine.iter_mut().for_each(|v| *v = 0.0);
        self.prolongate_add(coarse, fine);
    }

    /// `coarse = P^T fine`.
    pub fn restrict(&self, fine: &[f64], coarse: &mut [f64]) {
        let (nc, nf) = (self.coarse_n, self.fine_n);
        coarse.iter_mut().for_each(|v| *v = 0.0);
        for f in 0..self.fine_active.len() {
            if let Some((c, m)) = self.source(f) {
                let r = &fine[f * nf..(f + 1) * nf];
                let out = &mut coarse[c * nc..(c + 1) * nc];
                for i in 0..nf {
                    let row = m.row(i);
                    for j in 0..nc {
                        out[j] += row[j] * r[i];
                    }
                }
            }
        }
    }
}
