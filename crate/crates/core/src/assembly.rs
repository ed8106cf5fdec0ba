//! System assembly for one level: SIP-DG volume and interior-face terms on
//! active cells, shifted Nitsche terms on the surrogate boundary, identity
//! blocks on inactive cells.
//!
//! All cells of a level are congruent, so the cell stiffness and the interior
//! face matrices are computed once per level and copied; only the shifted
//! boundary terms are evaluated point by point.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::basis::{map_from_reference, map_to_reference, QuadratureDomain, QuadratureRule, ReferenceBasis, Tabulation};
use crate::geometry::{BoundaryProjector, CellClassification, ShiftRecord, SurrogateFace};
use crate::linalg::{CsrMatrix, DenseMatrix, LuFactor};
use crate::mesh::{MeshLevel, Neighbor, Side};
use crate::{Error, Point, Result};

/// Relative pivot threshold for the cell-block factorizations.
pub const BLOCK_PIVOT_TOL: f64 = 1e-14;

/// Contiguous `(p+1)^d` dofs per cell, over all cells of a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub n_cells: usize,
    pub dofs_per_cell: usize,
}

impl DofLayout {
    pub fn new(level: &MeshLevel, degree: usize) -> Self {
        DofLayout {
            n_cells: level.n_cells(),
            dofs_per_cell: (degree + 1).pow(level.dim as u32),
        }
    }

    pub fn size(&self) -> usize {
        self.n_cells * self.dofs_per_cell
    }

    pub fn offset(&self, cell: usize) -> usize {
        cell * self.dofs_per_cell
    }

    pub fn block(&self, cell: usize) -> Range<usize> {
        self.offset(cell)..self.offset(cell) + self.dofs_per_cell
    }
}

/// How the penalty prefactors scale with degree and mesh size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyScaling {
    /// `c p^2 / h`
    P2OverH,
    /// `c p (p+1) / h`
    PP1OverH,
    /// `c`
    Flat,
}

impl PenaltyScaling {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "p2_over_h" => Some(PenaltyScaling::P2OverH),
            "pp1_over_h" => Some(PenaltyScaling::PP1OverH),
            "flat" => Some(PenaltyScaling::Flat),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PenaltyScaling::P2OverH => "p2_over_h",
            PenaltyScaling::PP1OverH => "pp1_over_h",
            PenaltyScaling::Flat => "flat",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmParameters {
    /// `+1` quasi-symmetric, `-1` non-symmetric.
    pub alpha: f64,
    pub c_gamma: f64,
    pub c_f: f64,
    pub scaling: PenaltyScaling,
}

impl Default for SbmParameters {
    fn default() -> Self {
        SbmParameters {
            alpha: 1.0,
            c_gamma: 5.0,
            c_f: 1.0,
            scaling: PenaltyScaling::PP1OverH,
        }
    }
}

impl SbmParameters {
    pub fn validate(&self) -> Result<()> {
        if self.alpha != 1.0 && self.alpha != -1.0 {
            return Err(Error::invalid("alpha must be +1 or -1"));
        }
        let penalty_free = self.alpha == -1.0 && self.c_gamma == 0.0;
        if !(self.c_gamma > 0.0 || penalty_free) || !self.c_gamma.is_finite() {
            return Err(Error::invalid("boundary penalty must be positive"));
        }
        if !(self.c_f > 0.0) || !self.c_f.is_finite() {
            return Err(Error::invalid("face penalty must be positive"));
        }
        Ok(())
    }

    fn scaled(&self, c: f64, degree: usize, h: f64) -> f64 {
        let p = degree as f64;
        match self.scaling {
            PenaltyScaling::P2OverH => c * p * p / h,
            PenaltyScaling::PP1OverH => c * p * (p + 1.0) / h,
            PenaltyScaling::Flat => c,
        }
    }

    pub fn boundary_penalty(&self, degree: usize, h: f64) -> f64 {
        self.scaled(self.c_gamma, degree, h)
    }

    pub fn face_penalty(&self, degree: usize, h: f64) -> f64 {
        self.scaled(self.c_f, degree, h)
    }
}

/// Basis, quadrature and precomputed local matrices for one (mesh level, degree).
#[derive(Debug, Clone)]
pub struct ElementTables {
    pub dim: usize,
    pub degree: usize,
    pub basis: ReferenceBasis,
    pub cell_size: Point,
    pub cell_rule: QuadratureRule,
    pub cell_tab: Tabulation,
    /// Indexed by `2 * axis + side` (low = 0, high = 1).
    pub face_rules: Vec<QuadratureRule>,
    pub face_tabs: Vec<Tabulation>,
    /// Cell stiffness `int grad N_j . grad N_i`, row-major `n x n`.
    pub stiffness: Vec<f64>,
    /// SIP contribution of an interior face to the owning cell's diagonal block.
    pub face_self: Vec<Vec<f64>>,
    /// SIP contribution of an interior face to the coupling with the neighbor.
    pub face_neighbor: Vec<Vec<f64>>,
}

pub(crate) fn face_slot(axis: usize, side: Side) -> usize {
    2 * axis + matches!(side, Side::High) as usize
}

impl ElementTables {
    /// Tables with `points_per_axis` Gauss points for all cell and face integrals.
    pub fn new(level: &MeshLevel, degree: usize, params: &SbmParameters, points_per_axis: usize) -> Result<Self> {
        let dim = level.dim;
        let basis = ReferenceBasis::new(dim, degree)?;
        let cell_rule = QuadratureRule::new(points_per_axis, dim, QuadratureDomain::Cell)?;
        let cell_tab = Tabulation::new(&basis, &cell_rule.points);
        let mut face_rules = Vec::with_capacity(2 * dim);
        let mut face_tabs = Vec::with_capacity(2 * dim);
        for axis in 0..dim {
            for side in [Side::Low, Side::High] {
                let rule = QuadratureRule::new(points_per_axis, dim, QuadratureDomain::Face { axis, side })?;
                face_tabs.push(Tabulation::new(&basis, &rule.points));
                face_rules.push(rule);
            }
        }
        let mut t = ElementTables {
            dim,
            degree,
            basis,
            cell_size: level.cell_size,
            cell_rule,
            cell_tab,
            face_rules,
            face_tabs,
            stiffness: Vec::new(),
            face_self: Vec::new(),
            face_neighbor: Vec::new(),
        };
        t.stiffness = t.compute_stiffness();
        for axis in 0..dim {
            for side in [Side::Low, Side::High] {
                let (s, nb) = t.compute_face(axis, side, params);
                t.face_self.push(s);
                t.face_neighbor.push(nb);
            }
        }
        Ok(t)
    }

    /// Tables at the default quadrature of `p+1` points per axis.
    pub fn standard(level: &MeshLevel, degree: usize, params: &SbmParameters) -> Result<Self> {
        Self::new(level, degree, params, degree + 1)
    }

    pub fn n_dofs(&self) -> usize {
        self.basis.len()
    }

    pub fn cell_jacobian(&self) -> f64 {
        (0..self.dim).map(|k| self.cell_size[k]).product()
    }

    pub fn face_jacobian(&self, axis: usize) -> f64 {
        (0..self.dim).filter(|&k| k != axis).map(|k| self.cell_size[k]).product()
    }

    fn compute_stiffness(&self) -> Vec<f64> {
        let n = self.n_dofs();
        let jac = self.cell_jacobian();
        let mut k = vec![0.0; n * n];
        for q in 0..self.cell_rule.len() {
            let w = self.cell_rule.weights[q] * jac;
            let g = self.cell_tab.gradients_at(q);
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for a in 0..self.dim {
                        s += g[i][a] * g[j][a] / (self.cell_size[a] * self.cell_size[a]);
                    }
                    k[i * n + j] += w * s;
                }
            }
        }
        k
    }

    fn compute_face(&self, axis: usize, side: Side, params: &SbmParameters) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_dofs();
        let h = self.cell_size[axis];
        let sigma = params.face_penalty(self.degree, h);
        let jac = self.face_jacobian(axis);
        let sign = side.sign();
        let own = &self.face_tabs[face_slot(axis, side)];
        let other = &self.face_tabs[face_slot(axis, side.opposite())];
        let rule = &self.face_rules[face_slot(axis, side)];
        let mut a_self = vec![0.0; n * n];
        let mut a_nb = vec![0.0; n * n];
        let mut dk = vec![0.0; n];
        let mut dn = vec![0.0; n];
        for q in 0..rule.len() {
            let w = rule.weights[q] * jac;
            let vk = own.values_at(q);
            let vn = other.values_at(q);
            for (i, g) in own.gradients_at(q).iter().enumerate() {
                dk[i] = sign * g[axis] / h;
            }
            for (i, g) in other.gradients_at(q).iter().enumerate() {
                dn[i] = sign * g[axis] / h;
            }
            for i in 0..n {
                for j in 0..n {
                    a_self[i * n + j] += w * (-0.5 * dk[j] * vk[i] - 0.5 * dk[i] * vk[j] + sigma * vk[i] * vk[j]);
                    a_nb[i * n + j] += w * (-0.5 * dn[j] * vk[i] + 0.5 * dk[i] * vn[j] - sigma * vn[j] * vk[i]);
                }
            }
        }
        (a_self, a_nb)
    }
}

/// Dense blocks of one cell's block row: the diagonal block and one coupling
/// block per active neighbor.
#[derive(Debug, Clone, PartialEq)]
pub struct RowBlock {
    pub cell: usize,
    pub n: usize,
    pub diagonal: Vec<f64>,
    pub couplings: Vec<(usize, Vec<f64>)>,
    pub rhs: Vec<f64>,
}

impl RowBlock {
    pub fn new(cell: usize, n: usize) -> Self {
        RowBlock {
            cell,
            n,
            diagonal: vec![0.0; n * n],
            couplings: Vec::new(),
            rhs: vec![0.0; n],
        }
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

/// Cell stiffness plus SIP terms of every face shared with another active cell.
pub fn assemble_volume_and_faces(
    level: &MeshLevel,
    classification: &CellClassification,
    tables: &ElementTables,
    row: &mut RowBlock,
) {
    add_into(&mut row.diagonal, &tables.stiffness);
    for axis in 0..level.dim {
        for side in [Side::Low, Side::High] {
            if let Neighbor::Cell(nb) = level.neighbor_of(row.cell, axis, side) {
                if classification.is_active(nb) {
                    let slot = face_slot(axis, side);
                    add_into(&mut row.diagonal, &tables.face_self[slot]);
                    row.couplings.push((nb, tables.face_neighbor[slot].clone()));
                }
            }
        }
    }
}

/// Shifted Nitsche terms of one surrogate face.
///
/// Test functions are evaluated at the surrogate quadrature point, the trial
/// extension at the projected boundary point through the cell's own polynomial.
/// Shift records are appended in quadrature order.
#[allow(clippy::too_many_arguments)]
pub fn assemble_sbm_boundary<P: BoundaryProjector + ?Sized>(
    level: &MeshLevel,
    classification: &CellClassification,
    tables: &ElementTables,
    params: &SbmParameters,
    face: &SurrogateFace,
    projector: &P,
    dirichlet: Option<&dyn Fn(&Point) -> f64>,
    row: &mut RowBlock,
    shifts: &mut Vec<ShiftRecord>,
) -> Result<()> {
    if !classification.is_active(face.cell) {
        return Err(Error::InactiveSurrogateFace { cell: face.cell });
    }
    let n = tables.n_dofs();
    let dim = tables.dim;
    let cell = level.cell(face.cell);
    let slot = face_slot(face.axis, face.side);
    let rule = &tables.face_rules[slot];
    let tab = &tables.face_tabs[slot];
    let h = tables.cell_size[face.axis];
    let sigma = params.boundary_penalty(tables.degree, h);
    let alpha = params.alpha;
    let jac = tables.face_jacobian(face.axis);
    let sign = face.side.sign();
    let normal = face.normal();
    let mut ext = vec![0.0; n];
    let mut dn = vec![0.0; n];
    for q in 0..rule.len() {
        let w = rule.weights[q] * jac;
        let xt = map_from_reference(&cell, dim, &rule.points[q]);
        let projection = projector.project(&xt)?;
        let xi = map_to_reference(&cell, dim, &projection.point);
        tables.basis.eval_into(&xi, &mut ext, None);
        let v = tab.values_at(q);
        for (i, g) in tab.gradients_at(q).iter().enumerate() {
            dn[i] = sign * g[face.axis] / h;
        }
        for i in 0..n {
            for j in 0..n {
                row.diagonal[i * n + j] += w * (-dn[j] * v[i] - alpha * dn[i] * ext[j] + sigma * ext[j] * v[i]);
            }
        }
        if let Some(g) = dirichlet {
            let gx = g(&projection.point);
            for i in 0..n {
                row.rhs[i] += w * gx * (-alpha * dn[i] + sigma * v[i]);
            }
        }
        shifts.push(ShiftRecord::new(xt, projection, normal, level.h()));
    }
    Ok(())
}

/// `int f N_i` over the full cell.
pub fn assemble_rhs_volume(level: &MeshLevel, tables: &ElementTables, cell: usize, f: &dyn Fn(&Point) -> f64, rhs: &mut [f64]) {
    let n = tables.n_dofs();
    let geom = level.cell(cell);
    let jac = tables.cell_jacobian();
    for q in 0..tables.cell_rule.len() {
        let x = map_from_reference(&geom, tables.dim, &tables.cell_rule.points[q]);
        let fw = f(&x) * tables.cell_rule.weights[q] * jac;
        let v = tables.cell_tab.values_at(q);
        for i in 0..n {
            rhs[i] += fw * v[i];
        }
    }
}

/// System matrix, right-hand side and cell-block factorizations of one level.
#[derive(Debug, Clone)]
pub struct LevelOperator {
    pub layout: DofLayout,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub active: Vec<bool>,
    /// LU factors of the diagonal blocks of active cells.
    pub blocks: Vec<Option<LuFactor>>,
}

impl LevelOperator {
    pub fn size(&self) -> usize {
        self.layout.size()
    }

    /// Diagonal block of `cell` read back from the sparse matrix.
    pub fn diagonal_block(&self, cell: usize) -> DenseMatrix {
        let r = self.layout.block(cell);
        let n = self.layout.dofs_per_cell;
        let mut m = DenseMatrix::zeros(n, n);
        for (li, i) in r.clone().enumerate() {
            let (cols, vals) = self.matrix.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if r.contains(c) {
                    m[(li, c - r.start)] = *v;
                }
            }
        }
        m
    }
}

/// Builds the level operator from the row blocks of the active cells (in
/// increasing cell order); every other cell gets an identity block and zero rhs.
pub fn finalize(layout: DofLayout, active: &[bool], rows: Vec<RowBlock>) -> Result<LevelOperator> {
    let n = layout.dofs_per_cell;
    let size = layout.size();
    let mut builder = CsrBuilder::new(size);
    let mut rhs = vec![0.0; size];
    let mut blocks: Vec<Option<LuFactor>> = vec![None; layout.n_cells];
    let mut rows = rows.into_iter().peekable();
    for cell in 0..layout.n_cells {
        let row = match rows.peek() {
            Some(r) if r.cell == cell => rows.next(),
            _ => None,
        };
        match row {
            Some(mut row) if active[cell] => {
                row.couplings.sort_by_key(|c| c.0);
                builder.push_block_row(&layout, &row);
                rhs[layout.block(cell)].copy_from_slice(&row.rhs);
                let diag = DenseMatrix::from_row_major(n, n, row.diagonal)?;
                blocks[cell] = Some(LuFactor::new(&diag, BLOCK_PIVOT_TOL).map_err(|_| Error::SingularBlock { cell })?);
            }
            _ => builder.push_identity_rows(layout.block(cell)),
        }
    }
    Ok(LevelOperator {
        layout,
        matrix: builder.finish()?,
        rhs,
        active: active.to_vec(),
        blocks,
    })
}

struct CsrBuilder {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrBuilder {
    fn new(n: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        CsrBuilder {
            n,
            row_ptr,
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    fn push_identity_rows(&mut self, rows: Range<usize>) {
        for i in rows {
            self.col_idx.push(i);
            self.values.push(1.0);
            self.row_ptr.push(self.col_idx.len());
        }
    }

    fn push_block_row(&mut self, layout: &DofLayout, row: &RowBlock) {
        let n = row.n;
        let mut order: Vec<(usize, &[f64])> = row.couplings.iter().map(|(c, b)| (*c, b.as_slice())).collect();
        order.push((row.cell, &row.diagonal));
        order.sort_by_key(|b| b.0);
        for i in 0..n {
            for (c, block) in &order {
                let off = layout.offset(*c);
                for j in 0..n {
                    self.col_idx.push(off + j);
                    self.values.push(block[i * n + j]);
                }
            }
            self.row_ptr.push(self.col_idx.len());
        }
    }

    fn finish(self) -> Result<CsrMatrix> {
        CsrMatrix::from_raw(self.n, self.n, self.row_ptr, self.col_idx, self.values)
    }
}

/// Source and boundary data for the right-hand side.
#[derive(Clone, Copy)]
pub struct ProblemData<'a> {
    pub source: &'a dyn Fn(&Point) -> f64,
    pub dirichlet: &'a dyn Fn(&Point) -> f64,
}

/// Assembled level together with the shift records of its surrogate boundary.
#[derive(Debug, Clone)]
pub struct AssembledLevel {
    pub operator: LevelOperator,
    pub shifts: Vec<ShiftRecord>,
}

/// Full assembly of one level. Without `data` the right-hand side is zero.
pub fn assemble_level<P: BoundaryProjector + ?Sized>(
    level: &MeshLevel,
    classification: &CellClassification,
    tables: &ElementTables,
    params: &SbmParameters,
    surrogate: &[SurrogateFace],
    projector: &P,
    data: Option<ProblemData<'_>>,
) -> Result<AssembledLevel> {
    params.validate()?;
    if classification.n_cells() != level.n_cells() {
        return Err(Error::DimensionMismatch {
            expected: level.n_cells(),
            got: classification.n_cells(),
        });
    }
    let layout = DofLayout {
        n_cells: level.n_cells(),
        dofs_per_cell: tables.n_dofs(),
    };
    let n = tables.n_dofs();
    let mut rows = Vec::with_capacity(classification.n_active());
    let mut shifts = Vec::new();
    let mut next_face = 0;
    for cell in classification.active_cells() {
        let mut row = RowBlock::new(cell, n);
        assemble_volume_and_faces(level, classification, tables, &mut row);
        if next_face < surrogate.len() && surrogate[next_face].cell < cell {
            return Err(Error::InactiveSurrogateFace {
                cell: surrogate[next_face].cell,
            });
        }
        while next_face < surrogate.len() && surrogate[next_face].cell == cell {
            assemble_sbm_boundary(
                level,
                classification,
                tables,
                params,
                &surrogate[next_face],
                projector,
                data.map(|d| d.dirichlet),
                &mut row,
                &mut shifts,
            )?;
            next_face += 1;
        }
        if let Some(d) = data {
            assemble_rhs_volume(level, tables, cell, d.source, &mut row.rhs);
        }
        rows.push(row);
    }
    if next_face < surrogate.len() {
        return Err(Error::InactiveSurrogateFace {
            cell: surrogate[next_face].cell,
        });
    }
    let operator = finalize(layout, &classification.active, rows)?;
    Ok(AssembledLevel { operator, shifts })
}

/// Values of a function sampled at the nodes of every active cell (zero elsewhere).
pub fn interpolate(
    level: &MeshLevel,
    classification: &CellClassification,
    basis: &ReferenceBasis,
    u: &dyn Fn(&Point) -> f64,
) -> Vec<f64> {
    let layout = DofLayout::new(level, basis.degree());
    let nodes = basis.nodes();
    let mut out = vec![0.0; layout.size()];
    for cell in classification.active_cells() {
        let geom = level.cell(cell);
        for (i, xi) in nodes.iter().enumerate() {
            out[layout.offset(cell) + i] = u(&map_from_reference(&geom, level.dim, xi));
        }
    }
    out
}

/// Physical coordinates of cell `cell`'s reference point `xi`.
pub fn physical_point(level: &MeshLevel, cell: usize, xi: &Point) -> Point {
    map_from_reference(&level.cell(cell), level.dim, xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{classify, surrogate_boundary, FnProjector};
    use crate::mesh::MeshBox;

    fn unit_interval(cells: usize) -> MeshLevel {
        let b = MeshBox::new(1, 0.0, cells as f64, cells).unwrap();
        MeshLevel::new(&b, 0).unwrap()
    }

    fn dense(op: &LevelOperator) -> DenseMatrix {
        op.matrix.to_dense()
    }

    #[test]
    fn layout_blocks_cover_range() {
        let m = unit_interval(3);
        let l = DofLayout::new(&m, 2);
        assert_eq!(l.size(), 9);
        assert_eq!(l.block(1), 3..6);
    }

    #[test]
    fn single_cell_stiffness() {
        let m = unit_interval(1);
        let t = ElementTables::standard(&m, 1, &SbmParameters::default()).unwrap();
        for (a, b) in t.stiffness.iter().zip([1.0, -1.0, -1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_cell_sip_matches_hand_computation() {
        let m = unit_interval(2);
        let params = SbmParameters {
            scaling: PenaltyScaling::P2OverH,
            ..SbmParameters::default()
        };
        let t = ElementTables::standard(&m, 1, &params).unwrap();
        let cls = CellClassification::all_active(2);
        let rows: Vec<RowBlock> = (0..2)
            .map(|c| {
                let mut r = RowBlock::new(c, 2);
                assemble_volume_and_faces(&m, &cls, &t, &mut r);
                r
            })
            .collect();
        let op = finalize(DofLayout::new(&m, 1), &cls.active, rows).unwrap();
        // sigma_F = 1: -({u'}[v] + {v'}[u]) + [u][v] plus the two cell stiffnesses
        let want = [
            [1.0, -0.5, -0.5, 0.0],
            [-0.5, 1.0, 0.0, -0.5],
            [-0.5, 0.0, 1.0, -0.5],
            [0.0, -0.5, -0.5, 1.0],
        ];
        let a = dense(&op);
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[(i, j)] - want[i][j]).abs() < 1e-14, "({i},{j}) {}", a[(i, j)]);
            }
        }
    }

    #[test]
    fn shifted_single_cell_matches_closed_form() {
        // surrogate [0,1], true domain [0, xi]: A = [[5 - xi, xi], [5 - 4 xi, 4 xi]]
        let m = unit_interval(1);
        let params = SbmParameters {
            scaling: PenaltyScaling::P2OverH,
            ..SbmParameters::default()
        };
        let t = ElementTables::standard(&m, 1, &params).unwrap();
        let cls = CellClassification::all_active(1);
        let faces = surrogate_boundary(&m, &cls);
        for xi in [0.4, 0.7, 1.0, 1.6] {
            let proj = FnProjector(move |x: &Point| if x[0] < 0.5 { [0.0; 3] } else { [xi, 0.0, 0.0] });
            let out = assemble_level(&m, &cls, &t, &params, &faces, &proj, None).unwrap();
            let a = dense(&out.operator);
            let want = [[5.0 - xi, xi], [5.0 - 4.0 * xi, 4.0 * xi]];
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a[(i, j)] - want[i][j]).abs() < 1e-13, "xi={xi} ({i},{j})");
                }
            }
            assert_eq!(out.shifts.len(), 2);
            assert!((out.shifts[1].signed_magnitude - (xi - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn rhs_volume_of_constant() {
        let m = unit_interval(1);
        let t = ElementTables::standard(&m, 1, &SbmParameters::default()).unwrap();
        let mut rhs = vec![0.0; 2];
        assemble_rhs_volume(&m, &t, 0, &|_| 1.0, &mut rhs);
        assert!(rhs.iter().all(|v| (v - 0.5).abs() < 1e-15));
        let mut zero = vec![0.0; 2];
        assemble_rhs_volume(&m, &t, 0, &|_| 0.0, &mut zero);
        assert_eq!(zero, vec![0.0, 0.0]);
    }

    #[test]
    fn inactive_cells_are_identity() {
        let b = MeshBox::standard(2).unwrap();
        let m = MeshLevel::new(&b, 0).unwrap();
        let params = SbmParameters::default();
        let t = ElementTables::standard(&m, 1, &params).unwrap();
        let cls = CellClassification::from_fractions(vec![0.0; m.n_cells()], 0.5).unwrap();
        let proj = FnProjector(|x: &Point| *x);
        let out = assemble_level(&m, &cls, &t, &params, &[], &proj, None).unwrap();
        let n = out.operator.size();
        assert_eq!(out.operator.matrix.nnz(), n);
        for i in 0..n {
            assert_eq!(out.operator.matrix.get(i, i), 1.0);
        }
    }

    #[test]
    fn zero_shift_symmetric_and_block_round_trip() {
        let b = MeshBox::standard(2).unwrap();
        let m = MeshLevel::new(&b, 1).unwrap();
        let params = SbmParameters::default();
        for p in 1..=3 {
            let t = ElementTables::standard(&m, p, &params).unwrap();
            let cls = classify(&m, &crate::geometry::UnitBall { dim: 2 }, 0.5, 6).unwrap();
            let faces = surrogate_boundary(&m, &cls);
            let proj = FnProjector(|x: &Point| *x);
            let out = assemble_level(&m, &cls, &t, &params, &faces, &proj, None).unwrap();
            let op = &out.operator;
            assert!(op.matrix.asymmetry() <= 1e-12 * op.matrix.max_abs());
            for cell in cls.active_cells() {
                let blk = op.diagonal_block(cell);
                let lu = op.blocks[cell].as_ref().unwrap();
                let x: Vec<f64> = (0..blk.n_rows()).map(|i| (i as f64 * 0.7).sin()).collect();
                let y = blk.matvec(&x);
                let back = lu.solve(&y);
                for i in 0..x.len() {
                    assert!((back[i] - x[i]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn asymmetry_only_in_boundary_cells() {
        let b = MeshBox::standard(2).unwrap();
        let m = MeshLevel::new(&b, 2).unwrap();
        let params = SbmParameters::default();
        let t = ElementTables::standard(&m, 2, &params).unwrap();
        let disk = crate::geometry::UnitBall { dim: 2 };
        let cls = classify(&m, &disk, 0.75, 6).unwrap();
        let faces = surrogate_boundary(&m, &cls);
        let proj = crate::geometry::LevelSetProjector(disk);
        let out = assemble_level(&m, &cls, &t, &params, &faces, &proj, None).unwrap();
        let a = &out.operator.matrix;
        let at = a.transpose();
        let layout = out.operator.layout;
        let boundary: Vec<bool> = (0..m.n_cells()).map(|c| faces.iter().any(|f| f.cell == c)).collect();
        for i in 0..a.n_rows() {
            let (cols, vals) = a.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let diff = (v - at.get(i, *c)).abs();
                if diff > 1e-12 {
                    let (ci, cj) = (i / layout.dofs_per_cell, c / layout.dofs_per_cell);
                    assert!(boundary[ci] || boundary[cj]);
                }
            }
        }
    }
}
