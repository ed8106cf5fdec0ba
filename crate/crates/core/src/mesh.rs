//! Uniformly refined Cartesian background meshes.
//!
//! Cells are addressed by a multi-index `(i, j, k)` linearized lexicographically
//! with the first axis running fastest. The same convention is used for the
//! degrees of freedom inside a cell, so every ordering in the crate derives
//! from it.

use alloc::vec::Vec;

use crate::{Error, Point, Result, MAX_DIM};

pub type MultiIndex = [usize; MAX_DIM];

/// Embedding box of the background mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshBox {
    pub lower: Point,
    pub upper: Point,
    pub base_cells_per_axis: usize,
    pub dim: usize,
}

impl MeshBox {
    pub fn new(dim: usize, lower: f64, upper: f64, base_cells_per_axis: usize) -> Result<Self> {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for k in 0..dim.min(MAX_DIM) {
            lo[k] = lower;
            hi[k] = upper;
        }
        let b = MeshBox {
            lower: lo,
            upper: hi,
            base_cells_per_axis,
            dim,
        };
        b.validate()?;
        Ok(b)
    }

    /// `[-1.01, 1.01]^dim` split into 4 cells per axis.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(dim, -1.01, 1.01, 4)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::invalid("mesh dimension must be 1, 2 or 3"));
        }
        if self.base_cells_per_axis == 0 {
            return Err(Error::invalid("base_cells_per_axis must be positive"));
        }
        for axis in 0..self.dim {
            let (lo, hi) = (self.lower[axis], self.upper[axis]);
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateBox { axis });
            }
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|k| self.upper[k] - self.lower[k]).product()
    }
}

/// Side of a cell along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Low,
    High,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Low => -1.0,
            Side::High => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Low => Side::High,
            Side::High => Side::Low,
        }
    }

    /// Reference coordinate of the face on the unit interval.
    pub fn coordinate(self) -> f64 {
        match self {
            Side::Low => 0.0,
            Side::High => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighbor {
    Cell(usize),
    /// The face lies on the boundary of the embedding box.
    Outside,
}

/// A face of the mesh. Interior faces are stored once, owned by the cell with
/// the lower multi-index (so `side` is always `High` for them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub owner: usize,
    pub neighbor: Neighbor,
    pub axis: usize,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub multi_index: MultiIndex,
    pub lower: Point,
    pub upper: Point,
}

impl Cell {
    pub fn center(&self) -> Point {
        let mut c = [0.0; MAX_DIM];
        for k in 0..MAX_DIM {
            c[k] = 0.5 * (self.lower[k] + self.upper[k]);
        }
        c
    }

    pub fn size(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Vertices in lexicographic order (first axis fastest).
    pub fn vertices(&self, dim: usize) -> Vec<Point> {
        (0..1usize << dim)
            .map(|bits| {
                let mut v = [0.0; MAX_DIM];
                for k in 0..dim {
                    v[k] = if bits >> k & 1 == 1 {
                        self.upper[k]
                    } else {
                        self.lower[k]
                    };
                }
                v
            })
            .collect()
    }
}

/// One level of the uniformly refined background mesh.
#[derive(Debug, Clone)]
pub struct MeshLevel {
    pub dim: usize,
    pub level: usize,
    pub cells_per_axis: usize,
    pub lower: Point,
    /// Cell edge length per axis.
    pub cell_size: Point,
    faces: Vec<Face>,
}

impl MeshLevel {
    pub fn new(mesh_box: &MeshBox, level: usize) -> Result<Self> {
        mesh_box.validate()?;
        let dim = mesh_box.dim;
        let cells_per_axis = u32::try_from(level)
            .ok()
            .and_then(|l| 1usize.checked_shl(l))
            .and_then(|f| f.checked_mul(mesh_box.base_cells_per_axis))
            .ok_or(Error::IndexOverflow { level })?;
        let mut total: usize = 1;
        for _ in 0..dim {
            total = total
                .checked_mul(cells_per_axis)
                .ok_or(Error::IndexOverflow { level })?;
        }
        // Face counts and dof offsets multiply the cell count further; keep headroom.
        if total > (u32::MAX as usize) {
            return Err(Error::IndexOverflow { level });
        }
        let mut cell_size = [0.0; MAX_DIM];
        for k in 0..dim {
            cell_size[k] = (mesh_box.upper[k] - mesh_box.lower[k]) / cells_per_axis as f64;
        }
        let mut mesh = MeshLevel {
            dim,
            level,
            cells_per_axis,
            lower: mesh_box.lower,
            cell_size,
            faces: Vec::new(),
        };
        mesh.faces = mesh.build_faces();
        Ok(mesh)
    }

    fn build_faces(&self) -> Vec<Face> {
        let mut faces = Vec::with_capacity(self.n_cells() * self.dim + self.dim);
        for c in 0..self.n_cells() {
            let mi = self.multi_index(c);
            for axis in 0..self.dim {
                if mi[axis] == 0 {
                    faces.push(Face {
                        owner: c,
                        neighbor: Neighbor::Outside,
                        axis,
                        side: Side::Low,
                    });
                }
                faces.push(Face {
                    owner: c,
                    neighbor: self.neighbor_of(c, axis, Side::High),
                    axis,
                    side: Side::High,
                });
            }
        }
        faces
    }

    pub fn n_cells(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    /// Characteristic cell size (largest edge).
    pub fn h(&self) -> f64 {
        (0..self.dim).map(|k| self.cell_size[k]).fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|k| self.cell_size[k]).product()
    }

    pub fn multi_index(&self, cell: usize) -> MultiIndex {
        let mut mi = [0; MAX_DIM];
        let mut rest = cell;
        for k in 0..self.dim {
            mi[k] = rest % self.cells_per_axis;
            rest /= self.cells_per_axis;
        }
        mi
    }

    pub fn linear_index(&self, mi: &MultiIndex) -> usize {
        (0..self.dim)
            .rev()
            .fold(0, |acc, k| acc * self.cells_per_axis + mi[k])
    }

    pub fn cell(&self, index: usize) -> Cell {
        let multi_index = self.multi_index(index);
        let mut lower = [0.0; MAX_DIM];
        let mut upper = [0.0; MAX_DIM];
        for k in 0..self.dim {
            lower[k] = self.lower[k] + multi_index[k] as f64 * self.cell_size[k];
            upper[k] = self.lower[k] + (multi_index[k] + 1) as f64 * self.cell_size[k];
        }
        Cell {
            index,
            multi_index,
            lower,
            upper,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.n_cells()).map(move |c| self.cell(c))
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn neighbor_of(&self, cell: usize, axis: usize, side: Side) -> Neighbor {
        let mut mi = self.multi_index(cell);
        match side {
            Side::Low if mi[axis] == 0 => Neighbor::Outside,
            Side::High if mi[axis] + 1 == self.cells_per_axis => Neighbor::Outside,
            Side::Low => {
                mi[axis] -= 1;
                Neighbor::Cell(self.linear_index(&mi))
            }
            Side::High => {
                mi[axis] += 1;
                Neighbor::Cell(self.linear_index(&mi))
            }
        }
    }

    /// Parent cell on the next coarser level (same base mesh).
    pub fn parent(&self, cell: usize, coarse: &MeshLevel) -> usize {
        let mut mi = self.multi_index(cell);
        for k in 0..self.dim {
            mi[k] /= 2;
        }
        coarse.linear_index(&mi)
    }

    /// Position of `cell` among the `2^dim` children of its parent, as a bit
    /// pattern (bit `k` set when the child sits on the high half along axis `k`).
    pub fn child_position(&self, cell: usize) -> usize {
        let mi = self.multi_index(cell);
        (0..self.dim).fold(0, |acc, k| acc | ((mi[k] & 1) << k))
    }

    /// Cell containing `x`, clamped to the box for points outside it.
    pub fn locate(&self, x: &Point) -> usize {
        let mut mi = [0; MAX_DIM];
        for k in 0..self.dim {
            let t = crate::math::floor((x[k] - self.lower[k]) / self.cell_size[k]);
            mi[k] = if t < 0.0 {
                0
            } else {
                (t as usize).min(self.cells_per_axis - 1)
            };
        }
        self.linear_index(&mi)
    }
}

/// Builds levels `0..=max_level` of the uniformly refined hierarchy.
pub fn build_hierarchy(mesh_box: &MeshBox, max_level: usize) -> Result<Vec<MeshLevel>> {
    (0..=max_level).map(|l| MeshLevel::new(mesh_box, l)).collect()
}
