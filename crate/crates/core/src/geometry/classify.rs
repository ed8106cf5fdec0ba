//! Cell classification by volume fraction and extraction of the surrogate boundary.

use alloc::vec::Vec;

use super::LevelSet;
use crate::math::{norm, sqrt};
use crate::mesh::{MeshLevel, Neighbor, Side};
use crate::{Error, Point, Result, MAX_DIM};

/// Default bisection depth for volume fractions.
pub fn default_depth(dim: usize) -> usize {
    if dim >= 3 {
        5
    } else {
        8
    }
}

/// Estimates `|box ∩ Omega| / |box|` by recursive bisection.
///
/// A sub-box whose corner and center samples share a sign, with `|phi(center)|`
/// larger than the box diagonal times `|grad phi(center)|`, is counted as fully
/// inside or outside. Mixed boxes are split until `depth` is exhausted and then
/// scored by the share of negative samples. `depth == 0` classifies by the
/// sign at the center.
pub fn volume_fraction<L: LevelSet + ?Sized>(lower: &Point, upper: &Point, phi: &L, depth: usize) -> f64 {
    let dim = phi.dim();
    if depth == 0 {
        let mut c = [0.0; MAX_DIM];
        for k in 0..dim {
            c[k] = 0.5 * (lower[k] + upper[k]);
        }
        return if phi.value(&c) < 0.0 { 1.0 } else { 0.0 };
    }
    fraction_rec(lower, upper, phi, dim, depth)
}

fn fraction_rec<L: LevelSet + ?Sized>(lower: &Point, upper: &Point, phi: &L, dim: usize, depth: usize) -> f64 {
    let mut center = [0.0; MAX_DIM];
    let mut diag2 = 0.0;
    for k in 0..dim {
        center[k] = 0.5 * (lower[k] + upper[k]);
        let e = upper[k] - lower[k];
        diag2 += e * e;
    }
    let n_corners = 1usize << dim;
    let phi_c = phi.value(&center);
    let mut inside = (phi_c < 0.0) as usize;
    for bits in 0..n_corners {
        let mut v = [0.0; MAX_DIM];
        for k in 0..dim {
            v[k] = if bits >> k & 1 == 1 { upper[k] } else { lower[k] };
        }
        if phi.value(&v) < 0.0 {
            inside += 1;
        }
    }
    let samples = n_corners + 1;
    if inside == samples || inside == 0 {
        let g = phi.gradient(&center);
        let margin = sqrt(diag2) * norm(&g[..dim]);
        if phi_c.abs() > margin {
            return if inside == samples { 1.0 } else { 0.0 };
        }
    }
    if depth == 1 {
        return inside as f64 / samples as f64;
    }
    let mut sum = 0.0;
    for bits in 0..n_corners {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for k in 0..dim {
            if bits >> k & 1 == 1 {
                lo[k] = center[k];
                hi[k] = upper[k];
            } else {
                lo[k] = lower[k];
                hi[k] = center[k];
            }
        }
        sum += fraction_rec(&lo, &hi, phi, dim, depth - 1);
    }
    sum / n_corners as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellCategory {
    Interior,
    Exterior,
    Intersected,
}

/// Per-cell category, volume fraction and activity on one mesh level.
#[derive(Debug, Clone, PartialEq)]
pub struct CellClassification {
    pub threshold: f64,
    pub categories: Vec<CellCategory>,
    pub fractions: Vec<f64>,
    pub active: Vec<bool>,
}

impl CellClassification {
    /// Classification from precomputed fractions; active iff `fraction >= threshold`.
    pub fn from_fractions(fractions: Vec<f64>, threshold: f64) -> Result<Self> {
        validate_threshold(threshold)?;
        let categories = fractions
            .iter()
            .map(|&f| {
                if f >= 1.0 {
                    CellCategory::Interior
                } else if f <= 0.0 {
                    CellCategory::Exterior
                } else {
                    CellCategory::Intersected
                }
            })
            .collect();
        let active = fractions.iter().map(|&f| f >= 1.0 || f >= threshold).collect();
        Ok(CellClassification {
            threshold,
            categories,
            fractions,
            active,
        })
    }

    /// Every cell active.
    pub fn all_active(n_cells: usize) -> Self {
        CellClassification {
            threshold: 1.0,
            categories: alloc::vec![CellCategory::Interior; n_cells],
            fractions: alloc::vec![1.0; n_cells],
            active: alloc::vec![true; n_cells],
        }
    }

    pub fn n_cells(&self) -> usize {
        self.active.len()
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.active[cell]
    }

    pub fn active_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(c, &a)| if a { Some(c) } else { None })
    }
}

fn validate_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid("activity threshold must lie in (0, 1]"));
    }
    Ok(())
}

pub fn cell_fractions<L: LevelSet + ?Sized>(level: &MeshLevel, phi: &L, depth: usize) -> Result<Vec<f64>> {
    if phi.dim() != level.dim {
        return Err(Error::DimensionMismatch {
            expected: level.dim,
            got: phi.dim(),
        });
    }
    Ok(level
        .cells()
        .map(|c| volume_fraction(&c.lower, &c.upper, phi, depth))
        .collect())
}

pub fn classify<L: LevelSet + ?Sized>(
    level: &MeshLevel,
    phi: &L,
    threshold: f64,
    depth: usize,
) -> Result<CellClassification> {
    validate_threshold(threshold)?;
    CellClassification::from_fractions(cell_fractions(level, phi, depth)?, threshold)
}

/// Face of an active cell on the boundary of the active region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateFace {
    pub cell: usize,
    pub axis: usize,
    pub side: Side,
}

impl SurrogateFace {
    /// Outward unit normal of the active region on this face.
    pub fn normal(&self) -> Point {
        let mut n = [0.0; MAX_DIM];
        n[self.axis] = self.side.sign();
        n
    }
}

/// Faces of active cells whose neighbor is inactive or outside the box, in
/// (cell, axis, side) order.
pub fn surrogate_boundary(level: &MeshLevel, classification: &CellClassification) -> Vec<SurrogateFace> {
    let mut faces = Vec::new();
    for cell in classification.active_cells() {
        for axis in 0..level.dim {
            for side in [Side::Low, Side::High] {
                let on_boundary = match level.neighbor_of(cell, axis, side) {
                    Neighbor::Outside => true,
                    Neighbor::Cell(nb) => !classification.is_active(nb),
                };
                if on_boundary {
                    faces.push(SurrogateFace { cell, axis, side });
                }
            }
        }
    }
    faces
}
