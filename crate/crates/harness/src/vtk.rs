//! Legacy ASCII VTK output of DG solutions on the active cells.
//!
//! Every active cell becomes one VTK cell with its own `(p+1)^d` nodes, so the
//! discontinuities between cells survive. Degree 1 uses the linear cell types;
//! higher degrees use the Lagrange cells with VTK's node numbering.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use sbm_core::basis::{map_from_reference, ReferenceBasis};
use sbm_core::geometry::CellClassification;
use sbm_core::mesh::MeshLevel;

const VTK_LINE: u8 = 3;
const VTK_QUAD: u8 = 9;
const VTK_HEXAHEDRON: u8 = 12;
const VTK_LAGRANGE_CURVE: u8 = 68;
const VTK_LAGRANGE_QUADRILATERAL: u8 = 70;
const VTK_LAGRANGE_HEXAHEDRON: u8 = 72;

fn cell_type(dim: usize, degree: usize) -> u8 {
    match (dim, degree) {
        (1, 1) => VTK_LINE,
        (2, 1) => VTK_QUAD,
        (3, 1) => VTK_HEXAHEDRON,
        (1, _) => VTK_LAGRANGE_CURVE,
        (2, _) => VTK_LAGRANGE_QUADRILATERAL,
        _ => VTK_LAGRANGE_HEXAHEDRON,
    }
}

/// Position of tensor node `(i, j, k)` in VTK's Lagrange ordering: vertices,
/// then edges, then faces, then the interior.
fn vtk_index(ijk: [usize; 3], p: usize, dim: usize) -> usize {
    let [i, j, k] = ijk;
    let bdy = |t: usize| t == 0 || t == p;
    let (ib, jb, kb) = (bdy(i), bdy(j), dim < 3 || bdy(k));
    let m = p - 1;
    if dim == 1 {
        return match i {
            0 => 0,
            t if t == p => 1,
            t => t + 1,
        };
    }
    let n_bdy = ib as usize + jb as usize + if dim == 3 { kb as usize } else { 0 };
    if n_bdy == dim {
        let v = if i > 0 {
            if j > 0 {
                2
            } else {
                1
            }
        } else if j > 0 {
            3
        } else {
            0
        };
        return v + if k > 0 { 4 } else { 0 };
    }
    let mut offset = if dim == 3 { 8 } else { 4 };
    if n_bdy == dim - 1 {
        if !ib {
            return (i - 1) + if j > 0 { 2 * m } else { 0 } + if k > 0 { 4 * m } else { 0 } + offset;
        }
        if !jb {
            return (j - 1) + if i > 0 { m } else { 3 * m } + if k > 0 { 4 * m } else { 0 } + offset;
        }
        offset += 8 * m;
        let slot = match (i > 0, j > 0) {
            (false, false) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (true, true) => 3,
        };
        return (k - 1) + m * slot + offset;
    }
    offset += if dim == 3 { 12 * m } else { 4 * m };
    if dim == 3 && n_bdy == 1 {
        if ib {
            return (j - 1) + m * (k - 1) + if i > 0 { m * m } else { 0 } + offset;
        }
        offset += 2 * m * m;
        if jb {
            return (i - 1) + m * (k - 1) + if j > 0 { m * m } else { 0 } + offset;
        }
        offset += 2 * m * m;
        return (i - 1) + m * (j - 1) + if k > 0 { m * m } else { 0 } + offset;
    }
    if dim == 3 {
        offset += 6 * m * m;
    }
    offset + (i - 1) + m * ((j - 1) + m * if dim == 3 { k - 1 } else { 0 })
}

/// Writes `solution` (nodal coefficients on `degree` GLL nodes) to `path`.
pub fn write_vtk(
    path: &Path,
    mesh: &MeshLevel,
    classification: &CellClassification,
    degree: usize,
    solution: &[f64],
) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_vtk_to(&mut w, mesh, classification, degree, solution)
        .and_then(|_| w.flush().map_err(Into::into))
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_vtk_to<W: Write>(
    w: &mut W,
    mesh: &MeshLevel,
    classification: &CellClassification,
    degree: usize,
    solution: &[f64],
) -> Result<()> {
    let dim = mesh.dim;
    let basis = ReferenceBasis::new(dim, degree)?;
    let n = basis.len();
    if solution.len() != mesh.n_cells() * n {
        bail!("solution has {} entries, expected {}", solution.len(), mesh.n_cells() * n);
    }
    let nodes = basis.nodes();
    // perm[v] = basis index of the node written at VTK position v
    let mut perm = vec![0; n];
    for b in 0..n {
        perm[vtk_index(basis.tensor_index(b), degree, dim)] = b;
    }
    let cells: Vec<usize> = classification.active_cells().collect();
    let n_points = cells.len() * n;

    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "sbm solution, degree {degree}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n_points} double")?;
    for &c in &cells {
        let geom = mesh.cell(c);
        for &b in &perm {
            let x = map_from_reference(&geom, dim, &nodes[b]);
            writeln!(w, "{} {} {}", x[0], x[1], x[2])?;
        }
    }
    writeln!(w, "CELLS {} {}", cells.len(), cells.len() * (n + 1))?;
    for k in 0..cells.len() {
        write!(w, "{n}")?;
        for v in 0..n {
            write!(w, " {}", k * n + v)?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {}", cells.len())?;
    let ty = cell_type(dim, degree);
    for _ in &cells {
        writeln!(w, "{ty}")?;
    }
    writeln!(w, "CELL_DATA {}", cells.len())?;
    writeln!(w, "SCALARS volume_fraction double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for &c in &cells {
        writeln!(w, "{}", classification.fractions[c])?;
    }
    writeln!(w, "POINT_DATA {n_points}")?;
    writeln!(w, "SCALARS u double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for &c in &cells {
        for &b in &perm {
            writeln!(w, "{}", solution[c * n + b])?;
        }
    }
    Ok(())
}
