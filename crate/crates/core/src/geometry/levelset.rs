//! Level-set descriptions of the domain `Omega = { x : phi(x) < 0 }`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::Lagrange1d;
use crate::math::{abs, cos, sin};
use crate::mesh::MeshLevel;
use crate::{Error, Point, Result, MAX_DIM};

pub type Hessian = [[f64; MAX_DIM]; MAX_DIM];

/// A level-set function with first and second derivatives.
pub trait LevelSet: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Point;
    fn hessian(&self, x: &Point) -> Hessian;
}

impl<T: LevelSet + ?Sized> LevelSet for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &Point) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point) -> Point {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &Point) -> Hessian {
        (**self).hessian(x)
    }
}

impl<T: LevelSet + ?Sized> LevelSet for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &Point) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &Point) -> Point {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &Point) -> Hessian {
        (**self).hessian(x)
    }
}

/// Unit ball: `phi = |x|^2 - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitBall {
    pub dim: usize,
}

impl LevelSet for UnitBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point) -> f64 {
        (0..self.dim).map(|k| x[k] * x[k]).sum::<f64>() - 1.0
    }

    fn gradient(&self, x: &Point) -> Point {
        let mut g = [0.0; MAX_DIM];
        for k in 0..self.dim {
            g[k] = 2.0 * x[k];
        }
        g
    }

    fn hessian(&self, _x: &Point) -> Hessian {
        let mut h = [[0.0; MAX_DIM]; MAX_DIM];
        for k in 0..self.dim {
            h[k][k] = 2.0;
        }
        h
    }
}

/// Deformed 2D domain `phi = (1 - 3/4 sin^2(pi x)) (x^2 + y^2) - 1/5`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeformedDomain;

impl DeformedDomain {
    // modulation a(x) = 1 - 3/4 sin^2(pi x) and its first two derivatives
    fn modulation(x: f64) -> (f64, f64, f64) {
        let s = sin(PI * x);
        let a = 1.0 - 0.75 * s * s;
        let da = -0.75 * PI * sin(2.0 * PI * x);
        let dda = -1.5 * PI * PI * cos(2.0 * PI * x);
        (a, da, dda)
    }

    /// `Delta phi`, used for the manufactured source term.
    pub fn laplacian(&self, x: &Point) -> f64 {
        let (a, da, dda) = Self::modulation(x[0]);
        let r2 = x[0] * x[0] + x[1] * x[1];
        dda * r2 + 4.0 * x[0] * da + 4.0 * a
    }
}

impl LevelSet for DeformedDomain {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &Point) -> f64 {
        let (a, _, _) = Self::modulation(x[0]);
        a * (x[0] * x[0] + x[1] * x[1]) - 0.2
    }

    fn gradient(&self, x: &Point) -> Point {
        let (a, da, _) = Self::modulation(x[0]);
        let r2 = x[0] * x[0] + x[1] * x[1];
        [da * r2 + 2.0 * a * x[0], 2.0 * a * x[1], 0.0]
    }

    fn hessian(&self, x: &Point) -> Hessian {
        let (a, da, dda) = Self::modulation(x[0]);
        let r2 = x[0] * x[0] + x[1] * x[1];
        let hxy = 2.0 * da * x[1];
        [
            [dda * r2 + 4.0 * x[0] * da + 2.0 * a, hxy, 0.0],
            [hxy, 2.0 * a, 0.0],
            [0.0; MAX_DIM],
        ]
    }
}

/// Axis-aligned box `max_k (|x_k - c_k| - a_k)`; its boundary can be made to
/// coincide with mesh faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisBox {
    pub dim: usize,
    pub center: Point,
    pub half_widths: Point,
}

impl AxisBox {
    fn active_axis(&self, x: &Point) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for k in 0..self.dim {
            let v = abs(x[k] - self.center[k]) - self.half_widths[k];
            if v > best_v {
                best_v = v;
                best = k;
            }
        }
        best
    }
}

impl LevelSet for AxisBox {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point) -> f64 {
        (0..self.dim)
            .map(|k| abs(x[k] - self.center[k]) - self.half_widths[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn gradient(&self, x: &Point) -> Point {
        let k = self.active_axis(x);
        let mut g = [0.0; MAX_DIM];
        g[k] = if x[k] >= self.center[k] { 1.0 } else { -1.0 };
        g
    }

    fn hessian(&self, _x: &Point) -> Hessian {
        [[0.0; MAX_DIM]; MAX_DIM]
    }
}

/// Spatially constant level set (`phi < 0` makes every cell interior).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLevelSet {
    pub dim: usize,
    pub value: f64,
}

impl LevelSet for ConstantLevelSet {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &Point) -> f64 {
        self.value
    }
    fn gradient(&self, _x: &Point) -> Point {
        [0.0; MAX_DIM]
    }
    fn hessian(&self, _x: &Point) -> Hessian {
        [[0.0; MAX_DIM]; MAX_DIM]
    }
}

/// User-supplied analytic level set with analytic derivatives.
pub struct AnalyticLevelSet<F, G, H> {
    pub dim: usize,
    pub value: F,
    pub gradient: G,
    pub hessian: H,
}

impl<F, G, H> LevelSet for AnalyticLevelSet<F, G, H>
where
    F: Fn(&Point) -> f64 + Sync,
    G: Fn(&Point) -> Point + Sync,
    H: Fn(&Point) -> Hessian + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Point) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: &Point) -> Point {
        (self.gradient)(x)
    }
    fn hessian(&self, x: &Point) -> Hessian {
        (self.hessian)(x)
    }
}

/// Named geometries available from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Unit disk (2D) or unit sphere (3D).
    Disk,
    Deformed,
}

impl Geometry {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "disk" | "sphere" => Some(Geometry::Disk),
            "deformed" => Some(Geometry::Deformed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Disk => "disk",
            Geometry::Deformed => "deformed",
        }
    }

    pub fn level_set(self, dim: usize) -> Result<Box<dyn LevelSet>> {
        match self {
            Geometry::Disk => Ok(Box::new(UnitBall { dim })),
            Geometry::Deformed if dim == 2 => Ok(Box::new(DeformedDomain)),
            Geometry::Deformed => Err(Error::invalid("the deformed domain is two-dimensional")),
        }
    }
}

/// Interpolation degree used for the geometry at solver degree `p`.
pub fn interpolation_degree(p: usize) -> usize {
    if p <= 1 {
        2
    } else {
        p
    }
}

/// Continuous tensor-product Lagrange interpolant of a level set on the nodes
/// of a background mesh level (equispaced nodes per cell, shared on faces).
/// Derivatives are those of the cell-wise polynomial; points outside the
/// mesh box are evaluated by extrapolating from the nearest cell.
#[derive(Debug, Clone)]
pub struct InterpolatedLevelSet {
    mesh: MeshLevel,
    degree: usize,
    line: Lagrange1d,
    nodes_per_axis: usize,
    values: Vec<f64>,
}

impl InterpolatedLevelSet {
    pub fn new<L: LevelSet + ?Sized>(phi: &L, mesh: &MeshLevel, degree: usize) -> Result<Self> {
        if degree == 0 || degree > crate::basis::MAX_DEGREE {
            return Err(Error::invalid("interpolation degree must be in 1..=8"));
        }
        if phi.dim() != mesh.dim {
            return Err(Error::DimensionMismatch {
                expected: mesh.dim,
                got: phi.dim(),
            });
        }
        let nodes_per_axis = mesh.cells_per_axis * degree + 1;
        let total = nodes_per_axis.pow(mesh.dim as u32);
        let mut values = vec![0.0; total];
        for (idx, v) in values.iter_mut().enumerate() {
            let mut x = [0.0; MAX_DIM];
            let mut rest = idx;
            for k in 0..mesh.dim {
                let i = rest % nodes_per_axis;
                rest /= nodes_per_axis;
                x[k] = mesh.lower[k] + mesh.cell_size[k] * i as f64 / degree as f64;
            }
            *v = phi.value(&x);
        }
        Ok(InterpolatedLevelSet {
            mesh: mesh.clone(),
            degree,
            line: Lagrange1d::equispaced(degree)?,
            nodes_per_axis,
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, x: &Point, order: usize) -> (f64, Point, Hessian) {
        let dim = self.mesh.dim;
        let n = self.degree + 1;
        let cell = self.mesh.cell(self.mesh.locate(x));
        let mut v1 = [[0.0; 9]; MAX_DIM];
        let mut d1 = [[0.0; 9]; MAX_DIM];
        let mut d2 = [[0.0; 9]; MAX_DIM];
        for k in 0..dim {
            let h = self.mesh.cell_size[k];
            let xi = (x[k] - cell.lower[k]) / h;
            let (vk, dk, ddk) = (&mut v1[k], &mut d1[k], &mut d2[k]);
            match order {
                0 => self.line.eval(xi, &mut vk[..n], None, None),
                1 => self.line.eval(xi, &mut vk[..n], Some(&mut dk[..n]), None),
                _ => self
                    .line
                    .eval(xi, &mut vk[..n], Some(&mut dk[..n]), Some(&mut ddk[..n])),
            }
            for j in 0..n {
                dk[j] /= h;
                ddk[j] /= h * h;
            }
        }
        // gather the cell's coefficients, first axis fastest
        let mut coeffs = [0.0; 9 * 9 * 9];
        let local = n.pow(dim as u32);
        for (i, c) in coeffs.iter_mut().enumerate().take(local) {
            let mut rest = i;
            let mut gidx = 0;
            let mut stride = 1;
            for k in 0..dim {
                let t = rest % n;
                rest /= n;
                gidx += (cell.multi_index[k] * self.degree + t) * stride;
                stride *= self.nodes_per_axis;
            }
            *c = self.values[gidx];
        }
        let coeffs = &coeffs[..local];
        let value = contract(coeffs, n, dim, [&v1[0][..n], &v1[1][..n], &v1[2][..n]]);
        let mut grad = [0.0; MAX_DIM];
        let mut hess = [[0.0; MAX_DIM]; MAX_DIM];
        if order >= 1 {
            for a in 0..dim {
                let mut f = [&v1[0][..n], &v1[1][..n], &v1[2][..n]];
                f[a] = &d1[a][..n];
                grad[a] = contract(coeffs, n, dim, f);
            }
        }
        if order >= 2 {
            for a in 0..dim {
                for b in a..dim {
                    let mut f = [&v1[0][..n], &v1[1][..n], &v1[2][..n]];
                    if a == b {
                        f[a] = &d2[a][..n];
                    } else {
                        f[a] = &d1[a][..n];
                        f[b] = &d1[b][..n];
                    }
                    hess[a][b] = contract(coeffs, n, dim, f);
                    hess[b][a] = hess[a][b];
                }
            }
        }
        (value, grad, hess)
    }
}

/// `sum_t c[t] f0[t0] f1[t1] f2[t2]` over a tensor array with first axis fastest.
fn contract(c: &[f64], n: usize, dim: usize, f: [&[f64]; MAX_DIM]) -> f64 {
    match dim {
        1 => (0..n).map(|i| c[i] * f[0][i]).sum(),
        2 => (0..n)
            .map(|j| f[1][j] * (0..n).map(|i| c[j * n + i] * f[0][i]).sum::<f64>())
            .sum(),
        _ => (0..n)
            .map(|k| {
                f[2][k]
                    * (0..n)
                        .map(|j| f[1][j] * (0..n).map(|i| c[(k * n + j) * n + i] * f[0][i]).sum::<f64>())
                        .sum::<f64>()
            })
            .sum(),
    }
}

impl LevelSet for InterpolatedLevelSet {
    fn dim(&self) -> usize {
        self.mesh.dim
    }

    fn value(&self, x: &Point) -> f64 {
        self.eval(x, 0).0
    }

    fn gradient(&self, x: &Point) -> Point {
        self.eval(x, 1).1
    }

    fn hessian(&self, x: &Point) -> Hessian {
        self.eval(x, 2).2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshBox;

    fn fd_check<L: LevelSet>(phi: &L, x: &Point) {
        let step = 1e-6;
        let g = phi.gradient(x);
        let h = phi.hessian(x);
        for a in 0..phi.dim() {
            let mut xp = *x;
            let mut xm = *x;
            xp[a] += step;
            xm[a] -= step;
            let fd = (phi.value(&xp) - phi.value(&xm)) / (2.0 * step);
            assert!((fd - g[a]).abs() < 1e-6, "grad {a}: {fd} vs {}", g[a]);
            let gp = phi.gradient(&xp);
            let gm = phi.gradient(&xm);
            for b in 0..phi.dim() {
                let fd2 = (gp[b] - gm[b]) / (2.0 * step);
                assert!((fd2 - h[b][a]).abs() < 1e-5, "hess {a}{b}");
            }
        }
    }

    #[test]
    fn deformed_derivatives_match_finite_differences() {
        for x in [[0.3, 0.3, 0.0], [-0.41, 0.17, 0.0], [0.05, -0.6, 0.0]] {
            fd_check(&DeformedDomain, &x);
            let d = DeformedDomain;
            let h = d.hessian(&x);
            assert!((d.laplacian(&x) - (h[0][0] + h[1][1])).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_derivatives() {
        fd_check(&UnitBall { dim: 3 }, &[0.2, -0.5, 0.7]);
    }

    #[test]
    fn interpolation_reproduces_quadratics() {
        let b = MeshBox::standard(2).unwrap();
        let m = MeshLevel::new(&b, 1).unwrap();
        let ball = UnitBall { dim: 2 };
        let interp = InterpolatedLevelSet::new(&ball, &m, 2).unwrap();
        for x in [[0.3, 0.1, 0.0], [-0.77, 0.52, 0.0], [1.2, -1.3, 0.0]] {
            assert!((interp.value(&x) - ball.value(&x)).abs() < 1e-12);
            let g = interp.gradient(&x);
            let h = interp.hessian(&x);
            for k in 0..2 {
                assert!((g[k] - 2.0 * x[k]).abs() < 1e-11);
                assert!((h[k][k] - 2.0).abs() < 1e-9);
            }
            assert!(h[0][1].abs() < 1e-9);
        }
    }

    #[test]
    fn interpolation_converges_for_deformed() {
        let b = MeshBox::standard(2).unwrap();
        let mut errs = Vec::new();
        for level in [2, 3, 4] {
            let m = MeshLevel::new(&b, level).unwrap();
            let interp = InterpolatedLevelSet::new(&DeformedDomain, &m, 2).unwrap();
            let mut e: f64 = 0.0;
            for i in 0..40 {
                for j in 0..40 {
                    let x = [-0.9 + 0.045 * i as f64 + 0.001, -0.9 + 0.045 * j as f64 + 0.002, 0.0];
                    e = e.max((interp.value(&x) - DeformedDomain.value(&x)).abs());
                }
            }
            errs.push(e);
        }
        // third order: two halvings should gain close to 64
        assert!(errs[2] < errs[0] / 32.0, "{errs:?}");
    }

    #[test]
    fn catalog() {
        assert_eq!(Geometry::from_name("disk"), Some(Geometry::Disk));
        assert!(Geometry::Deformed.level_set(3).is_err());
        assert_eq!(interpolation_degree(1), 2);
        assert_eq!(interpolation_degree(3), 3);
    }
}
