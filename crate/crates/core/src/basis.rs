//! Tensor-product Lagrange bases on the reference cell `[0,1]^d` and Gauss rules.
//!
//! Basis functions are plain polynomials, so they can be evaluated anywhere in
//! `R^d`; evaluating outside the reference cell is how the boundary extension
//! of a discrete solution is realized.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, cos};
use crate::mesh::{Cell, Side};
use crate::{Error, Point, Result, MAX_DIM};

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 8;
const MAX_NODES: usize = MAX_DEGREE + 1;

/// Cardinal Lagrange polynomials on a set of distinct 1D nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrange1d {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Lagrange1d {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() > MAX_NODES {
            return Err(Error::invalid("1D Lagrange basis needs 1..=9 nodes"));
        }
        let mut weights = Vec::with_capacity(nodes.len());
        for (j, &xj) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (m, &xm) in nodes.iter().enumerate() {
                if m != j {
                    let diff = xj - xm;
                    if diff == 0.0 {
                        return Err(Error::invalid("Lagrange nodes must be distinct"));
                    }
                    w /= diff;
                }
            }
            weights.push(w);
        }
        Ok(Lagrange1d { nodes, weights })
    }

    /// Equispaced nodes on `[0,1]` (a single midpoint node for degree 0).
    pub fn equispaced(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Self::new(vec![0.5]);
        }
        Self::new((0..=degree).map(|i| i as f64 / degree as f64).collect())
    }

    /// Vertices for degree 1, Gauss-Lobatto points for higher degrees.
    pub fn gauss_lobatto(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Self::new(vec![0.5]);
        }
        Self::new(gauss_lobatto_points(degree))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values and optionally first and second derivatives of every cardinal
    /// polynomial at `x`.
    pub fn eval(&self, x: f64, values: &mut [f64], d1: Option<&mut [f64]>, d2: Option<&mut [f64]>) {
        let n = self.nodes.len();
        let mut diff = [0.0; MAX_NODES];
        for (m, &xm) in self.nodes.iter().enumerate() {
            diff[m] = x - xm;
        }
        // product of diffs over all nodes except the listed ones
        let prod_except = |skip: &[usize]| -> f64 {
            let mut p = 1.0;
            for (m, &dm) in diff[..n].iter().enumerate() {
                if !skip.contains(&m) {
                    p *= dm;
                }
            }
            p
        };
        for j in 0..n {
            values[j] = self.weights[j] * prod_except(&[j]);
        }
        if let Some(d1) = d1 {
            for j in 0..n {
                let mut s = 0.0;
                for k in (0..n).filter(|&k| k != j) {
                    s += prod_except(&[j, k]);
                }
                d1[j] = self.weights[j] * s;
            }
        }
        if let Some(d2) = d2 {
            for j in 0..n {
                let mut s = 0.0;
                for k in (0..n).filter(|&k| k != j) {
                    for l in (0..n).filter(|&l| l != j && l != k) {
                        s += prod_except(&[j, k, l]);
                    }
                }
                d2[j] = self.weights[j] * s;
            }
        }
    }
}

/// Gauss-Lobatto points on `[0,1]` for `degree >= 1` (`degree + 1` points).
pub fn gauss_lobatto_points(degree: usize) -> Vec<f64> {
    let n = degree;
    let mut pts = vec![0.0; n + 1];
    pts[0] = -1.0;
    pts[n] = 1.0;
    for i in 1..n {
        // interior points are the roots of P_n'
        let mut x = -cos(core::f64::consts::PI * i as f64 / n as f64);
        for _ in 0..100 {
            let (p, p_prev) = legendre(n, x);
            let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
            let ddp = (2.0 * x * dp - (n * (n + 1)) as f64 * p) / (1.0 - x * x);
            let step = dp / ddp;
            x -= step;
            if abs(step) < 1e-16 {
                break;
            }
        }
        pts[i] = x;
    }
    pts.iter().map(|x| 0.5 * (x + 1.0)).collect()
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Gauss-Legendre points and weights on `[0,1]`.
pub fn gauss_legendre(n_points: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n_points;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, p_prev) = legendre(n, t);
            let dp = n as f64 * (t * p - p_prev) / (t * t - 1.0);
            let step = p / dp;
            t -= step;
            if abs(step) < 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre(n, t);
        let dp = n as f64 * (t * p - p_prev) / (t * t - 1.0);
        // ascending order on [0,1]
        x[n - 1 - i] = 0.5 * (t + 1.0);
        w[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Where a quadrature rule lives on the reference cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureDomain {
    Cell,
    Face { axis: usize, side: Side },
}

/// Tensor-product Gauss rule on the reference cell or one of its faces. Face
/// rules are embedded in `d` dimensions with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(points_per_axis: usize, dim: usize, domain: QuadratureDomain) -> Result<Self> {
        if points_per_axis == 0 {
            return Err(Error::invalid("quadrature order must be at least 1"));
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid("dimension must be 1, 2 or 3"));
        }
        let (x1, w1) = gauss_legendre(points_per_axis);
        let axes: Vec<usize> = match domain {
            QuadratureDomain::Cell => (0..dim).collect(),
            QuadratureDomain::Face { axis, .. } => (0..dim).filter(|&k| k != axis).collect(),
        };
        let count = points_per_axis.pow(axes.len() as u32);
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for q in 0..count {
            let mut pt = [0.0; MAX_DIM];
            let mut w = 1.0;
            let mut rest = q;
            for &k in &axes {
                let i = rest % points_per_axis;
                rest /= points_per_axis;
                pt[k] = x1[i];
                w *= w1[i];
            }
            if let QuadratureDomain::Face { axis, side } = domain {
                pt[axis] = side.coordinate();
            }
            points.push(pt);
            weights.push(w);
        }
        Ok(QuadratureRule {
            dim,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `points_per_axis`-point Gauss rule; exact for degree `2 * points_per_axis - 1` per axis.
pub fn quadrature(points_per_axis: usize, dim: usize, domain: QuadratureDomain) -> Result<QuadratureRule> {
    QuadratureRule::new(points_per_axis, dim, domain)
}

/// Tensor-product Lagrange basis of degree `p` on `[0,1]^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    dim: usize,
    degree: usize,
    line: Lagrange1d,
}

impl ReferenceBasis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid("dimension must be 1, 2 or 3"));
        }
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::invalid("polynomial degree must be in 1..=8"));
        }
        Ok(ReferenceBasis {
            dim,
            degree,
            line: Lagrange1d::gauss_lobatto(degree)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes_1d(&self) -> &[f64] {
        self.line.nodes()
    }

    pub fn line(&self) -> &Lagrange1d {
        &self.line
    }

    /// Number of basis functions, `(p+1)^d`.
    pub fn len(&self) -> usize {
        (self.degree + 1).pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Tensor index of basis function `i`, first axis fastest.
    pub fn tensor_index(&self, i: usize) -> [usize; MAX_DIM] {
        let n = self.degree + 1;
        let mut t = [0; MAX_DIM];
        let mut rest = i;
        for k in 0..self.dim {
            t[k] = rest % n;
            rest /= n;
        }
        t
    }

    /// Reference coordinates of the nodes, ordered like the basis functions.
    pub fn nodes(&self) -> Vec<Point> {
        (0..self.len())
            .map(|i| {
                let t = self.tensor_index(i);
                let mut x = [0.0; MAX_DIM];
                for k in 0..self.dim {
                    x[k] = self.line.nodes()[t[k]];
                }
                x
            })
            .collect()
    }

    /// Values (and reference gradients) of all basis functions at `xi`, which
    /// may lie outside the reference cell.
    pub fn eval_into(&self, xi: &Point, values: &mut [f64], gradients: Option<&mut [Point]>) {
        let n = self.degree + 1;
        let mut v1 = [[0.0; MAX_NODES]; MAX_DIM];
        let mut d1 = [[0.0; MAX_NODES]; MAX_DIM];
        let want_grad = gradients.is_some();
        for k in 0..self.dim {
            let (vk, dk) = (&mut v1[k], &mut d1[k]);
            if want_grad {
                self.line.eval(xi[k], &mut vk[..n], Some(&mut dk[..n]), None);
            } else {
                self.line.eval(xi[k], &mut vk[..n], None, None);
            }
        }
        let len = self.len();
        for i in 0..len {
            let t = self.tensor_index(i);
            values[i] = (0..self.dim).map(|k| v1[k][t[k]]).product();
        }
        if let Some(grads) = gradients {
            for (i, g) in grads.iter_mut().enumerate().take(len) {
                let t = self.tensor_index(i);
                *g = [0.0; MAX_DIM];
                for a in 0..self.dim {
                    g[a] = (0..self.dim)
                        .map(|k| if k == a { d1[k][t[k]] } else { v1[k][t[k]] })
                        .product();
                }
            }
        }
    }

    pub fn eval(&self, xi: &Point, need_gradient: bool) -> (Vec<f64>, Option<Vec<Point>>) {
        let mut values = vec![0.0; self.len()];
        if need_gradient {
            let mut grads = vec![[0.0; MAX_DIM]; self.len()];
            self.eval_into(xi, &mut values, Some(&mut grads));
            (values, Some(grads))
        } else {
            self.eval_into(xi, &mut values, None);
            (values, None)
        }
    }
}

/// Values and reference gradients of a basis tabulated at the points of a rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub gradients: Vec<Point>,
}

impl Tabulation {
    pub fn new(basis: &ReferenceBasis, points: &[Point]) -> Self {
        let n = basis.len();
        let mut values = vec![0.0; n * points.len()];
        let mut gradients = vec![[0.0; MAX_DIM]; n * points.len()];
        for (q, pt) in points.iter().enumerate() {
            basis.eval_into(
                pt,
                &mut values[q * n..(q + 1) * n],
                Some(&mut gradients[q * n..(q + 1) * n]),
            );
        }
        Tabulation {
            n_basis: n,
            values,
            gradients,
        }
    }

    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    pub fn gradients_at(&self, q: usize) -> &[Point] {
        &self.gradients[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

/// Affine map from physical coordinates to the reference coordinates of an
/// axis-aligned cell; defined for points outside the cell as well.
pub fn map_to_reference(cell: &Cell, dim: usize, x: &Point) -> Point {
    let mut xi = [0.0; MAX_DIM];
    for k in 0..dim {
        xi[k] = (x[k] - cell.lower[k]) / cell.size(k);
    }
    xi
}

pub fn map_from_reference(cell: &Cell, dim: usize, xi: &Point) -> Point {
    let mut x = [0.0; MAX_DIM];
    for k in 0..dim {
        x[k] = cell.lower[k] + xi[k] * cell.size(k);
    }
    x
}
