//! Closest-point projection from surrogate-boundary points onto `phi = 0`.

use super::LevelSet;
use crate::linalg::{DenseMatrix, LuFactor};
use crate::math::{abs, dot, norm, sqrt};
use crate::{Error, Point, Result, MAX_DIM};

/// Tolerance on `|phi(x)|` and on the stationarity residual.
pub const PROJECTION_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const MAX_TOTAL_STEPS: usize = 200;

/// Result of projecting one point onto the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Point,
    /// Set when Newton failed and the gradient-flow fallback produced the point.
    pub fallback: bool,
}

/// Surrogate point, its image on the true boundary and the derived shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftRecord {
    pub surrogate: Point,
    pub boundary: Point,
    /// `boundary - surrogate`.
    pub shift: Point,
    pub normal: Point,
    /// `sign(d . n) |d| / h`.
    pub signed_magnitude: f64,
    pub fallback: bool,
}

impl ShiftRecord {
    pub fn new(surrogate: Point, projection: Projection, normal: Point, h: f64) -> Self {
        let mut shift = [0.0; MAX_DIM];
        for k in 0..MAX_DIM {
            shift[k] = projection.point[k] - surrogate[k];
        }
        let len = norm(&shift);
        let signed_magnitude = if dot(&shift, &normal) < 0.0 { -len / h } else { len / h };
        ShiftRecord {
            surrogate,
            boundary: projection.point,
            shift,
            normal,
            signed_magnitude,
            fallback: projection.fallback,
        }
    }
}

/// Maps surrogate-boundary points to true-boundary points.
pub trait BoundaryProjector {
    fn project(&self, x: &Point) -> Result<Projection>;
}

impl<T: BoundaryProjector + ?Sized> BoundaryProjector for &T {
    fn project(&self, x: &Point) -> Result<Projection> {
        (**self).project(x)
    }
}

/// Newton projection onto the zero level set of `phi`.
#[derive(Debug, Clone, Copy)]
pub struct LevelSetProjector<L>(pub L);

impl<L: LevelSet> BoundaryProjector for LevelSetProjector<L> {
    fn project(&self, x: &Point) -> Result<Projection> {
        closest_point(x, &self.0)
    }
}

/// Projector defined by an explicit map (used where the boundary is known in closed form).
#[derive(Debug, Clone, Copy)]
pub struct FnProjector<F>(pub F);

impl<F: Fn(&Point) -> Point> BoundaryProjector for FnProjector<F> {
    fn project(&self, x: &Point) -> Result<Projection> {
        Ok(Projection {
            point: (self.0)(x),
            fallback: false,
        })
    }
}

/// Closest point to `xt` on `phi = 0`.
///
/// Newton on the Lagrangian system `2(x - xt) + mu grad phi(x) = 0`, `phi(x) = 0`,
/// started from the linearized projection. If Newton does not converge the
/// point is pulled onto the boundary by damped gradient flow and flagged.
pub fn closest_point<L: LevelSet + ?Sized>(xt: &Point, phi: &L) -> Result<Projection> {
    let dim = phi.dim();
    let f0 = phi.value(xt);
    let g0 = phi.gradient(xt);
    let gg = dot(&g0[..dim], &g0[..dim]);
    if f0 == 0.0 {
        return Ok(Projection {
            point: *xt,
            fallback: false,
        });
    }
    let mut steps = 0;
    if gg > 0.0 {
        let mut x = *xt;
        for k in 0..dim {
            x[k] -= f0 * g0[k] / gg;
        }
        let mu = 2.0 * f0 / gg;
        if let Some(p) = newton(xt, phi, x, mu, &mut steps) {
            return Ok(Projection {
                point: p,
                fallback: false,
            });
        }
    }
    gradient_flow(xt, phi, &mut steps)
}

fn newton<L: LevelSet + ?Sized>(xt: &Point, phi: &L, mut x: Point, mut mu: f64, steps: &mut usize) -> Option<Point> {
    let dim = phi.dim();
    let n = dim + 1;
    let mut jac = DenseMatrix::zeros(n, n);
    let mut rhs = [0.0; MAX_DIM + 1];
    for _ in 0..=MAX_NEWTON_ITERATIONS {
        let f = phi.value(&x);
        let g = phi.gradient(&x);
        let mut stat = 0.0;
        for k in 0..dim {
            rhs[k] = 2.0 * (x[k] - xt[k]) + mu * g[k];
            stat += rhs[k] * rhs[k];
        }
        rhs[dim] = f;
        if !f.is_finite() || !stat.is_finite() {
            return None;
        }
        if abs(f) <= PROJECTION_TOL && sqrt(stat) <= PROJECTION_TOL {
            return Some(x);
        }
        if *steps >= MAX_NEWTON_ITERATIONS {
            return None;
        }
        *steps += 1;
        let hess = phi.hessian(&x);
        for i in 0..dim {
            for j in 0..dim {
                jac[(i, j)] = mu * hess[i][j] + if i == j { 2.0 } else { 0.0 };
            }
            jac[(i, dim)] = g[i];
            jac[(dim, i)] = g[i];
        }
        jac[(dim, dim)] = 0.0;
        let lu = LuFactor::new(&jac, 1e-14).ok()?;
        let mut delta = [0.0; MAX_DIM + 1];
        delta[..n].copy_from_slice(&rhs[..n]);
        lu.solve_in_place(&mut delta[..n]);
        for k in 0..dim {
            x[k] -= delta[k];
        }
        mu -= delta[dim];
    }
    None
}

fn gradient_flow<L: LevelSet + ?Sized>(xt: &Point, phi: &L, steps: &mut usize) -> Result<Projection> {
    let dim = phi.dim();
    let mut x = *xt;
    let mut f = phi.value(&x);
    let mut tau = 1.0;
    while *steps < MAX_TOTAL_STEPS {
        if abs(f) <= PROJECTION_TOL {
            return Ok(Projection {
                point: x,
                fallback: true,
            });
        }
        *steps += 1;
        let g = phi.gradient(&x);
        let gg = dot(&g[..dim], &g[..dim]);
        if !(gg > 0.0) {
            break;
        }
        let mut trial = x;
        for k in 0..dim {
            trial[k] -= tau * f * g[k] / gg;
        }
        let ft = phi.value(&trial);
        if abs(ft) < abs(f) {
            x = trial;
            f = ft;
            tau = (2.0 * tau).min(1.0);
        } else {
            tau *= 0.5;
        }
    }
    Err(Error::ProjectionFailure {
        point: *xt,
        residual: abs(f),
    })
}

/// `(min, max)` of the signed normalized shift magnitudes.
pub fn shift_statistics(records: &[ShiftRecord]) -> Result<(f64, f64)> {
    if records.is_empty() {
        return Err(Error::invalid("no shift records"));
    }
    Ok(records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.signed_magnitude), hi.max(r.signed_magnitude))
    }))
}
