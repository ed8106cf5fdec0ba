//! Eigenvalues of small dense nonsymmetric matrices: balancing, reduction to
//! upper Hessenberg form by stabilized elimination, then the Francis
//! double-shift QR iteration.

use alloc::vec;
use alloc::vec::Vec;

use super::DenseMatrix;
use crate::math::{abs, copysign, sqrt};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    pub fn abs(self) -> f64 {
        crate::math::hypot(self.re, self.im)
    }
}

pub const MAX_EIG_SIZE: usize = 64;

/// All eigenvalues of `m` (in no particular order).
pub fn small_eig(m: &DenseMatrix) -> Result<Vec<Complex>> {
    let n = m.n_rows();
    if n == 0 || n != m.n_cols() {
        return Err(Error::invalid("small_eig needs a non-empty square matrix"));
    }
    if n > MAX_EIG_SIZE {
        return Err(Error::invalid("small_eig is limited to 64x64 matrices"));
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    balance(&mut a);
    to_hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs(a[j][i]);
                    r += abs(a[i][j]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for v in a[i].iter_mut() {
                        *v *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn to_hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0;
        let mut piv = m;
        for j in m..n {
            if abs(a[j][m - 1]) > abs(x) {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let t = a[piv][j];
                a[piv][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut() {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    // drop the elimination multipliers stored below the subdiagonal
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[i][j] = 0.0;
        }
    }
}

fn hessenberg_qr(a: &mut [Vec<f64>]) -> Result<Vec<Complex>> {
    let n = a.len();
    let max_sweeps = 100 * n;
    let mut out = vec![Complex::default(); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += abs(a[i][j]);
        }
    }
    let eps = f64::EPSILON;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let mut sweeps = 0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = abs(a[l - 1][l - 1]) + abs(a[l][l]);
                if s == 0.0 {
                    s = anorm;
                }
                if abs(a[l][l - 1]) <= eps * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                out[nu] = Complex::new(x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = sqrt(abs(q));
                x += t;
                if q >= 0.0 {
                    z = p + copysign(z, p);
                    out[nu - 1] = Complex::new(x + z, 0.0);
                    out[nu] = Complex::new(if z != 0.0 { x - w / z } else { x + z }, 0.0);
                } else {
                    out[nu] = Complex::new(x + p, -z);
                    out[nu - 1] = Complex::new(x + p, z);
                }
                nn -= 2;
                break;
            }
            if sweeps >= max_sweeps {
                return Err(Error::NoConvergence { sweeps });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = abs(a[nu][nu - 1]) + abs(a[nu - 1][nu - 2]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            sweeps += 1;

            let (mut p, mut q, mut r);
            let mut z;
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = abs(a[m][m - 1]) * (abs(q) + abs(r));
                let v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]));
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[i + 2][i] = 0.0;
                if i != m {
                    a[i + 2][i - 1] = 0.0;
                }
            }
            for k in m..nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != nu { a[k + 2][k - 1] } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = copysign(sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = x * row[k] + y * row[k + 1];
                        if k + 1 != nu {
                            pp += z * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
            }
        }
    }
    Ok(out)
}
