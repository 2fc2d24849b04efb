//! Preconditioned conjugate gradients and restarted GMRES.
//!
//! Both solvers report the true relative residual `|b - A x| / |b|`,
//! recomputed from the returned iterate, never the recursively updated one.

use crate::error::{Error, Result};
use crate::linsolve::SparseMatrix;

pub const DEFAULT_RESTART: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative 2-norm residual of the returned solution.
    pub final_residual: f64,
    pub converged: bool,
}

impl SolveReport {
    pub fn trivial() -> Self {
        Self {
            iterations: 0,
            final_residual: 0.0,
            converged: true,
        }
    }

    /// Turns a non-converged report into an error.
    pub fn require(self, solver: &'static str) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged { solver, report: self })
        }
    }
}

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_into(x, y);
    }
}

/// Matrix-free operator from a closure.
pub struct FnOperator<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

pub struct IdentityPrecond;

impl Preconditioner for IdentityPrecond {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    /// `None` if any diagonal entry is zero or non-finite.
    pub fn new(a: &SparseMatrix) -> Option<Self> {
        let d = a.diagonal();
        if d.len() != a.nrows() || d.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return None;
        }
        Some(Self {
            inv_diag: d.iter().map(|v| 1.0 / v).collect(),
        })
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(op: &dyn LinearOperator, b: &[f64], x: &[f64], r: &mut [f64]) {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

fn check_dims(op: &dyn LinearOperator, b: &[f64], x0: Option<&[f64]>) -> Result<()> {
    if b.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            got: b.len(),
        });
    }
    if let Some(x0) = x0 {
        if x0.len() != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                got: x0.len(),
            });
        }
    }
    Ok(())
}

/// Relative residual of `x` for `A x = b` (absolute if `b = 0`).
pub fn relative_residual(op: &dyn LinearOperator, b: &[f64], x: &[f64]) -> f64 {
    let mut r = vec![0.0; b.len()];
    residual(op, b, x, &mut r);
    let nb = norm(b);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

/// Preconditioned CG for symmetric positive (semi-)definite operators.
pub fn pcg(
    op: &dyn LinearOperator,
    pc: &dyn Preconditioner,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    check_dims(op, b, x0)?;
    let n = b.len();
    let nb = norm(b);
    if nb == 0.0 {
        return Ok((vec![0.0; n], SolveReport::trivial()));
    }
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut it = 0;
    let mut refreshes = 0;

    residual(op, b, &x, &mut r);
    'outer: loop {
        if norm(&r) <= tol * nb {
            break;
        }
        pc.apply(&r, &mut z);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        while it < maxit {
            op.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::Breakdown {
                    solver: "cg",
                    iteration: it,
                    reason: "non-positive curvature",
                });
            }
            let alpha = rz / pap;
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            it += 1;
            if norm(&r) <= tol * nb {
                // confirm against the true residual before stopping
                residual(op, b, &x, &mut r);
                if norm(&r) <= tol * nb || refreshes >= 3 {
                    break 'outer;
                }
                refreshes += 1;
                continue 'outer;
            }
            pc.apply(&r, &mut z);
            let rz_new = dot(&r, &z);
            if !(rz_new > 0.0) {
                return Err(Error::Breakdown {
                    solver: "cg",
                    iteration: it,
                    reason: "indefinite preconditioner",
                });
            }
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        break;
    }
    let res = relative_residual(op, b, &x);
    Ok((
        x,
        SolveReport {
            iterations: it,
            final_residual: res,
            converged: res <= tol,
        },
    ))
}

/// Right-preconditioned restarted GMRES (modified Gram-Schmidt, Givens).
pub fn pgmres(
    op: &dyn LinearOperator,
    pc: &dyn Preconditioner,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    maxit: usize,
    restart: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    check_dims(op, b, x0)?;
    if restart == 0 {
        return Err(Error::InvalidParameter("gmres restart length must be positive".into()));
    }
    let n = b.len();
    let nb = norm(b);
    if nb == 0.0 {
        return Ok((vec![0.0; n], SolveReport::trivial()));
    }
    let m = restart;
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = vec![0.0; n];
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    let mut zs: Vec<Vec<f64>> = vec![vec![0.0; n]; m];
    let mut h = vec![vec![0.0; m]; m + 1];
    let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];
    let mut it = 0;

    loop {
        residual(op, b, &x, &mut r);
        let beta = norm(&r);
        if beta <= tol * nb || it >= maxit {
            break;
        }
        for k in 0..n {
            v[0][k] = r[k] / beta;
        }
        g.iter_mut().for_each(|e| *e = 0.0);
        g[0] = beta;
        let mut j_used = 0;
        for j in 0..m {
            if it >= maxit {
                break;
            }
            pc.apply(&v[j], &mut zs[j]);
            op.apply(&zs[j], &mut w);
            for i in 0..=j {
                let hij = dot(&w, &v[i]);
                h[i][j] = hij;
                for k in 0..n {
                    w[k] -= hij * v[i][k];
                }
            }
            let hn = norm(&w);
            h[j + 1][j] = hn;
            if hn > 0.0 {
                for k in 0..n {
                    v[j + 1][k] = w[k] / hn;
                }
            }
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let den = h[j][j].hypot(h[j + 1][j]);
            if den == 0.0 {
                return Err(Error::Breakdown {
                    solver: "gmres",
                    iteration: it,
                    reason: "singular Hessenberg matrix",
                });
            }
            cs[j] = h[j][j] / den;
            sn[j] = h[j + 1][j] / den;
            h[j][j] = den;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            it += 1;
            j_used = j + 1;
            if g[j + 1].abs() <= tol * nb || hn == 0.0 {
                break;
            }
        }
        let mut y = vec![0.0; j_used];
        for i in (0..j_used).rev() {
            let mut s = g[i];
            for k in i + 1..j_used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for k in 0..n {
                x[k] += yi * zs[i][k];
            }
        }
    }
    let res = relative_residual(op, b, &x);
    Ok((
        x,
        SolveReport {
            iterations: it,
            final_residual: res,
            converged: res <= tol,
        },
    ))
}

/// Jacobi-preconditioned CG on an assembled SPD (or consistent semi-definite) matrix.
pub fn cg_solve(a: &SparseMatrix, b: &[f64], tol: f64, maxit: usize) -> Result<(Vec<f64>, SolveReport)> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    match Jacobi::new(a) {
        Some(j) => pcg(a, &j, b, None, tol, maxit),
        None => pcg(a, &IdentityPrecond, b, None, tol, maxit),
    }
}

/// Restarted GMRES with right Jacobi preconditioning (plain GMRES if the
/// diagonal has zeros).
pub fn gmres_solve(
    a: &SparseMatrix,
    b: &[f64],
    tol: f64,
    maxit: usize,
    restart: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    match Jacobi::new(a) {
        Some(j) => pgmres(a, &j, b, None, tol, maxit, restart),
        None => pgmres(a, &IdentityPrecond, b, None, tol, maxit, restart),
    }
}
