//! Fast diagonalization of constant-coefficient 5-point operators.
//!
//! The 1D second-difference matrices with Neumann (cell centered),
//! Dirichlet (node centered) and reflected-ghost Dirichlet (cell centered)
//! closures have closed-form orthonormal eigenbases. A separable 2D operator
//! `f(Lx, Ly)` is inverted by transforming along each axis, scaling each
//! mode and transforming back. Transforms are dense matrix products per
//! axis, so one solve costs `O(nx ny (nx + ny))`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DMatrixView};

use crate::grid::GridSpec;

#[derive(Debug, Clone)]
pub struct Basis1D {
    n: usize,
    /// `mat[k * n + i]`: mode `k` at point `i`.
    mat: Vec<f64>,
    eig: Vec<f64>,
}

fn second_difference_eig(k: usize, n: usize, h: f64) -> f64 {
    let s = (PI * k as f64 / (2.0 * n as f64)).sin();
    -4.0 / (h * h) * s * s
}

impl Basis1D {
    /// `n` cells, zero-flux ends: `cos(pi k (i + 1/2) / n)`, `k = 0..n`.
    pub fn neumann_cells(n: usize, h: f64) -> Self {
        let mut mat = vec![0.0; n * n];
        let mut eig = vec![0.0; n];
        for k in 0..n {
            let c = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for i in 0..n {
                mat[k * n + i] = c * (PI * k as f64 * (i as f64 + 0.5) / n as f64).cos();
            }
            eig[k] = second_difference_eig(k, n, h);
        }
        Self { n, mat, eig }
    }

    /// The `n - 1` interior nodes of `n` cells, zero at both ends.
    pub fn dirichlet_nodes(n: usize, h: f64) -> Self {
        let m = n - 1;
        let c = (2.0 / n as f64).sqrt();
        let mut mat = vec![0.0; m * m];
        let mut eig = vec![0.0; m];
        for k in 1..n {
            for i in 1..n {
                mat[(k - 1) * m + (i - 1)] = c * (PI * (k * i) as f64 / n as f64).sin();
            }
            eig[k - 1] = second_difference_eig(k, n, h);
        }
        Self { n: m, mat, eig }
    }

    /// `n` cells with zero value imposed at the walls by odd reflection
    /// (ghost = -interior): `sin(pi k (j + 1/2) / n)`, `k = 1..=n`.
    pub fn dirichlet_cells(n: usize, h: f64) -> Self {
        let mut mat = vec![0.0; n * n];
        let mut eig = vec![0.0; n];
        for k in 1..=n {
            let c = if k == n { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for j in 0..n {
                mat[(k - 1) * n + j] = c * (PI * k as f64 * (j as f64 + 0.5) / n as f64).sin();
            }
            eig[k - 1] = second_difference_eig(k, n, h);
        }
        Self { n, mat, eig }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig
    }
}

/// Tensor-product eigenbasis on an `nx` by `ny` block, x index fastest.
#[derive(Debug, Clone)]
pub struct FastDiag {
    bx: Basis1D,
    by: Basis1D,
    /// Columns are the x modes.
    qx: DMatrix<f64>,
    /// Columns are the y modes.
    qy: DMatrix<f64>,
}

fn mode_matrix(b: &Basis1D) -> DMatrix<f64> {
    DMatrix::from_fn(b.n, b.n, |i, k| b.mat[k * b.n + i])
}

impl FastDiag {
    pub fn new(bx: Basis1D, by: Basis1D) -> Self {
        let qx = mode_matrix(&bx);
        let qy = mode_matrix(&by);
        Self { bx, by, qx, qy }
    }

    /// Cell-centered pure Neumann Laplacian.
    pub fn neumann_cells(g: &GridSpec) -> Self {
        Self::new(Basis1D::neumann_cells(g.nx, g.hx), Basis1D::neumann_cells(g.ny, g.hy))
    }

    /// Interior x-face unknowns of a no-slip velocity component.
    pub fn xface_velocity(g: &GridSpec) -> Self {
        Self::new(Basis1D::dirichlet_nodes(g.nx, g.hx), Basis1D::dirichlet_cells(g.ny, g.hy))
    }

    /// Interior y-face unknowns of a no-slip velocity component.
    pub fn yface_velocity(g: &GridSpec) -> Self {
        Self::new(Basis1D::dirichlet_cells(g.nx, g.hx), Basis1D::dirichlet_nodes(g.ny, g.hy))
    }

    pub fn len(&self) -> usize {
        self.bx.n * self.by.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `out = V diag(mult(lx_k, ly_l)) V^T rhs`.
    pub fn apply(&self, rhs: &[f64], out: &mut [f64], mult: impl Fn(f64, f64) -> f64) {
        let (mx, my) = (self.bx.n, self.by.n);
        // column-major (mx, my) matrix: entry (i, j) is point i + mx j
        let x = DMatrixView::from_slice(rhs, mx, my);
        let mut c = self.qx.tr_mul(&x) * &self.qy;
        for l in 0..my {
            let ly = self.by.eig[l];
            for k in 0..mx {
                c[(k, l)] *= mult(self.bx.eig[k], ly);
            }
        }
        let y = &self.qx * c * self.qy.transpose();
        out.copy_from_slice(y.as_slice());
    }
}
