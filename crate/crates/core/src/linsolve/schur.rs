//! Current / electric-potential saddle system with a face-diagonal J block.
//!
//! Solves `a J + grad e = r`, `div J = 0` (with `J . n = 0`) by eliminating
//! `J = (r - grad e) / a`, which leaves the SPD potential problem
//! `-div(c grad e) = -div(c r)` with `c = 1/a`.

use crate::error::{Error, Result};
use crate::grid::{
    assemble_variable_laplacian, div_face_to_cell, grad_cell_to_face, CellField, FaceField, GridSpec,
};
use crate::linsolve::fastdiag::FastDiag;
use crate::linsolve::krylov::{pcg, Preconditioner, SolveReport};

/// Inverse of `-cbar L` on zero-mean cell fields.
pub struct NeumannPoissonPrecond {
    fd: FastDiag,
    scale: f64,
}

impl NeumannPoissonPrecond {
    pub fn new(g: &GridSpec, coeff: f64) -> Self {
        Self {
            fd: FastDiag::neumann_cells(g),
            scale: coeff,
        }
    }
}

impl Preconditioner for NeumannPoissonPrecond {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let s = self.scale;
        self.fd.apply(r, z, |a, b| {
            let l = a + b;
            if l == 0.0 {
                0.0
            } else {
                -1.0 / (s * l)
            }
        });
    }
}

/// Returns `(J, e, report)`; `e` has zero cell mean, `J` has zero boundary
/// entries and `max|div J| <= 10 tol max|r|`.
pub fn schur_current_solve(
    g: &GridSpec,
    face_coeff: &FaceField,
    rhs_face: &FaceField,
    tol: f64,
) -> Result<(FaceField, CellField, SolveReport)> {
    face_coeff.check(g)?;
    rhs_face.check(g)?;
    if let Some(&bad) = face_coeff.xs.iter().chain(&face_coeff.ys).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain {
            what: "current face coefficient",
            value: bad,
        });
    }
    let mut r = rhs_face.clone();
    r.zero_boundary();
    let rinf = r.max_abs();
    if rinf == 0.0 {
        return Ok((FaceField::zeros(g), CellField::zeros(g), SolveReport::trivial()));
    }

    let c = FaceField {
        nx: g.nx,
        ny: g.ny,
        xs: face_coeff.xs.iter().map(|a| 1.0 / a).collect(),
        ys: face_coeff.ys.iter().map(|a| 1.0 / a).collect(),
    };
    let cr = c.hadamard(&r);
    let mut rhs = div_face_to_cell(g, &cr)?;
    rhs.values.iter_mut().for_each(|v| *v = -*v);
    rhs.remove_mean();

    let mut a = assemble_variable_laplacian(g, &c);
    a.scale(-1.0);

    let interior: Vec<f64> = (0..g.n_faces())
        .filter(|&k| !g.is_boundary_flat(k))
        .map(|k| {
            if k < g.n_xfaces() {
                c.xs[k]
            } else {
                c.ys[k - g.n_xfaces()]
            }
        })
        .collect();
    let cbar = interior.iter().sum::<f64>() / interior.len() as f64;
    let pc = NeumannPoissonPrecond::new(g, cbar);

    let maxit = 10 * g.n_cells();
    let (e, mut rep) = pcg(&a, &pc, &rhs.values, None, tol, maxit)?;
    let mut e = CellField::from_vec(g, e)?;
    e.remove_mean();

    let mut j = r;
    j.axpy(-1.0, &grad_cell_to_face(g, &e)?);
    let mut j = j.hadamard(&c);
    j.zero_boundary();

    let div_max = div_face_to_cell(g, &j)?.max_abs();
    rep.converged = rep.converged || div_max <= 10.0 * tol * rinf;
    let rep = rep.require("current potential cg")?;
    Ok((j, e, rep))
}
