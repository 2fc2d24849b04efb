//! Discrete operators on the staggered grid.
//!
//! Every linear operator is written once as a stencil that emits
//! `(row, col, coefficient)` triplets. Applying an operator and assembling
//! its sparse matrix both go through the same emitter, so the matrix used
//! by the solvers and the matrix-free operator can never drift apart.
//!
//! Index conventions: cell unknowns use `GridSpec::cell`, face unknowns use
//! the flat `[xs, ys]` layout (`GridSpec::flat_xface` / `flat_yface`).
//! Boundary-normal face unknowns are never coupled by the velocity-type
//! operators (viscous, convective, Lorentz); they carry the no-slip /
//! no-flux value zero.

use crate::error::{Error, Result};
use crate::grid::field::{CellField, FaceField, GridSpec};
use crate::linsolve::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpMode {
    Arithmetic,
    Harmonic,
}

fn apply_emitter(
    n_rows: usize,
    x: &[f64],
    stencil: impl FnOnce(&mut dyn FnMut(usize, usize, f64)),
) -> Vec<f64> {
    let mut y = vec![0.0; n_rows];
    stencil(&mut |r, c, v| y[r] += v * x[c]);
    y
}

fn assemble_emitter(
    n_rows: usize,
    n_cols: usize,
    stencil: impl FnOnce(&mut dyn FnMut(usize, usize, f64)),
) -> SparseMatrix {
    let mut trip = Vec::new();
    stencil(&mut |r, c, v| trip.push((r, c, v)));
    SparseMatrix::from_triplets(n_rows, n_cols, &trip)
        .expect("stencil indices are in range by construction")
}

/// Two-point gradient from cells to interior faces; boundary rows are empty.
pub fn grad_stencil(g: &GridSpec, emit: &mut dyn FnMut(usize, usize, f64)) {
    let (ihx, ihy) = (1.0 / g.hx, 1.0 / g.hy);
    for j in 0..g.ny {
        for i in 1..g.nx {
            let r = g.flat_xface(i, j);
            emit(r, g.cell(i, j), ihx);
            emit(r, g.cell(i - 1, j), -ihx);
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let r = g.flat_yface(i, j);
            emit(r, g.cell(i, j), ihy);
            emit(r, g.cell(i, j - 1), -ihy);
        }
    }
}

/// Cell flux balance of a face field, boundary faces included.
pub fn div_stencil(g: &GridSpec, emit: &mut dyn FnMut(usize, usize, f64)) {
    let (ihx, ihy) = (1.0 / g.hx, 1.0 / g.hy);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let r = g.cell(i, j);
            emit(r, g.flat_xface(i + 1, j), ihx);
            emit(r, g.flat_xface(i, j), -ihx);
            emit(r, g.flat_yface(i, j + 1), ihy);
            emit(r, g.flat_yface(i, j), -ihy);
        }
    }
}

/// Five-point Neumann Laplacian, identical to `div ∘ grad`.
pub fn laplacian_stencil(g: &GridSpec, emit: &mut dyn FnMut(usize, usize, f64)) {
    variable_laplacian_stencil(g, None, emit)
}

/// `div(k grad ·)` with a face coefficient `k` (unit coefficient if `None`).
pub fn variable_laplacian_stencil(
    g: &GridSpec,
    coeff: Option<&FaceField>,
    emit: &mut dyn FnMut(usize, usize, f64),
) {
    let (ihx2, ihy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    let kx = |i: usize, j: usize| coeff.map_or(1.0, |k| k.xs[g.xface(i, j)]);
    let ky = |i: usize, j: usize| coeff.map_or(1.0, |k| k.ys[g.yface(i, j)]);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let r = g.cell(i, j);
            let mut diag = 0.0;
            let mut nb = |c: usize, w: f64| {
                emit(r, c, w);
                diag -= w;
            };
            if i > 0 {
                nb(g.cell(i - 1, j), kx(i, j) * ihx2);
            }
            if i + 1 < g.nx {
                nb(g.cell(i + 1, j), kx(i + 1, j) * ihx2);
            }
            if j > 0 {
                nb(g.cell(i, j - 1), ky(i, j) * ihy2);
            }
            if j + 1 < g.ny {
                nb(g.cell(i, j + 1), ky(i, j + 1) * ihy2);
            }
            emit(r, r, diag);
        }
    }
}

/// Node viscosity: mean of the (up to four) cells sharing the node.
fn node_eta(g: &GridSpec, eta: &CellField, i: usize, j: usize) -> f64 {
    let mut s = 0.0;
    let mut n = 0usize;
    for (ci, cj) in [(i.wrapping_sub(1), j.wrapping_sub(1)), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j)] {
        if ci < g.nx && cj < g.ny {
            s += eta.at(ci, cj);
            n += 1;
        }
    }
    s / n as f64
}

/// Variable-viscosity operator `2 div(eta D(u))` with no-slip walls.
///
/// Built from the discrete dissipation `B(u,u) = sum 2 eta |D(u)|^2`, with
/// normal strains at cell centers and shear strain at grid nodes. Wall nodes
/// use the reflected ghost value (`du/dn = 2 u / h`) and half weight. The
/// operator is `-Hessian(B)/2 / (hx hy)`, symmetric and negative semidefinite
/// by construction.
pub fn viscous_stencil(g: &GridSpec, eta: &CellField, emit: &mut dyn FnMut(usize, usize, f64)) {
    let vol = g.cell_volume();
    let mut emit_form = |terms: &[(usize, f64)], weight: f64| {
        for &(a, ca) in terms {
            if g.is_boundary_flat(a) {
                continue;
            }
            for &(b, cb) in terms {
                if g.is_boundary_flat(b) {
                    continue;
                }
                emit(a, b, -weight * ca * cb / vol);
            }
        }
    };
    let (ihx, ihy) = (1.0 / g.hx, 1.0 / g.hy);

    for j in 0..g.ny {
        for i in 0..g.nx {
            let w = 2.0 * eta.at(i, j) * vol;
            emit_form(&[(g.flat_xface(i + 1, j), ihx), (g.flat_xface(i, j), -ihx)], w);
            emit_form(&[(g.flat_yface(i, j + 1), ihy), (g.flat_yface(i, j), -ihy)], w);
        }
    }

    for j in 0..=g.ny {
        for i in 0..=g.nx {
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(4);
            // d(u_x)/dy, halved for D_xy
            if i > 0 && i < g.nx {
                if j == 0 {
                    terms.push((g.flat_xface(i, 0), ihy));
                } else if j == g.ny {
                    terms.push((g.flat_xface(i, g.ny - 1), -ihy));
                } else {
                    terms.push((g.flat_xface(i, j), 0.5 * ihy));
                    terms.push((g.flat_xface(i, j - 1), -0.5 * ihy));
                }
            }
            // d(u_y)/dx, halved for D_xy
            if j > 0 && j < g.ny {
                if i == 0 {
                    terms.push((g.flat_yface(0, j), ihx));
                } else if i == g.nx {
                    terms.push((g.flat_yface(g.nx - 1, j), -ihx));
                } else {
                    terms.push((g.flat_yface(i, j), 0.5 * ihx));
                    terms.push((g.flat_yface(i - 1, j), -0.5 * ihx));
                }
            }
            if terms.is_empty() {
                continue;
            }
            let mut w = vol;
            if i == 0 || i == g.nx {
                w *= 0.5;
            }
            if j == 0 || j == g.ny {
                w *= 0.5;
            }
            // 2 eta |D|^2 counts D_xy twice
            emit_form(&terms, 4.0 * node_eta(g, eta, i, j) * w);
        }
    }
}

/// Skew-symmetric convection `C(u_adv) w`.
///
/// Each momentum control volume exchanges `F (w_a + w_b) / 2` through its
/// faces, with `F` the advecting flux. Dropping the diagonal part
/// (`div F / 2`) leaves an exactly skew matrix: the coefficient from `a` to
/// `b` is `F_ab / (2 V)` and `F_ba = -F_ab`.
pub fn convect_stencil(g: &GridSpec, u_adv: &FaceField, emit: &mut dyn FnMut(usize, usize, f64)) {
    let c = 0.5 / g.cell_volume();
    let ux = |i: usize, j: usize| u_adv.xs[g.xface(i, j)];
    let uy = |i: usize, j: usize| u_adv.ys[g.yface(i, j)];

    for j in 0..g.ny {
        for i in 1..g.nx {
            let r = g.flat_xface(i, j);
            if i + 1 < g.nx {
                let f = g.hy * 0.5 * (ux(i, j) + ux(i + 1, j));
                emit(r, g.flat_xface(i + 1, j), c * f);
            }
            if i > 1 {
                let f = -g.hy * 0.5 * (ux(i - 1, j) + ux(i, j));
                emit(r, g.flat_xface(i - 1, j), c * f);
            }
            if j + 1 < g.ny {
                let f = g.hx * 0.5 * (uy(i - 1, j + 1) + uy(i, j + 1));
                emit(r, g.flat_xface(i, j + 1), c * f);
            }
            if j > 0 {
                let f = -g.hx * 0.5 * (uy(i - 1, j) + uy(i, j));
                emit(r, g.flat_xface(i, j - 1), c * f);
            }
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let r = g.flat_yface(i, j);
            if j + 1 < g.ny {
                let f = g.hx * 0.5 * (uy(i, j) + uy(i, j + 1));
                emit(r, g.flat_yface(i, j + 1), c * f);
            }
            if j > 1 {
                let f = -g.hx * 0.5 * (uy(i, j - 1) + uy(i, j));
                emit(r, g.flat_yface(i, j - 1), c * f);
            }
            if i + 1 < g.nx {
                let f = g.hy * 0.5 * (ux(i + 1, j - 1) + ux(i + 1, j));
                emit(r, g.flat_yface(i + 1, j), c * f);
            }
            if i > 0 {
                let f = -g.hy * 0.5 * (ux(i, j - 1) + ux(i, j));
                emit(r, g.flat_yface(i - 1, j), c * f);
            }
        }
    }
}

/// Planar `v x (0, 0, b)` on faces: `(b v_y, -b v_x)`, with the transverse
/// component averaged from the four surrounding interior faces. The two
/// averaging maps are transposes of each other, so `<X J, u> = -<X u, J>`.
pub fn cross_stencil(g: &GridSpec, b: f64, emit: &mut dyn FnMut(usize, usize, f64)) {
    if b == 0.0 {
        return;
    }
    let w = 0.25 * b;
    for j in 0..g.ny {
        for i in 1..g.nx {
            let r = g.flat_xface(i, j);
            for (si, sj) in [(i - 1, j), (i, j), (i - 1, j + 1), (i, j + 1)] {
                if !g.is_boundary_yface(sj) {
                    emit(r, g.flat_yface(si, sj), w);
                }
            }
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let r = g.flat_yface(i, j);
            for (si, sj) in [(i, j - 1), (i + 1, j - 1), (i, j), (i + 1, j)] {
                if !g.is_boundary_xface(si) {
                    emit(r, g.flat_xface(si, sj), -w);
                }
            }
        }
    }
}

fn check_cell(g: &GridSpec, f: &CellField) -> Result<()> {
    f.check(g)?;
    if !f.is_finite() {
        return Err(Error::InvalidParameter("non-finite cell field".into()));
    }
    Ok(())
}

fn check_face(g: &GridSpec, v: &FaceField) -> Result<()> {
    v.check(g)?;
    if !v.is_finite() {
        return Err(Error::InvalidParameter("non-finite face field".into()));
    }
    Ok(())
}

pub fn grad_cell_to_face(g: &GridSpec, f: &CellField) -> Result<FaceField> {
    check_cell(g, f)?;
    let y = apply_emitter(g.n_faces(), &f.values, |e| grad_stencil(g, e));
    FaceField::from_flat(g, &y)
}

pub fn div_face_to_cell(g: &GridSpec, v: &FaceField) -> Result<CellField> {
    check_face(g, v)?;
    let y = apply_emitter(g.n_cells(), &v.to_flat(), |e| div_stencil(g, e));
    CellField::from_vec(g, y)
}

pub fn laplacian_neumann(g: &GridSpec, f: &CellField) -> Result<CellField> {
    check_cell(g, f)?;
    let y = apply_emitter(g.n_cells(), &f.values, |e| laplacian_stencil(g, e));
    CellField::from_vec(g, y)
}

/// Two-point face average; boundary faces copy the adjacent cell value.
pub fn interp_cell_to_face(g: &GridSpec, f: &CellField, mode: InterpMode) -> Result<FaceField> {
    check_cell(g, f)?;
    if mode == InterpMode::Harmonic {
        if let Some(&bad) = f.values.iter().find(|&&v| v <= 0.0) {
            return Err(Error::Domain {
                what: "harmonic interpolation input",
                value: bad,
            });
        }
    }
    let avg = |a: f64, b: f64| match mode {
        InterpMode::Arithmetic => 0.5 * (a + b),
        InterpMode::Harmonic => 2.0 * a * b / (a + b),
    };
    let mut out = FaceField::zeros(g);
    for j in 0..g.ny {
        for i in 0..=g.nx {
            out.xs[g.xface(i, j)] = if i == 0 {
                f.at(0, j)
            } else if i == g.nx {
                f.at(g.nx - 1, j)
            } else {
                avg(f.at(i - 1, j), f.at(i, j))
            };
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            out.ys[g.yface(i, j)] = if j == 0 {
                f.at(i, 0)
            } else if j == g.ny {
                f.at(i, g.ny - 1)
            } else {
                avg(f.at(i, j - 1), f.at(i, j))
            };
        }
    }
    Ok(out)
}

fn check_viscosity(g: &GridSpec, eta: &CellField) -> Result<()> {
    check_cell(g, eta)?;
    if let Some(&bad) = eta.values.iter().find(|&&v| v <= 0.0) {
        return Err(Error::Domain {
            what: "viscosity",
            value: bad,
        });
    }
    Ok(())
}

pub fn viscous_apply(g: &GridSpec, eta: &CellField, u: &FaceField) -> Result<FaceField> {
    check_viscosity(g, eta)?;
    check_face(g, u)?;
    let y = apply_emitter(g.n_faces(), &u.to_flat(), |e| viscous_stencil(g, eta, e));
    FaceField::from_flat(g, &y)
}

pub fn convect(g: &GridSpec, u_adv: &FaceField, w: &FaceField) -> Result<FaceField> {
    check_face(g, u_adv)?;
    check_face(g, w)?;
    let y = apply_emitter(g.n_faces(), &w.to_flat(), |e| convect_stencil(g, u_adv, e));
    FaceField::from_flat(g, &y)
}

pub fn cross_b(g: &GridSpec, v: &FaceField, b: f64) -> Result<FaceField> {
    check_face(g, v)?;
    let y = apply_emitter(g.n_faces(), &v.to_flat(), |e| cross_stencil(g, b, e));
    FaceField::from_flat(g, &y)
}

/// Discrete dissipation `sum 2 eta |D(u)|^2` (cell and node quadrature).
pub fn viscous_dissipation(g: &GridSpec, eta: &CellField, u: &FaceField) -> Result<f64> {
    let lu = viscous_apply(g, eta, u)?;
    Ok(-crate::grid::face_inner(g, &lu, u))
}

pub fn assemble_grad(g: &GridSpec) -> SparseMatrix {
    assemble_emitter(g.n_faces(), g.n_cells(), |e| grad_stencil(g, e))
}

pub fn assemble_div(g: &GridSpec) -> SparseMatrix {
    assemble_emitter(g.n_cells(), g.n_faces(), |e| div_stencil(g, e))
}

pub fn assemble_laplacian(g: &GridSpec) -> SparseMatrix {
    assemble_emitter(g.n_cells(), g.n_cells(), |e| laplacian_stencil(g, e))
}

pub fn assemble_variable_laplacian(g: &GridSpec, coeff: &FaceField) -> SparseMatrix {
    assemble_emitter(g.n_cells(), g.n_cells(), |e| {
        variable_laplacian_stencil(g, Some(coeff), e)
    })
}

pub fn assemble_viscous(g: &GridSpec, eta: &CellField) -> SparseMatrix {
    assemble_emitter(g.n_faces(), g.n_faces(), |e| viscous_stencil(g, eta, e))
}

pub fn assemble_convect(g: &GridSpec, u_adv: &FaceField) -> SparseMatrix {
    assemble_emitter(g.n_faces(), g.n_faces(), |e| convect_stencil(g, u_adv, e))
}

pub fn assemble_cross(g: &GridSpec, b: f64) -> SparseMatrix {
    assemble_emitter(g.n_faces(), g.n_faces(), |e| cross_stencil(g, b, e))
}
