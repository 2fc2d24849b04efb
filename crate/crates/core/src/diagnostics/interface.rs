//! Sharp-interface checks measured on diffuse solutions.

use crate::diagnostics::contour::{Contour, Point};
use crate::diagnostics::geometry::{circle_fit, nearest_on_contour};
use crate::error::{Error, Result};
use crate::grid::{CellField, FaceField, GridSpec};
use crate::physics::PhysParams;
use crate::scheme::State;

/// Band `|phi| < 0.9` used for interfacial averages.
pub const BAND_LEVEL: f64 = 0.9;

/// Bilinear interpolation of a cell-centered field, clamped to the centers.
pub fn sample_cells(g: &GridSpec, f: &CellField, p: Point) -> f64 {
    let fx = (p.0 / g.hx - 0.5).clamp(0.0, (g.nx - 1) as f64);
    let fy = (p.1 / g.hy - 0.5).clamp(0.0, (g.ny - 1) as f64);
    let i = (fx.floor() as usize).min(g.nx - 2);
    let j = (fy.floor() as usize).min(g.ny - 2);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let v00 = f.at(i, j);
    let v10 = f.at(i + 1, j);
    let v01 = f.at(i, j + 1);
    let v11 = f.at(i + 1, j + 1);
    (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
}

/// Face velocity averaged to cell centers, one field per component.
pub fn cell_velocity(g: &GridSpec, u: &FaceField) -> (CellField, CellField) {
    let mut ux = CellField::zeros(g);
    let mut uy = CellField::zeros(g);
    for j in 0..g.ny {
        for i in 0..g.nx {
            ux.values[g.cell(i, j)] = 0.5 * (u.xs[g.xface(i, j)] + u.xs[g.xface(i + 1, j)]);
            uy.values[g.cell(i, j)] = 0.5 * (u.ys[g.yface(i, j)] + u.ys[g.yface(i, j + 1)]);
        }
    }
    (ux, uy)
}

/// Pressure of the `mu grad phi` form of the surface force, `p + phi mu`.
///
/// The stepper carries the surface force as `phi grad mu`, whose pressure is
/// constant across a resting interface; the capillary jump lives in
/// `p + phi mu`.
pub fn capillary_pressure(st: &State) -> CellField {
    let mut out = st.pressure.clone();
    for k in 0..out.values.len() {
        out.values[k] += st.phase.values[k] * st.chem.values[k];
    }
    out
}

/// Mean capillary pressure in cells deeper than `band` inside the fitted
/// circle minus the mean in cells farther than `band` outside it.
pub fn pressure_jump(g: &GridSpec, st: &State, c: &Contour, band: f64) -> Result<f64> {
    let fit = circle_fit(c)?;
    let p = capillary_pressure(st);
    let (mut si, mut ni, mut so, mut no) = (0.0, 0usize, 0.0, 0usize);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.cell_center(i, j);
            let d = (x - fit.center.0).hypot(y - fit.center.1);
            let v = p.at(i, j);
            if d < fit.radius - band {
                si += v;
                ni += 1;
            } else if d > fit.radius + band {
                so += v;
                no += 1;
            }
        }
    }
    if ni == 0 || no == 0 {
        return Err(Error::Empty("no cells beyond the pressure band".into()));
    }
    Ok(si / ni as f64 - so / no as f64)
}

/// Mean of `mu` over the interfacial band `|phi| < 0.9`.
pub fn interfacial_mean_chem(st: &State) -> Result<f64> {
    let (mut s, mut n) = (0.0, 0usize);
    for (p, m) in st.phase.values.iter().zip(&st.chem.values) {
        if p.abs() < BAND_LEVEL {
            s += m;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Empty("interfacial band".into()));
    }
    Ok(s / n as f64)
}

/// Signed curvature of the fitted circle: positive when the droplet
/// interior is the `+1` phase.
pub fn droplet_curvature(g: &GridSpec, phase: &CellField, c: &Contour) -> Result<f64> {
    let fit = circle_fit(c)?;
    let inside = sample_cells(g, phase, fit.center);
    Ok(if inside >= 0.0 { 1.0 } else { -1.0 } / fit.radius)
}

/// `|mean_band(mu) - lambda_hat kappa / 2| / |lambda_hat kappa / 2|`.
pub fn gibbs_thomson_residual(g: &GridSpec, st: &State, c: &Contour, params: &PhysParams) -> Result<f64> {
    let kappa = droplet_curvature(g, &st.phase, c)?;
    let target = 0.5 * params.lambda_hat()? * kappa;
    let mean = interfacial_mean_chem(st)?;
    Ok((mean - target).abs() / target.abs())
}

/// `max |(eps^2/2)|grad phi|^2 - F(phi)| / max F` over band cells, with the
/// cell gradient averaged from the two adjacent faces per direction.
pub fn equipartition_residual(g: &GridSpec, phi: &CellField, params: &PhysParams) -> Result<f64> {
    let gp = crate::grid::grad_cell_to_face(g, phi)?;
    let (mut worst, mut fmax) = (0.0f64, 0.0f64);
    let mut any = false;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let p = phi.at(i, j);
            if p.abs() >= BAND_LEVEL {
                continue;
            }
            any = true;
            let gx = 0.5 * (gp.xs[g.xface(i, j)] + gp.xs[g.xface(i + 1, j)]);
            let gy = 0.5 * (gp.ys[g.yface(i, j)] + gp.ys[g.yface(i, j + 1)]);
            let f = params.F(p)?;
            let grad = 0.5 * params.eps * params.eps * (gx * gx + gy * gy);
            worst = worst.max((grad - f).abs());
            fmax = fmax.max(f.abs());
        }
    }
    if !any || fmax == 0.0 {
        return Err(Error::Empty("interfacial band".into()));
    }
    Ok(worst / fmax)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StefanResidual {
    /// Mean of `|2 (-V + u . nu)|` over contour vertices.
    pub lhs_mean_abs: f64,
    /// Mean of `|m0 [grad mu . nu]|`.
    pub rhs_mean_abs: f64,
    /// `mean |lhs - rhs| / max(mean |lhs|, mean |rhs|)`.
    pub relative: f64,
    pub samples: usize,
}

/// Normals of every vertex, pointing toward the `+1` phase.
fn vertex_normals(g: &GridSpec, phase: &CellField, c: &Contour) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for pl in &c.polylines {
        let n = pl.points.len();
        if n < 2 {
            continue;
        }
        for k in 0..n {
            let (prev, next) = if pl.closed {
                (pl.points[(k + n - 1) % n], pl.points[(k + 1) % n])
            } else {
                (pl.points[k.saturating_sub(1)], pl.points[(k + 1).min(n - 1)])
            };
            let (tx, ty) = (next.0 - prev.0, next.1 - prev.1);
            let len = tx.hypot(ty);
            if len == 0.0 {
                continue;
            }
            let mut nu = (ty / len, -tx / len);
            let p = pl.points[k];
            let d = g.hx.min(g.hy);
            let ahead = sample_cells(g, phase, (p.0 + d * nu.0, p.1 + d * nu.1));
            let behind = sample_cells(g, phase, (p.0 - d * nu.0, p.1 - d * nu.1));
            if ahead < behind {
                nu = (-nu.0, -nu.1);
            }
            out.push((p, nu));
        }
    }
    out
}

/// Residual of `2 (-V + u . nu) = m0 [grad mu . nu]` along the contour.
///
/// `nu` points into the `+1` phase, `V` is the normal speed along `nu` from
/// nearest-point correspondence with the previous contour. The one-sided
/// normal derivatives of `mu` are extrapolated to the interface from a
/// parabola through samples at `2.5, 3.5, 4.5 eps` on each side: the outer
/// `mu` is harmonic, so its normal derivative drifts with distance wherever
/// `mu` varies along the interface.
pub fn stefan_flux_residual(
    g: &GridSpec,
    st: &State,
    c: &Contour,
    c_prev: &Contour,
    dt: f64,
    params: &PhysParams,
) -> Result<StefanResidual> {
    if c.is_empty() || c_prev.is_empty() {
        return Err(Error::Empty("stefan residual needs two contours".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain {
            what: "time step",
            value: dt,
        });
    }
    let (ux, uy) = cell_velocity(g, &st.vel);
    let (d1, d2, d3) = (2.5 * params.eps, 3.5 * params.eps, 4.5 * params.eps);
    // slope at 0 of the parabola through the three outer samples
    let slope = |f1: f64, f2: f64, f3: f64| {
        -f1 * (d2 + d3) / ((d1 - d2) * (d1 - d3))
            - f2 * (d1 + d3) / ((d2 - d1) * (d2 - d3))
            - f3 * (d1 + d2) / ((d3 - d1) * (d3 - d2))
    };
    let hmax = g.hx.max(g.hy);
    let (mut sl, mut sr, mut sd, mut n) = (0.0, 0.0, 0.0, 0usize);
    for (p, nu) in vertex_normals(g, &st.phase, c) {
        let (dist, q) = nearest_on_contour(p, c_prev).expect("nonempty contour");
        if dist > 0.25 * (g.lx.min(g.ly)) || dist > 100.0 * hmax {
            return Err(Error::Degenerate(format!(
                "no matching point on the previous contour within {dist}"
            )));
        }
        let v = ((p.0 - q.0) * nu.0 + (p.1 - q.1) * nu.1) / dt;
        let un = sample_cells(g, &ux, p) * nu.0 + sample_cells(g, &uy, p) * nu.1;
        let at = |s: f64| sample_cells(g, &st.chem, (p.0 + s * nu.0, p.1 + s * nu.1));
        let plus = slope(at(d1), at(d2), at(d3));
        let minus = -slope(at(-d1), at(-d2), at(-d3));
        let lhs = 2.0 * (-v + un);
        let rhs = params.m0 * (plus - minus);
        sl += lhs.abs();
        sr += rhs.abs();
        sd += (lhs - rhs).abs();
        n += 1;
    }
    if n == 0 {
        return Err(Error::Degenerate("no usable contour vertices".into()));
    }
    let (ml, mr, md) = (sl / n as f64, sr / n as f64, sd / n as f64);
    let scale = ml.max(mr);
    Ok(StefanResidual {
        lhs_mean_abs: ml,
        rhs_mean_abs: mr,
        relative: if scale > 0.0 { md / scale } else { 0.0 },
        samples: n,
    })
}
