//! Initial conditions for the shipped scenarios.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::grid::{CellField, FaceField, GridSpec};
use crate::linsolve::FastDiag;
use crate::scheme::stepper::project_divergence_free;

/// Large single vortex on the unit square, stream-function form.
pub fn vortex_velocity(x: f64, y: f64) -> (f64, f64) {
    let ux = x * x * (1.0 - x) * (1.0 - x) * y * (1.0 - y) * (1.0 - 2.0 * y);
    let uy = -x * (1.0 - x) * (1.0 - 2.0 * x) * y * y * (1.0 - y) * (1.0 - y);
    (ux, uy)
}

/// Face-sampled vortex, projected to be discretely divergence free.
pub fn init_vortex(g: &GridSpec) -> Result<FaceField> {
    if !g.is_unit_square() {
        return Err(Error::InvalidGrid(format!(
            "the vortex needs the unit square, got {} x {}",
            g.lx, g.ly
        )));
    }
    let u = FaceField::from_fn(g, vortex_velocity);
    project_divergence_free(g, &FastDiag::neumann_cells(g), &u)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "interface width",
            value: eps,
        })
    }
}

/// Rounded square: negative inside the l4-circle of radius 0.3 about (0.5, 0.5).
pub fn init_rounded_square(g: &GridSpec, eps: f64) -> Result<CellField> {
    check_eps(eps)?;
    Ok(CellField::from_fn(g, |x, y| {
        let d = ((x - 0.5).powi(4) + (y - 0.5).powi(4)).powf(0.25);
        ((d - 0.3) / (SQRT_2 * eps)).tanh()
    }))
}

/// Two bubbles of radii 0.1 and 0.2 centred at (0.3, 0.5) and (0.7, 0.5):
/// positive inside, negative outside.
pub fn init_two_bubbles(g: &GridSpec, eps: f64) -> Result<CellField> {
    check_eps(eps)?;
    Ok(CellField::from_fn(g, |x, y| {
        let d1 = (x - 0.3).hypot(y - 0.5);
        let d2 = (x - 0.7).hypot(y - 0.5);
        1.0 - ((d1 - 0.1) / (SQRT_2 * eps)).tanh() - ((d2 - 0.2) / (SQRT_2 * eps)).tanh()
    }))
}

/// Circular droplet with equilibrium profile; `inside` is the interior phase (+1 or -1).
pub fn init_circle(g: &GridSpec, eps: f64, center: (f64, f64), radius: f64, inside: f64) -> Result<CellField> {
    check_eps(eps)?;
    if !(radius > 0.0) {
        return Err(Error::Domain {
            what: "droplet radius",
            value: radius,
        });
    }
    let s = inside.signum();
    Ok(CellField::from_fn(g, |x, y| {
        let d = (x - center.0).hypot(y - center.1);
        -s * ((d - radius) / (SQRT_2 * eps)).tanh()
    }))
}

/// Stripe `x0 < x < x1` of phase +1 with profiles of width `profile_eps`.
pub fn init_stripe(g: &GridSpec, profile_eps: f64, x0: f64, x1: f64) -> Result<CellField> {
    check_eps(profile_eps)?;
    Ok(CellField::from_fn(g, |x, _| {
        let d = (x - x0).min(x1 - x);
        (d / (SQRT_2 * profile_eps)).tanh()
    }))
}
