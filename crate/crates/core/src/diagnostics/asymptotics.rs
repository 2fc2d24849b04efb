//! One-dimensional equilibrium profile and the surface-tension constant.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linsolve::SolveReport;
use crate::physics::{potential_F, potential_f, PotentialKind};

/// Equilibrium layer profile `tanh(xi / sqrt 2)`.
pub fn profile_tanh(xi: f64) -> f64 {
    (xi / SQRT_2).tanh()
}

/// `d/dxi profile_tanh`.
pub fn profile_tanh_derivative(xi: f64) -> f64 {
    let s = 1.0 / (xi / SQRT_2).cosh();
    s * s / SQRT_2
}

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        worst: &mut f64,
    ) -> std::result::Result<f64, ()> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let err = left + right - whole;
        if err.abs() <= 15.0 * tol || depth == 0 {
            if depth == 0 {
                *worst = worst.max(err.abs());
                if err.abs() > 15.0 * tol {
                    return Err(());
                }
            }
            return Ok(left + right + err / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)?
            + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)?)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    let mut worst = 0.0;
    rec(f, a, b, fa, fm, fb, whole, tol, 50, &mut worst).map_err(|_| Error::NotConverged {
        solver: "adaptive simpson",
        report: SolveReport {
            iterations: 50,
            final_residual: worst,
            converged: false,
        },
    })
}

/// Positive minimiser `beta` of the potential (1 for Ginzburg-Landau).
pub fn well_position(kind: PotentialKind) -> Result<f64> {
    kind.validate()?;
    match kind {
        PotentialKind::GinzburgLandau => Ok(1.0),
        PotentialKind::FloryHuggins { .. } => {
            // f < 0 just right of the origin and f -> +inf at 1
            let (mut lo, mut hi) = (1e-6, 1.0 - 1e-15);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if potential_f(kind, mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// `iota = integral |phi_0'(xi)|^2 dxi` of the equilibrium layer.
///
/// Ginzburg-Landau: the closed-form profile is integrated over
/// `[-20, 20]` (tail below 1e-16). Other potentials go through the
/// equipartition form `integral sqrt(2 (F - F(beta))) dphi` between the wells.
pub fn iota_quadrature(kind: PotentialKind) -> Result<f64> {
    match kind {
        PotentialKind::GinzburgLandau => iota_profile_integral(20.0),
        _ => iota_phase_integral(kind),
    }
}

/// `integral_{-L}^{L} (phi_0')^2 dxi` for the tanh profile.
pub fn iota_profile_integral(half_width: f64) -> Result<f64> {
    let f = |xi: f64| {
        let d = profile_tanh_derivative(xi);
        d * d
    };
    adaptive_simpson(&f, -half_width, half_width, 1e-14)
}

/// `integral sqrt(2 (F(phi) - F(beta))) dphi` over `(-beta, beta)`.
pub fn iota_phase_integral(kind: PotentialKind) -> Result<f64> {
    let beta = well_position(kind)?;
    let fb = potential_F(kind, beta)?;
    let f = |p: f64| (2.0 * (potential_F(kind, p).unwrap_or(fb) - fb)).max(0.0).sqrt();
    adaptive_simpson(&f, -beta, beta, 1e-14)
}
