//! Invariant self-test battery behind `chimhd check`.

use chimhd_core::grid::{
    cell_inner, convect, cross_b, div_face_to_cell, face_inner, grad_cell_to_face, viscous_apply, CellField,
    FaceField, GridSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;
use crate::run::run;

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Worst relative defect of one discrete identity over all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub trials: usize,
    pub worst: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.worst <= IDENTITY_TOLERANCE
    }
}

/// `|a + b|` relative to `scale`, the Cauchy-Schwarz bound of `|a| + |b|`.
/// Dividing by `|a| + |b|` instead would amplify rounding whenever the
/// inner products themselves nearly cancel.
fn cancel(a: f64, b: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        (a + b).abs() / scale
    }
}

fn fnorm(g: &GridSpec, v: &FaceField) -> f64 {
    face_inner(g, v, v).sqrt()
}

fn cnorm(g: &GridSpec, f: &CellField) -> f64 {
    cell_inner(g, f, f).sqrt()
}

fn random_grid(rng: &mut ChaCha8Rng) -> GridSpec {
    let nx = rng.gen_range(4..=16);
    let ny = rng.gen_range(4..=16);
    GridSpec::new(nx, ny, rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).expect("valid random grid")
}

fn cell(g: &GridSpec, rng: &mut ChaCha8Rng) -> CellField {
    CellField::from_fn(g, |_, _| rng.gen_range(-1.0..1.0))
}

// no-flux face field
fn face(g: &GridSpec, rng: &mut ChaCha8Rng) -> FaceField {
    let mut v = FaceField::from_fn(g, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    v.zero_boundary();
    v
}

/// Summation by parts, viscous symmetry and sign, convective skew symmetry
/// and the Lorentz/Ohm cancellation on `trials` random grids and fields.
pub fn operator_battery(trials: usize, seed: u64) -> Result<Vec<IdentityCheck>, chimhd_core::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 5];
    for _ in 0..trials {
        let g = random_grid(&mut rng);
        let f = cell(&g, &mut rng);
        let u = face(&g, &mut rng);
        let v = face(&g, &mut rng);
        let w = face(&g, &mut rng);

        let gf = grad_cell_to_face(&g, &f)?;
        let dv = div_face_to_cell(&g, &v)?;
        let sbp = cancel(
            face_inner(&g, &gf, &v),
            cell_inner(&g, &f, &dv),
            fnorm(&g, &gf) * fnorm(&g, &v) + cnorm(&g, &f) * cnorm(&g, &dv),
        );

        let eta = CellField::from_fn(&g, |_, _| rng.gen_range(0.1..10.0));
        let au = viscous_apply(&g, &eta, &u)?;
        let av = viscous_apply(&g, &eta, &v)?;
        let sym = cancel(
            face_inner(&g, &au, &v),
            -face_inner(&g, &u, &av),
            fnorm(&g, &au) * fnorm(&g, &v) + fnorm(&g, &u) * fnorm(&g, &av),
        );
        // <A u, u> must be nonpositive; record any positive part
        let nsd = face_inner(&g, &au, &u).max(0.0) / (fnorm(&g, &au) * fnorm(&g, &u)).max(1e-300);

        let cu = convect(&g, &w, &u)?;
        let cv = convect(&g, &w, &v)?;
        let skew = cancel(
            face_inner(&g, &cu, &v),
            face_inner(&g, &u, &cv),
            fnorm(&g, &cu) * fnorm(&g, &v) + fnorm(&g, &u) * fnorm(&g, &cv),
        );

        let b = rng.gen_range(-2.0..2.0);
        let vb = cross_b(&g, &v, b)?;
        let ub = cross_b(&g, &u, b)?;
        let lorentz = cancel(
            face_inner(&g, &vb, &u),
            face_inner(&g, &ub, &v),
            fnorm(&g, &vb) * fnorm(&g, &u) + fnorm(&g, &ub) * fnorm(&g, &v),
        );

        for (m, x) in worst.iter_mut().zip([sbp, sym, nsd, skew, lorentz]) {
            *m = m.max(x);
        }
    }
    let names = [
        "summation by parts <grad f, v> = -<f, div v>",
        "viscous operator symmetric",
        "viscous operator negative semidefinite",
        "convection skew-symmetric",
        "(J x B, u) + (u x B, J) = 0",
    ];
    Ok(names
        .into_iter()
        .zip(worst)
        .map(|(name, worst)| IdentityCheck { name, trials, worst })
        .collect())
}

/// Runs the battery plus a short rounded-square run whose invariants are
/// enforced by the time loop. Returns a printable report.
pub fn run_check() -> Result<String, CliError> {
    let mut report = String::new();
    let checks = operator_battery(200, 0x5eed).map_err(|source| CliError::Solver { step: 0, source })?;
    let mut failed = Vec::new();
    for c in &checks {
        let tag = if c.passed() { "ok  " } else { "FAIL" };
        report.push_str(&format!("{tag} {} (worst {:e} over {} trials)\n", c.name, c.worst, c.trials));
        if !c.passed() {
            failed.push(c.name);
        }
    }

    let dir = std::env::temp_dir().join(format!("chimhd-check-{}", std::process::id()));
    let mut cfg = RunConfig::for_scenario(Scenario::RoundedSquare);
    cfg.nx = 32;
    cfg.ny = 32;
    cfg.params.eps = 0.05;
    cfg.t_end = 0.2;
    cfg.snapshot_every = usize::MAX;
    cfg.output_dir = dir.clone();
    let r = run(&cfg);
    let _ = std::fs::remove_dir_all(&dir);
    let s = r?;
    report.push_str(&format!(
        "ok   short run: {} steps, worst energy increase {:e}, max |div J| {:e}, max |div u| {:e}, mass drift {:e}\n",
        s.steps, s.worst_increase, s.max_charge_residual, s.max_div_residual, s.mass_drift
    ));
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Invariant {
            step: 0,
            msg: format!("{report}identities violated: {}", failed.join(", ")),
        })
    }
}
