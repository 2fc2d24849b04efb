//! The time loop of a single simulation.

use std::path::{Path, PathBuf};

use chimhd_core::diagnostics::{dissipation_rate, extract_contour, total_energy, Contour};
use chimhd_core::grid::{CellField, GridSpec};
use chimhd_core::scheme::{
    init_circle, init_rounded_square, init_two_bubbles, init_vortex, State, Stepper, StepperSettings,
};

use crate::config::{RunConfig, Scenario};
use crate::error::CliError;
use crate::output::{contour_csv, vtk_string, write_file, CsvWriter, StepRow};

/// Relative output directories are placed under this directory when set.
pub const OUTPUT_ROOT_ENV: &str = "CHIMHD_OUTPUT_ROOT";

pub const CHARGE_TOLERANCE: f64 = 1e-10;
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;
/// Phase-mass drift per unit area.
pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub e0: f64,
    /// Largest single-step energy increase (negative if energy always fell).
    pub worst_increase: f64,
    pub max_charge_residual: f64,
    pub max_div_residual: f64,
    /// `max_n |sum phi(t_n) - sum phi(0)| / |Omega|`.
    pub mass_drift: f64,
    pub max_overshoot: f64,
    /// Total energy at every time level, starting at t = 0.
    pub energy: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub final_state: State,
    pub final_contour: Contour,
}

pub fn resolve_output_dir(dir: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}

fn setup(e: chimhd_core::Error) -> CliError {
    CliError::Invalid(e.to_string())
}

pub fn initial_state(cfg: &RunConfig, g: &GridSpec) -> Result<State, CliError> {
    let p = &cfg.params;
    let phase = match cfg.scenario {
        Scenario::RoundedSquare => init_rounded_square(g, p.eps),
        Scenario::TwoBubbles => init_two_bubbles(g, p.eps),
        Scenario::VortexOnly => Ok(CellField::constant(g, 1.0)),
        Scenario::Droplet => init_circle(g, p.eps, (0.5, 0.5), 0.25, 1.0),
    }
    .map_err(setup)?;
    let mut st = State::at_rest(g, p, phase).map_err(setup)?;
    if cfg.scenario != Scenario::Droplet {
        st.vel = init_vortex(g).map_err(setup)?;
    }
    Ok(st)
}

/// Runs `cfg` with the solver settings it implies.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    run_with_settings(cfg, cfg.settings())
}

/// Runs `cfg` with explicit solver settings, e.g. frozen velocity.
pub fn run_with_settings(cfg: &RunConfig, settings: StepperSettings) -> Result<RunSummary, CliError> {
    cfg.validate().map_err(CliError::Invalid)?;
    let g = GridSpec::new(cfg.nx, cfg.ny, 1.0, 1.0).map_err(setup)?;
    let stepper = Stepper::new(g, cfg.params.clone(), cfg.dt, settings).map_err(setup)?;
    let dir = resolve_output_dir(&cfg.output_dir);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write_file(&dir.join("config.txt"), &cfg.serialize())?;

    let mut st = initial_state(cfg, &g)?;
    let steps = cfg.steps();
    let area = g.lx * g.ly;
    let e_start = total_energy(&g, &cfg.params, &st).map_err(setup)?;
    let mass0 = st.phase.integral(&g);
    let mut csv = CsvWriter::create(&dir.join("diagnostics.csv"))?;
    snapshot(&dir, &g, &st, 0)?;

    let mut s = RunSummary {
        output_dir: dir.clone(),
        steps,
        e0: e_start.total,
        worst_increase: f64::NEG_INFINITY,
        max_charge_residual: 0.0,
        max_div_residual: 0.0,
        mass_drift: 0.0,
        max_overshoot: 0.0,
        energy: vec![e_start.total],
        kinetic: vec![e_start.kinetic],
        final_contour: Contour::default(),
        final_state: st.clone(),
    };
    for n in 1..=steps {
        let (next, d) = stepper.advance(&st).map_err(|source| CliError::Solver { step: n, source })?;
        st = next;
        // n * dt rather than a running sum, so t_end is hit exactly
        st.time = n as f64 * cfg.dt;
        let e = &d.energy_after;
        let row = StepRow {
            step: n,
            time: st.time,
            e_total: e.total,
            e_kinetic: e.kinetic,
            e_interfacial: e.interfacial(),
            dissipation: dissipation_rate(&g, &cfg.params, &st).map_err(|source| CliError::Solver { step: n, source })?,
            phase_mass: d.phase_mass,
            charge_residual: d.charge_residual,
            div_u_residual: d.div_u_residual,
            iters_ch: d.report_ch.iterations,
            iters_current: d.report_current.iterations,
            iters_ns: d.report_ns.iterations,
        };
        csv.line(&row.to_csv())?;

        let increase = e.total - d.energy_before.total;
        let drift = (d.phase_mass - mass0).abs() / area;
        s.worst_increase = s.worst_increase.max(increase);
        s.max_charge_residual = s.max_charge_residual.max(d.charge_residual);
        s.max_div_residual = s.max_div_residual.max(d.div_u_residual);
        s.mass_drift = s.mass_drift.max(drift);
        s.max_overshoot = s.max_overshoot.max(d.overshoot);
        s.energy.push(e.total);
        s.kinetic.push(e.kinetic);

        let breach = if cfg.abort_on_energy_increase && increase > cfg.energy_tolerance * s.e0.abs() {
            Some(format!(
                "energy rose by {increase:e} (tolerance {:e} * E(0) = {:e})",
                cfg.energy_tolerance, s.e0
            ))
        } else if d.charge_residual > CHARGE_TOLERANCE {
            Some(format!("max |div J| = {:e}", d.charge_residual))
        } else if d.div_u_residual > DIVERGENCE_TOLERANCE {
            Some(format!("max |div u| = {:e}", d.div_u_residual))
        } else if drift > MASS_TOLERANCE {
            Some(format!("phase mass drifted by {drift:e}"))
        } else {
            None
        };
        if let Some(msg) = breach {
            csv.finish()?;
            return Err(CliError::Invariant { step: n, msg });
        }

        if n % cfg.snapshot_every == 0 || n == steps {
            snapshot(&dir, &g, &st, n)?;
        }
    }
    csv.finish()?;
    s.final_contour = extract_contour(&g, &st.phase);
    write_file(&dir.join("contour_final.csv"), &contour_csv(&s.final_contour))?;
    s.final_state = st;
    Ok(s)
}

fn snapshot(dir: &Path, g: &GridSpec, st: &State, n: usize) -> Result<(), CliError> {
    write_file(&dir.join(format!("fields_{n:06}.vtk")), &vtk_string(g, st, n))?;
    let c = extract_contour(g, &st.phase);
    write_file(&dir.join(format!("contour_{n:06}.csv")), &contour_csv(&c))
}
