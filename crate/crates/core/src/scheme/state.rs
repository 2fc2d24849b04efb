use crate::diagnostics::EnergyBreakdown;
use crate::error::Result;
use crate::grid::{laplacian_neumann, CellField, FaceField, GridSpec};
use crate::linsolve::SolveReport;
use crate::physics::PhysParams;

/// All unknowns at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub phase: CellField,
    pub chem: CellField,
    pub vel: FaceField,
    /// Zero cell mean.
    pub pressure: CellField,
    pub current: FaceField,
    /// Electric potential, zero cell mean.
    pub epot: CellField,
    pub time: f64,
}

impl State {
    /// Fluid at rest with the given phase field; the chemical potential is
    /// evaluated from `phase` so that diagnostics at t = 0 are meaningful.
    pub fn at_rest(g: &GridSpec, params: &PhysParams, phase: CellField) -> Result<Self> {
        let chem = chemical_potential(g, params, &phase)?;
        Ok(Self {
            phase,
            chem,
            vel: FaceField::zeros(g),
            pressure: CellField::zeros(g),
            current: FaceField::zeros(g),
            epot: CellField::zeros(g),
            time: 0.0,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.phase.is_finite()
            && self.chem.is_finite()
            && self.vel.is_finite()
            && self.pressure.is_finite()
            && self.current.is_finite()
            && self.epot.is_finite()
            && self.time.is_finite()
    }
}

/// `mu = -gamma eps lap(phi) + (gamma / eps) f(phi)`.
pub fn chemical_potential(g: &GridSpec, params: &PhysParams, phase: &CellField) -> Result<CellField> {
    let lap = laplacian_neumann(g, phase)?;
    let ge = params.gamma * params.eps;
    let gi = params.gamma / params.eps;
    let mut out = CellField::zeros(g);
    for k in 0..out.values.len() {
        out.values[k] = -ge * lap.values[k] + gi * params.f(phase.values[k])?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub energy_before: EnergyBreakdown,
    pub energy_after: EnergyBreakdown,
    /// `E(t_n) - E(t_{n+1})`.
    pub dissipation_increment: f64,
    /// `dt` times the physical dissipation rate at the new level.
    pub dissipation_dt: f64,
    pub phase_mass: f64,
    pub charge_residual: f64,
    pub div_u_residual: f64,
    /// Largest `|phi| - 1` over the new phase field (0 without overshoot).
    pub overshoot: f64,
    pub report_ch: SolveReport,
    pub report_current: SolveReport,
    pub report_ns: SolveReport,
}
