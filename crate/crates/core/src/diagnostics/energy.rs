use crate::error::Result;
use crate::grid::{face_inner, grad_cell_to_face, interp_cell_to_face, viscous_dissipation, GridSpec, InterpMode};
use crate::physics::PhysParams;
use crate::scheme::State;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub interfacial_gradient: f64,
    pub interfacial_bulk: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn interfacial(&self) -> f64 {
        self.interfacial_gradient + self.interfacial_bulk
    }
}

/// `1/2 |u|^2 + (gamma eps / 2) |grad phi|^2 + (gamma / eps) sum F(phi)`,
/// midpoint quadrature on faces and cells.
pub fn total_energy(g: &GridSpec, params: &PhysParams, st: &State) -> Result<EnergyBreakdown> {
    let kinetic = 0.5 * face_inner(g, &st.vel, &st.vel);
    let gp = grad_cell_to_face(g, &st.phase)?;
    let interfacial_gradient = 0.5 * params.gamma * params.eps * face_inner(g, &gp, &gp);
    let mut bulk = 0.0;
    for &p in &st.phase.values {
        bulk += params.F(p)?;
    }
    let interfacial_bulk = params.gamma / params.eps * bulk * g.cell_volume();
    Ok(EnergyBreakdown {
        kinetic,
        interfacial_gradient,
        interfacial_bulk,
        total: kinetic + interfacial_gradient + interfacial_bulk,
    })
}

/// `sum 2 eta |D(u)|^2 + M |grad mu|^2 + |J|^2 / sigma` with the same face
/// averages the time stepper uses.
pub fn dissipation_rate(g: &GridSpec, params: &PhysParams, st: &State) -> Result<f64> {
    let eta = st.phase.map(|p| params.viscosity(p));
    let visc = viscous_dissipation(g, &eta, &st.vel)?;
    let m = interp_cell_to_face(g, &st.phase.map(|p| params.mobility_at(p)), InterpMode::Arithmetic)?;
    let gm = grad_cell_to_face(g, &st.chem)?;
    let diff = face_inner(g, &m.hadamard(&gm), &gm);
    let rho = interp_cell_to_face(g, &st.phase.map(|p| params.resistivity(p)), InterpMode::Arithmetic)?;
    let ohm = face_inner(g, &rho.hadamard(&st.current), &st.current);
    Ok(visc + diff + ohm)
}

/// Ohmic part `sum |J|^2 / sigma` alone.
pub fn ohmic_dissipation(g: &GridSpec, params: &PhysParams, st: &State) -> Result<f64> {
    let rho = interp_cell_to_face(g, &st.phase.map(|p| params.resistivity(p)), InterpMode::Arithmetic)?;
    Ok(face_inner(g, &rho.hadamard(&st.current), &st.current))
}
