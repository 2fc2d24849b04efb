//! Energies, interface geometry and sharp-interface-limit measurements.

mod asymptotics;
mod contour;
mod energy;
mod geometry;
mod interface;

pub use asymptotics::{
    adaptive_simpson, iota_phase_integral, iota_profile_integral, iota_quadrature, profile_tanh,
    profile_tanh_derivative, well_position,
};
pub use contour::{extract_contour, Contour, Point, Polyline};
pub use energy::{dissipation_rate, ohmic_dissipation, total_energy, EnergyBreakdown};
pub use geometry::{circle_fit, hausdorff, isoperimetric_ratio, nearest_on_contour, CircleFit};
pub use interface::{
    capillary_pressure, cell_velocity, droplet_curvature, equipartition_residual, gibbs_thomson_residual,
    interfacial_mean_chem, pressure_jump, sample_cells, stefan_flux_residual, StefanResidual, BAND_LEVEL,
};
