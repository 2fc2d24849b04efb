//! Diffuse-interface solver for two-phase inductionless MHD flow in 2D.
//!
//! A Cahn-Hilliard phase field is coupled to incompressible Navier-Stokes
//! flow and to an Ohm's-law current with an out-of-plane magnetic field
//! `B = b e_z`. Time stepping is a decoupled, linear, energy-stable
//! three-step scheme on a staggered grid.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod linsolve;
pub mod physics;
pub mod scheme;

pub use error::{Error, Result};
