//! Time stepping and scenario initial data.

mod init;
mod state;
mod stepper;

pub use init::{
    init_circle, init_rounded_square, init_stripe, init_two_bubbles, init_vortex, vortex_velocity,
};
pub use state::{chemical_potential, State, StepDiagnostics};
pub use stepper::{Stepper, StepperSettings};

#[cfg(test)]
mod tests;
