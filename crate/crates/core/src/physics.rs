//! Pointwise closures: double-well potentials, mobility, property blending
//! and the planar Lorentz algebra for `B = b e_z`.

#![allow(non_snake_case)]

use crate::diagnostics::iota_quadrature;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// `F = (phi^2 - 1)^2 / 4`.
    GinzburgLandau,
    /// Logarithmic potential with energy parameter `theta > 2`.
    FloryHuggins { theta: f64 },
}

impl PotentialKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialKind::GinzburgLandau => Ok(()),
            PotentialKind::FloryHuggins { theta } if theta > 2.0 => Ok(()),
            PotentialKind::FloryHuggins { theta } => Err(Error::Domain {
                what: "Flory-Huggins theta (must exceed 2)",
                value: theta,
            }),
        }
    }
}

fn check_log_domain(phi: f64) -> Result<()> {
    if phi.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "phase value for the logarithmic potential",
            value: phi,
        })
    }
}

pub fn potential_F(kind: PotentialKind, phi: f64) -> Result<f64> {
    match kind {
        PotentialKind::GinzburgLandau => {
            let s = phi * phi - 1.0;
            Ok(0.25 * s * s)
        }
        PotentialKind::FloryHuggins { theta } => {
            check_log_domain(phi)?;
            let (p, m) = (0.5 * (1.0 + phi), 0.5 * (1.0 - phi));
            let s = phi * phi - 1.0;
            Ok(p * p.ln() + m * m.ln() + 0.25 * theta * s * s)
        }
    }
}

pub fn potential_f(kind: PotentialKind, phi: f64) -> Result<f64> {
    match kind {
        PotentialKind::GinzburgLandau => Ok(phi * phi * phi - phi),
        PotentialKind::FloryHuggins { theta } => {
            check_log_domain(phi)?;
            Ok(0.5 * ((1.0 + phi) / (1.0 - phi)).ln() + theta * phi * (phi * phi - 1.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobilityCase {
    /// `M = m0`.
    CaseI,
    /// `M = eps m0`.
    CaseII,
    /// Degenerate `M = m0 (1 - phi^2)_+`.
    CaseIII,
}

pub fn mobility(case: MobilityCase, m0: f64, eps: f64, phi: f64) -> f64 {
    match case {
        MobilityCase::CaseI => m0,
        MobilityCase::CaseII => eps * m0,
        MobilityCase::CaseIII => m0 * (1.0 - phi * phi).max(0.0),
    }
}

/// Linear blend of two phase properties, `phi` clamped to `[-1, 1]`.
pub fn blend(p1: f64, p2: f64, phi: f64) -> Result<f64> {
    if !(p1 > 0.0) {
        return Err(Error::Domain {
            what: "blended property (phase 1)",
            value: p1,
        });
    }
    if !(p2 > 0.0) {
        return Err(Error::Domain {
            what: "blended property (phase 2)",
            value: p2,
        });
    }
    let t = phi.clamp(-1.0, 1.0);
    Ok(p1 * 0.5 * (1.0 - t) + p2 * 0.5 * (1.0 + t))
}

/// In-plane part of `(vx, vy, 0) x (0, 0, b)`.
pub fn cross_with_B(vx: f64, vy: f64, b: f64) -> (f64, f64) {
    (vy * b, -vx * b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysParams {
    pub eps: f64,
    pub gamma: f64,
    pub m0: f64,
    pub mobility: MobilityCase,
    pub s_stab: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub b: f64,
    pub potential: PotentialKind,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            eps: 0.05,
            gamma: 0.1,
            m0: 1.0,
            mobility: MobilityCase::CaseI,
            s_stab: 2.0,
            eta1: 1.0,
            eta2: 1.0,
            sigma1: 1.0,
            sigma2: 1.0,
            b: 1.0,
            potential: PotentialKind::GinzburgLandau,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps", self.eps),
            ("gamma", self.gamma),
            ("m0", self.m0),
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.s_stab >= 0.0 && self.s_stab.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "s_stab must be nonnegative, got {}",
                self.s_stab
            )));
        }
        if !self.b.is_finite() {
            return Err(Error::InvalidParameter("b must be finite".into()));
        }
        self.potential.validate()
    }

    pub fn F(&self, phi: f64) -> Result<f64> {
        potential_F(self.potential, phi)
    }

    pub fn f(&self, phi: f64) -> Result<f64> {
        potential_f(self.potential, phi)
    }

    pub fn mobility_at(&self, phi: f64) -> f64 {
        mobility(self.mobility, self.m0, self.eps, phi)
    }

    pub fn viscosity(&self, phi: f64) -> f64 {
        blend(self.eta1, self.eta2, phi).expect("validated viscosities")
    }

    /// `1/sigma`, blended linearly between the pure-phase resistivities.
    pub fn resistivity(&self, phi: f64) -> f64 {
        blend(1.0 / self.sigma1, 1.0 / self.sigma2, phi).expect("validated conductivities")
    }

    /// Scaled surface tension `gamma * iota` of the sharp-interface limit.
    pub fn lambda_hat(&self) -> Result<f64> {
        Ok(self.gamma * iota_quadrature(self.potential)?)
    }
}
