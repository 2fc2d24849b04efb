//! Decoupled linear three-step integrator.
//!
//! 1. Cahn-Hilliard: `(phi, mu)` with the velocity-decoupling term
//!    `dt div(phi_n^2 grad mu)` and linear stabilization `S`.
//! 2. Current: `(J, e)` from Ohm's law with the predicted velocity
//!    `u_n - dt phi_n grad mu + dt J x B` substituted into `u x B`.
//! 3. Navier-Stokes: `(u, p)` with skew-symmetric convection, surface force
//!    `phi_n grad mu` and Lorentz force `J x B`.
//!
//! Each step is one linear solve. The surface force uses the same face
//! interpolation of `phi_n` as the decoupling term of step 1; with that
//! choice and the consistent sign of the predicted velocity in step 2, the
//! discrete energy `E_h` is non-increasing for any `dt`.

use crate::diagnostics::{dissipation_rate, total_energy};
use crate::error::{Error, Result};
use crate::grid::{
    assemble_variable_laplacian, convect_stencil, cross_b, div_face_to_cell, grad_cell_to_face, grad_stencil,
    interp_cell_to_face, viscous_stencil, CellField, FaceField, GridSpec, InterpMode,
};
use crate::linsolve::{
    pgmres, schur_current_solve, FastDiag, FnOperator, IdentityPrecond, Preconditioner, SolveReport, SparseMatrix, DEFAULT_RESTART,
};
use crate::physics::PhysParams;
use crate::scheme::state::{chemical_potential, State, StepDiagnostics};

#[derive(Debug, Clone, PartialEq)]
pub struct StepperSettings {
    pub tol_ch: f64,
    pub tol_current: f64,
    pub tol_ns: f64,
    pub maxit: usize,
    pub restart: usize,
    /// Keep the phase field fixed (single-fluid runs).
    pub freeze_phase: bool,
    /// Keep the fluid at rest: pure Cahn-Hilliard relaxation.
    pub freeze_velocity: bool,
}

impl Default for StepperSettings {
    fn default() -> Self {
        Self {
            tol_ch: 1e-10,
            tol_current: 1e-12,
            tol_ns: 1e-10,
            maxit: 2000,
            restart: DEFAULT_RESTART,
            freeze_phase: false,
            freeze_velocity: false,
        }
    }
}

pub struct Stepper {
    pub grid: GridSpec,
    pub params: PhysParams,
    pub dt: f64,
    pub settings: StepperSettings,
    lap: SparseMatrix,
    fd_cells: FastDiag,
    fd_xvel: FastDiag,
    fd_yvel: FastDiag,
}

impl Stepper {
    pub fn new(grid: GridSpec, params: PhysParams, dt: f64, settings: StepperSettings) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let lap = crate::grid::assemble_laplacian(&grid);
        Ok(Self {
            fd_cells: FastDiag::neumann_cells(&grid),
            fd_xvel: FastDiag::xface_velocity(&grid),
            fd_yvel: FastDiag::yface_velocity(&grid),
            lap,
            grid,
            params,
            dt,
            settings,
        })
    }

    fn phase_faces(&self, phase: &CellField) -> Result<FaceField> {
        interp_cell_to_face(&self.grid, phase, InterpMode::Arithmetic)
    }

    /// Surface force `phi_f grad mu` on faces (zero on boundary faces).
    pub fn surface_force(&self, phase_lag: &CellField, chem: &CellField) -> Result<FaceField> {
        let pf = self.phase_faces(phase_lag)?;
        Ok(pf.hadamard(&grad_cell_to_face(&self.grid, chem)?))
    }

    /// Face mobility: `M(phi)` in cells, averaged arithmetically to faces.
    pub fn face_mobility(&self, phase: &CellField) -> Result<FaceField> {
        let m = phase.map(|p| self.params.mobility_at(p));
        interp_cell_to_face(&self.grid, &m, InterpMode::Arithmetic)
    }

    /// Face resistivity `1/sigma(phi)`, averaged arithmetically.
    pub fn face_resistivity(&self, phase: &CellField) -> Result<FaceField> {
        let r = phase.map(|p| self.params.resistivity(p));
        interp_cell_to_face(&self.grid, &r, InterpMode::Arithmetic)
    }

    pub fn viscosity_cells(&self, phase: &CellField) -> CellField {
        phase.map(|p| self.params.viscosity(p))
    }

    /// Step 1. Returns `(phi_{n+1}, mu_{n+1}, report)`.
    ///
    /// `phi` is eliminated through the discrete mass balance
    /// `phi = phi_n - dt div(phi_f u_n) + dt div(Mt grad mu)`, which leaves a
    /// single equation for `mu`; phase mass is therefore conserved to
    /// rounding whatever the solver residual.
    pub fn ch_step(&self, st: &State) -> Result<(CellField, CellField, SolveReport)> {
        let g = &self.grid;
        let p = &self.params;
        let dt = self.dt;
        if self.settings.freeze_phase {
            let chem = chemical_potential(g, p, &st.phase)?;
            return Ok((st.phase.clone(), chem, SolveReport::trivial()));
        }
        let pf = self.phase_faces(&st.phase)?;
        let mut mt = self.face_mobility(&st.phase)?;
        let mut phi_star = st.phase.clone();
        if !self.settings.freeze_velocity {
            mt.axpy(dt, &pf.hadamard(&pf));
            let adv = div_face_to_cell(g, &pf.hadamard(&st.vel))?;
            phi_star.axpy(-dt, &adv);
        }
        let ge = p.gamma * p.eps;
        let gs = p.gamma * p.s_stab / p.eps;
        let gi = p.gamma / p.eps;
        let n = g.n_cells();
        let lap = &self.lap;
        // K v = -gamma eps L v + (gamma S / eps) v
        let apply_k = |v: &[f64], out: &mut [f64]| {
            lap.mul_into(v, out);
            for k in 0..n {
                out[k] = -ge * out[k] + gs * v[k];
            }
        };
        let mut rhs = vec![0.0; n];
        apply_k(&phi_star.values, &mut rhs);
        for k in 0..n {
            rhs[k] += -gs * st.phase.values[k] + gi * p.f(st.phase.values[k])?;
        }

        let lm = assemble_variable_laplacian(g, &mt);
        let mbar = interior_mean(g, &mt);
        let pc = CellSpectralPrecond {
            fd: &self.fd_cells,
            mult: move |lx: f64, ly: f64| {
                let l = -(lx + ly);
                1.0 / (1.0 + dt * mbar * l * (ge * l + gs))
            },
        };
        // Left preconditioning: the operator norm grows like h^-4, so the
        // unscaled residual stalls at rounding level on fine grids.
        let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            let mut t = vec![0.0; n];
            let mut s = vec![0.0; n];
            lm.mul_into(x, &mut t);
            apply_k(&t, &mut s);
            for k in 0..n {
                s[k] = x[k] - dt * s[k];
            }
            pc.apply(&s, y);
        });
        let mut prhs = vec![0.0; n];
        pc.apply(&rhs, &mut prhs);
        let (mu, rep) = pgmres(
            &op,
            &IdentityPrecond,
            &prhs,
            Some(&st.chem.values),
            self.settings.tol_ch,
            self.settings.maxit,
            self.settings.restart,
        )?;
        let rep = rep.require("cahn-hilliard gmres")?;
        let mut lmu = vec![0.0; n];
        lm.mul_into(&mu, &mut lmu);
        let mut phase = phi_star;
        for k in 0..n {
            phase.values[k] += dt * lmu[k];
        }
        Ok((phase, CellField::from_vec(g, mu)?, rep))
    }

    /// Step 2. Returns `(J, e, report)` with `div J = 0` and zero-mean `e`.
    ///
    /// `phase_new` sets the conductivity, `phase_lag` the surface force.
    pub fn current_step(
        &self,
        phase_new: &CellField,
        phase_lag: &CellField,
        chem_new: &CellField,
        vel_old: &FaceField,
    ) -> Result<(FaceField, CellField, SolveReport)> {
        let g = &self.grid;
        let b = self.params.b;
        if self.settings.freeze_velocity || b == 0.0 {
            return Ok((FaceField::zeros(g), CellField::zeros(g), SolveReport::trivial()));
        }
        let a = self.surface_force(phase_lag, chem_new)?;
        let mut r = cross_b(g, vel_old, b)?;
        r.axpy(-self.dt, &cross_b(g, &a, b)?);
        let mut coeff = self.face_resistivity(phase_new)?;
        let shift = self.dt * b * b;
        coeff.xs.iter_mut().chain(coeff.ys.iter_mut()).for_each(|v| *v += shift);
        schur_current_solve(g, &coeff, &r, self.settings.tol_current)
    }

    /// Step 3. Returns `(u, p, report)`; `p` has zero cell mean.
    pub fn ns_step(
        &self,
        st: &State,
        phase_new: &CellField,
        chem_new: &CellField,
        current_new: &FaceField,
    ) -> Result<(FaceField, CellField, SolveReport)> {
        let g = &self.grid;
        let dt = self.dt;
        if self.settings.freeze_velocity {
            return Ok((st.vel.clone(), CellField::zeros(g), SolveReport::trivial()));
        }
        let nf = g.n_faces();
        let nc = g.n_cells();
        let eta = self.viscosity_cells(phase_new);

        let mut rhs_u = st.vel.clone();
        rhs_u.axpy(-dt, &self.surface_force(&st.phase, chem_new)?);
        rhs_u.axpy(dt, &cross_b(g, current_new, self.params.b)?);
        rhs_u.zero_boundary();
        let mut rhs = rhs_u.to_flat();
        rhs.resize(nf + nc, 0.0);

        let mut trip = Vec::with_capacity(24 * nf);
        for k in 0..nf {
            trip.push((k, k, 1.0));
        }
        convect_stencil(g, &st.vel, &mut |r, c, v| trip.push((r, c, dt * v)));
        viscous_stencil(g, &eta, &mut |r, c, v| trip.push((r, c, -dt * v)));
        grad_stencil(g, &mut |r, c, v| trip.push((r, nf + c, dt * v)));
        crate::grid::div_stencil(g, &mut |r, c, v| trip.push((nf + r, c, -v)));
        let a = SparseMatrix::from_triplets(nf + nc, nf + nc, &trip)?;

        let eta_bar = eta.mean();
        let pc = StokesPrecond {
            stepper: self,
            eta_cell: &eta,
            eta_bar,
        };
        let mut x0 = st.vel.to_flat();
        x0.extend_from_slice(&st.pressure.values);

        let div_bound = 1e-10;
        let mut tol = self.settings.tol_ns;
        let mut total_iters = 0;
        let mut guess = x0;
        loop {
            let (x, rep) = pgmres(&a, &pc, &rhs, Some(&guess), tol, self.settings.maxit, self.settings.restart)?;
            total_iters += rep.iterations;
            let rep = SolveReport {
                iterations: total_iters,
                ..rep
            };
            let mut vel = FaceField::from_flat(g, &x[..nf])?;
            vel.zero_boundary();
            let div = div_face_to_cell(g, &vel)?.max_abs();
            if (div <= div_bound || tol < 1e-15) && rep.converged {
                let mut p = CellField::from_vec(g, x[nf..].to_vec())?;
                p.remove_mean();
                return Ok((vel, p, rep));
            }
            if !rep.converged {
                return Err(Error::NotConverged {
                    solver: "navier-stokes gmres",
                    report: rep,
                });
            }
            tol *= 0.01;
            guess = x;
        }
    }

    /// One full time step.
    pub fn advance(&self, st: &State) -> Result<(State, StepDiagnostics)> {
        let g = &self.grid;
        let energy_before = total_energy(g, &self.params, st)?;
        let (phase, chem, report_ch) = self.ch_step(st)?;
        let (current, epot, report_current) = self.current_step(&phase, &st.phase, &chem, &st.vel)?;
        let (vel, pressure, report_ns) = self.ns_step(st, &phase, &chem, &current)?;
        let next = State {
            phase,
            chem,
            vel,
            pressure,
            current,
            epot,
            time: st.time + self.dt,
        };
        if !next.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite state after step at t = {}",
                next.time
            )));
        }
        let energy_after = total_energy(g, &self.params, &next)?;
        let dissipation_dt = self.dt * dissipation_rate(g, &self.params, &next)?;
        let diag = StepDiagnostics {
            dissipation_increment: energy_before.total - energy_after.total,
            energy_before,
            energy_after,
            dissipation_dt,
            phase_mass: next.phase.integral(g),
            charge_residual: div_face_to_cell(g, &next.current)?.max_abs(),
            div_u_residual: div_face_to_cell(g, &next.vel)?.max_abs(),
            overshoot: (next.phase.max_abs() - 1.0).max(0.0),
            report_ch,
            report_current,
            report_ns,
        };
        Ok((next, diag))
    }

    /// Projects a face field onto the discretely divergence-free, no-flux
    /// fields: `u - grad psi` with `L psi = div u`.
    pub fn project(&self, u: &FaceField) -> Result<FaceField> {
        project_divergence_free(&self.grid, &self.fd_cells, u)
    }
}

pub(crate) fn project_divergence_free(g: &GridSpec, fd: &FastDiag, u: &FaceField) -> Result<FaceField> {
    let mut u = u.clone();
    u.zero_boundary();
    // two sweeps remove the rounding left by the first
    for _ in 0..2 {
        let d = div_face_to_cell(g, &u)?;
        let mut psi = vec![0.0; g.n_cells()];
        fd.apply(&d.values, &mut psi, |a, b| if a + b == 0.0 { 0.0 } else { 1.0 / (a + b) });
        let gp = grad_cell_to_face(g, &CellField::from_vec(g, psi)?)?;
        u.axpy(-1.0, &gp);
    }
    Ok(u)
}

fn interior_mean(g: &GridSpec, f: &FaceField) -> f64 {
    let mut s = 0.0;
    let mut n = 0usize;
    for j in 0..g.ny {
        for i in 1..g.nx {
            s += f.xs[g.xface(i, j)];
            n += 1;
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            s += f.ys[g.yface(i, j)];
            n += 1;
        }
    }
    s / n as f64
}

struct CellSpectralPrecond<'a, F> {
    fd: &'a FastDiag,
    mult: F,
}

impl<F: Fn(f64, f64) -> f64> Preconditioner for CellSpectralPrecond<'_, F> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.fd.apply(r, z, &self.mult);
    }
}

/// Block upper-triangular preconditioner for the velocity-pressure system:
/// pressure Schur complement `(L^+ / dt - 2 eta)` followed by a
/// constant-viscosity vector Helmholtz solve for each velocity component.
struct StokesPrecond<'a> {
    stepper: &'a Stepper,
    eta_cell: &'a CellField,
    eta_bar: f64,
}

impl Preconditioner for StokesPrecond<'_> {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let s = self.stepper;
        let g = &s.grid;
        let dt = s.dt;
        let nf = g.n_faces();
        let nc = g.n_cells();

        let (ru, rp) = r.split_at(nf);
        let (zu, zp) = z.split_at_mut(nf);
        s.fd_cells.apply(rp, zp, |a, b| if a + b == 0.0 { 0.0 } else { 1.0 / (dt * (a + b)) });
        for k in 0..nc {
            zp[k] -= 2.0 * self.eta_cell.values[k] * rp[k];
        }

        let mut t = ru.to_vec();
        grad_stencil(g, &mut |row, c, v| t[row] -= dt * v * zp[c]);

        let eb = self.eta_bar;
        let mult = |a: f64, b: f64| 1.0 / (1.0 - dt * eb * (a + b));
        let (mx, my) = (g.nx - 1, g.ny);
        let mut buf = vec![0.0; mx * my];
        let mut out = vec![0.0; mx * my];
        for j in 0..my {
            for i in 1..g.nx {
                buf[(i - 1) + mx * j] = t[g.flat_xface(i, j)];
            }
        }
        s.fd_xvel.apply(&buf, &mut out, mult);
        zu.copy_from_slice(&t);
        for j in 0..my {
            for i in 1..g.nx {
                zu[g.flat_xface(i, j)] = out[(i - 1) + mx * j];
            }
        }
        let (mx, my) = (g.nx, g.ny - 1);
        let mut buf = vec![0.0; mx * my];
        let mut out = vec![0.0; mx * my];
        for j in 1..g.ny {
            for i in 0..mx {
                buf[i + mx * (j - 1)] = t[g.flat_yface(i, j)];
            }
        }
        s.fd_yvel.apply(&buf, &mut out, mult);
        for j in 1..g.ny {
            for i in 0..mx {
                zu[g.flat_yface(i, j)] = out[i + mx * (j - 1)];
            }
        }
    }
}
