//! Diagnostics CSV, legacy-VTK field snapshots and contour CSV.
//!
//! Snapshot layout (ASCII, `STRUCTURED_POINTS`):
//!
//! ```text
//! # vtk DataFile Version 3.0
//! chimhd step <n> time <t>
//! ASCII
//! DATASET STRUCTURED_POINTS
//! DIMENSIONS <nx+1> <ny+1> 1
//! ORIGIN 0 0 0
//! SPACING <hx> <hy> 1
//! CELL_DATA <nx*ny>
//! SCALARS phase double 1
//! LOOKUP_TABLE default
//! <one value per line, i fastest>
//! ```
//!
//! followed by the scalar blocks `chem`, `pressure`, `epot` and the vector
//! blocks `velocity` and `current` (`VECTORS <name> double`, three
//! components per line, face values averaged to cell centres, z = 0).
//! Numbers are written in Rust's shortest round-trip form.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use chimhd_core::diagnostics::{cell_velocity, Contour};
use chimhd_core::grid::{CellField, FaceField, GridSpec};
use chimhd_core::scheme::State;

use crate::error::CliError;

pub const CSV_HEADER: &str = "step,time,E_total,E_kinetic,E_interfacial,dissipation,phase_mass,\
charge_residual,div_u_residual,iters_ch,iters_current,iters_ns";

/// One row of the per-step diagnostics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRow {
    pub step: usize,
    pub time: f64,
    pub e_total: f64,
    pub e_kinetic: f64,
    pub e_interfacial: f64,
    /// Dissipation rate at the new time level.
    pub dissipation: f64,
    pub phase_mass: f64,
    pub charge_residual: f64,
    pub div_u_residual: f64,
    pub iters_ch: usize,
    pub iters_current: usize,
    pub iters_ns: usize,
}

impl StepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            self.step,
            self.time,
            self.e_total,
            self.e_kinetic,
            self.e_interfacial,
            self.dissipation,
            self.phase_mass,
            self.charge_residual,
            self.div_u_residual,
            self.iters_ch,
            self.iters_current,
            self.iters_ns
        )
    }
}

fn scalars(out: &mut String, name: &str, f: &CellField) {
    let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
    for v in &f.values {
        let _ = writeln!(out, "{v:e}");
    }
}

fn vectors(out: &mut String, name: &str, g: &GridSpec, u: &FaceField) {
    let (ux, uy) = cell_velocity(g, u);
    let _ = writeln!(out, "VECTORS {name} double");
    for (a, b) in ux.values.iter().zip(&uy.values) {
        let _ = writeln!(out, "{a:e} {b:e} 0");
    }
}

pub fn vtk_string(g: &GridSpec, st: &State, step: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "chimhd step {step} time {:e}", st.time);
    let _ = writeln!(s, "ASCII\nDATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", g.nx + 1, g.ny + 1);
    let _ = writeln!(s, "ORIGIN 0 0 0");
    let _ = writeln!(s, "SPACING {:e} {:e} 1", g.hx, g.hy);
    let _ = writeln!(s, "CELL_DATA {}", g.n_cells());
    scalars(&mut s, "phase", &st.phase);
    scalars(&mut s, "chem", &st.chem);
    scalars(&mut s, "pressure", &st.pressure);
    scalars(&mut s, "epot", &st.epot);
    vectors(&mut s, "velocity", g, &st.vel);
    vectors(&mut s, "current", g, &st.current);
    s
}

pub fn contour_csv(c: &Contour) -> String {
    let mut s = String::from("poly_id,x,y\n");
    for (k, pl) in c.polylines.iter().enumerate() {
        for p in &pl.points {
            let _ = writeln!(s, "{k},{:e},{:e}", p.0, p.1);
        }
    }
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Line-buffered CSV writer for the step table.
pub struct CsvWriter {
    path: std::path::PathBuf,
    out: std::io::BufWriter<std::fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> Result<Self, CliError> {
        let f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = Self {
            path: path.to_path_buf(),
            out: std::io::BufWriter::new(f),
        };
        w.line(CSV_HEADER)?;
        Ok(w)
    }

    pub fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.out, "{s}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chimhd_core::diagnostics::extract_contour;
    use chimhd_core::physics::PhysParams;
    use chimhd_core::scheme::init_two_bubbles;

    #[test]
    fn vtk_layout() {
        let g = GridSpec::unit_square(8).unwrap();
        let p = PhysParams::default();
        let st = State::at_rest(&g, &p, CellField::constant(&g, 1.0)).unwrap();
        let s = vtk_string(&g, &st, 3);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[1], "chimhd step 3 time 0e0");
        assert_eq!(lines[4], "DIMENSIONS 9 9 1");
        assert_eq!(lines[6], "SPACING 1.25e-1 1.25e-1 1");
        assert_eq!(lines[7], "CELL_DATA 64");
        assert_eq!(lines[8], "SCALARS phase double 1");
        // 8 header lines, 4 scalar blocks of 2 + 64, 2 vector blocks of 1 + 64
        assert_eq!(lines.len(), 8 + 4 * 66 + 2 * 65);
        assert_eq!(lines[8 + 4 * 66], "VECTORS velocity double");
        assert_eq!(lines[8 + 4 * 66 + 1], "0e0 0e0 0");
    }

    #[test]
    fn contour_csv_ids() {
        let g = GridSpec::unit_square(64).unwrap();
        let c = extract_contour(&g, &init_two_bubbles(&g, 0.02).unwrap());
        let s = contour_csv(&c);
        assert!(s.starts_with("poly_id,x,y\n"));
        let ids: std::collections::BTreeSet<&str> = s.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(ids.into_iter().collect::<Vec<_>>(), vec!["0", "1"]);
        assert_eq!(s.lines().count(), 1 + c.n_points());
    }

    #[test]
    fn header_matches_row_width() {
        let row = StepRow {
            step: 1,
            time: 0.01,
            e_total: 1.0,
            e_kinetic: 0.5,
            e_interfacial: 0.5,
            dissipation: 0.0,
            phase_mass: -0.25,
            charge_residual: 0.0,
            div_u_residual: 0.0,
            iters_ch: 4,
            iters_current: 2,
            iters_ns: 20,
        };
        assert_eq!(row.to_csv().split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(row.to_csv(), "1,1e-2,1e0,5e-1,5e-1,0e0,-2.5e-1,0e0,0e0,4,2,20");
    }
}
