//! Interface-width sweep against a thin-interface reference run.

use std::fmt::Write as _;
use std::path::PathBuf;

use chimhd_core::diagnostics::hausdorff;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::write_file;
use crate::run::{resolve_output_dir, run, RunSummary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    /// Hausdorff distance of the final zero contour to the reference contour.
    pub hausdorff: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// In the order of the requested widths.
    pub rows: Vec<SweepRow>,
    pub runs: Vec<RunSummary>,
    pub reference: RunSummary,
}

impl SweepResult {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].hausdorff < w[0].hausdorff)
    }

    pub fn table(&self) -> String {
        let mut s = String::from("eps,hausdorff\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:?},{:e}", r.eps, r.hausdorff);
        }
        s
    }
}

pub fn check_sweep_args(eps_list: &[f64], eps_ref: f64) -> Result<(), CliError> {
    if eps_list.is_empty() {
        return Err(CliError::Invalid("eps list is empty".into()));
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) || !(eps_ref.is_finite() && eps_ref > 0.0) {
        return Err(CliError::Invalid("interface widths must be positive and finite".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Invalid(format!(
            "eps list must be strictly decreasing, got {eps_list:?}"
        )));
    }
    let min = eps_list[eps_list.len() - 1];
    if eps_ref >= min {
        return Err(CliError::Invalid(format!(
            "eps_ref = {eps_ref} must be smaller than the smallest eps = {min}"
        )));
    }
    Ok(())
}

fn member(base: &RunConfig, root: &std::path::Path, eps: f64) -> RunConfig {
    let mut c = base.clone();
    c.params.eps = eps;
    c.output_dir = root.join(format!("eps_{eps}"));
    c
}

/// Runs every width and the reference concurrently, one output
/// subdirectory each, and writes `sweep.csv` into the base directory.
pub fn sweep_epsilon(base: &RunConfig, eps_list: &[f64], eps_ref: f64) -> Result<SweepResult, CliError> {
    check_sweep_args(eps_list, eps_ref)?;
    let root: PathBuf = resolve_output_dir(&base.output_dir);
    let configs: Vec<RunConfig> = eps_list
        .iter()
        .chain(std::iter::once(&eps_ref))
        .map(|&e| member(base, &root, e))
        .collect();
    for c in &configs {
        c.validate().map_err(CliError::Invalid)?;
    }
    let mut results: Vec<Result<RunSummary, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Invalid("sweep member panicked".into()))))
            .collect()
    });
    let reference = results.pop().expect("reference run")?;
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::with_capacity(runs.len());
    for (r, &eps) in runs.iter().zip(eps_list) {
        let d = hausdorff(&r.final_contour, &reference.final_contour).map_err(|source| CliError::Solver { step: r.steps, source })?;
        rows.push(SweepRow { eps, hausdorff: d });
    }
    let out = SweepResult { rows, runs, reference };
    write_file(&root.join("sweep.csv"), &out.table())?;
    Ok(out)
}
