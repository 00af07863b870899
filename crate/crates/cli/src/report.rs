//! Convergence sweeps over the degree N.

use std::io::Write;

use fbjacobi::approximation::{linf_error_backward, weighted_l2_error_backward};
use fbjacobi::{solve, Problem, Spec};
use rayon::prelude::*;

use crate::format;

pub const CSV_HEADER: [&str; 6] = [
    "N",
    "linf_error",
    "l2w_error",
    "cond",
    "assembly_ms",
    "solve_ms",
];

/// Gauss points used for the weighted L² error at degree N.
pub fn l2_quad_size(n: usize) -> usize {
    (4 * n).max(200)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Basis and collocation parameters.
    pub spec: Spec,
    /// Weight of the L² error column.
    pub l2_spec: Spec,
    pub degrees: Vec<usize>,
    pub eval_points: usize,
    /// Record wall-clock timings (makes the CSV run-dependent).
    pub timings: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub linf_error: Option<f64>,
    pub l2w_error: Option<f64>,
    pub cond: Option<f64>,
    pub assembly_ms: Option<f64>,
    pub solve_ms: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub label: String,
    pub theta: f64,
    pub spec: Spec,
    /// Strictly increasing in N.
    pub rows: Vec<ReportRow>,
    /// One message per degree whose solve failed.
    pub warnings: Vec<String>,
}

impl ConvergenceReport {
    /// Solves every degree of the sweep (in parallel) and collects the rows
    /// in N order. A failed degree yields empty fields and a warning.
    pub fn run(problem: &Problem, cfg: &SweepConfig) -> Self {
        let mut degrees = cfg.degrees.clone();
        degrees.sort_unstable();
        degrees.dedup();
        let exact = problem.exact_fn();
        let results: Vec<(ReportRow, Option<String>)> = degrees
            .par_iter()
            .map(|&n| {
                let mut row = ReportRow {
                    n,
                    ..ReportRow::default()
                };
                let sol = match solve(problem, cfg.spec, n) {
                    Ok(sol) => sol,
                    Err(e) => return (row, Some(format!("N = {n}: {e}"))),
                };
                let diag = sol.diagnostics();
                row.cond = Some(diag.condition).filter(|c| c.is_finite());
                if cfg.timings {
                    row.assembly_ms = Some(diag.assembly_time.as_secs_f64() * 1e3);
                    row.solve_ms = Some(diag.solve_time.as_secs_f64() * 1e3);
                }
                let Some(u) = exact.as_ref() else {
                    return (row, None);
                };
                let linf = linf_error_backward(
                    cfg.spec,
                    |x| sol.eval_backward(x),
                    |x| u(x),
                    cfg.eval_points,
                );
                let l2 = weighted_l2_error_backward(
                    cfg.l2_spec,
                    |x| sol.eval_backward(x),
                    |x| u(x),
                    l2_quad_size(n),
                );
                let mut warning = None;
                match l2 {
                    Ok(l2) if l2.is_finite() && linf.is_finite() => {
                        row.linf_error = Some(linf);
                        row.l2w_error = Some(l2);
                    }
                    Ok(_) => warning = Some(format!("N = {n}: non-finite error norm")),
                    Err(e) => warning = Some(format!("N = {n}: {e}")),
                }
                (row, warning)
            })
            .collect();
        let (rows, warnings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        Self {
            label: problem.label().to_string(),
            theta: problem.theta(),
            spec: cfg.spec,
            rows,
            warnings: warnings.into_iter().flatten().collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                format::optional(r.linf_error),
                format::optional(r.l2w_error),
                format::optional(r.cond),
                format::optional(r.assembly_ms),
                format::optional(r.solve_ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
