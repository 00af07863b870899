//! Command-line front end for the `fbjacobi` collocation solver: single
//! solves, convergence sweeps with CSV and SVG output, and a self-test.

pub mod checks;
pub mod cli;
pub mod format;
pub mod report;
pub mod stats;
pub mod svg;

pub use cli::{run, run_with, ExitStatus};
