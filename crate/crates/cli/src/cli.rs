//! Argument parsing and the three subcommands.

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbjacobi::approximation::evaluation_grid;
use fbjacobi::problems::{case_i, case_ii, example1, power_law};
use fbjacobi::{solve, Problem, Spec};

use crate::checks::{self, SelftestOptions};
use crate::format;
use crate::report::{ConvergenceReport, SweepConfig};
use crate::svg;

/// Process exit status. No other codes are ever returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    SelftestFailure = 1,
    Usage = 2,
    Numerical = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Selftest(String),
}

impl Failure {
    fn status(&self) -> ExitStatus {
        match self {
            Failure::Usage(_) => ExitStatus::Usage,
            Failure::Numerical(_) => ExitStatus::Numerical,
            Failure::Selftest(_) => ExitStatus::SelftestFailure,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Selftest(m) => write!(f, "selftest failed: {m}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "fbjacobi",
    version,
    about = "Spectral collocation for weakly singular adjoint Volterra equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and write t,u_num,u_exact,abs_error on the sampling grid.
    Solve(SolveArgs),
    /// Sweep the degree N and write a convergence table.
    Converge(ConvergeArgs),
    /// Run the invariant suite and print a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProblemKind {
    Example1,
    Case1,
    Case2,
    /// Power law u = (1-t)^gamma1 with K ≡ 1.
    Custom,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum, default_value = "example1")]
    problem: ProblemKind,
    /// Exponent θ of the weakly singular factor (ϱ-t)^{-θ}, in (0, 1).
    #[arg(long, default_value_t = 0.5, value_parser = parse_theta, allow_negative_numbers = true)]
    theta: f64,
    /// Mapping exponent ρ in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_rho, allow_negative_numbers = true)]
    rho: f64,
    #[arg(long, default_value_t = -0.25, value_parser = parse_jacobi, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = -0.25, value_parser = parse_jacobi, allow_negative_numbers = true)]
    upsilon: f64,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2, value_parser = parse_gamma)]
    gamma1: f64,
    #[arg(long, default_value_t = 1.7320508075688772, value_parser = parse_gamma)]
    gamma2: f64,
    /// Number of evaluation-grid samples.
    #[arg(long, default_value_t = 2001, value_parser = clap::value_parser!(u64).range(2..))]
    eval_points: u64,
    /// Accepted for uniformity; the solver is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: ProblemArgs,
    /// Polynomial degree N.
    #[arg(long, default_value_t = 16)]
    n: usize,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    common: ProblemArgs,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 32)]
    n_max: usize,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    n_step: u64,
    /// Jacobi weight (mu,upsilon) of the L² error column; defaults to the solver's.
    #[arg(long, value_parser = parse_weight, allow_hyphen_values = true)]
    l2_weight: Option<(f64, f64)>,
    /// Also write a semi-log SVG plot to this path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Fill the timing columns (makes the CSV run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    /// Seed for the random test functions.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Skip the N = 64 Lebesgue degree.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn parse_theta(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("theta = {v} must lie in the open interval (0, 1)"))
    }
}

fn parse_rho(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("rho = {v} must lie in (0, 1]"))
    }
}

fn parse_jacobi(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > -1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must exceed -1"))
    }
}

fn parse_gamma(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be nonnegative"))
    }
}

fn parse_weight(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("'{s}' is not of the form mu,upsilon"))?;
    Ok((parse_jacobi(a)?, parse_jacobi(b)?))
}

fn build_problem(a: &ProblemArgs) -> Result<Problem, Failure> {
    let p = match a.problem {
        ProblemKind::Example1 => example1(a.theta),
        ProblemKind::Case1 => case_i(a.theta, a.gamma1, a.gamma2),
        ProblemKind::Case2 => case_ii(a.theta, a.gamma1, a.gamma2),
        ProblemKind::Custom => power_law(a.theta, a.gamma1),
    };
    p.map_err(|e| Failure::Numerical(format!("cannot build problem: {e}")))
}

fn build_spec(a: &ProblemArgs) -> Result<Spec, Failure> {
    Spec::new(a.mu, a.upsilon, a.rho).map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes `bytes` to `path`, or to `stdout` when no path is given.
fn emit(path: Option<&PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => File::create(p)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|e| Failure::Usage(format!("cannot write --out {}: {e}", p.display()))),
        None => match stdout.write_all(bytes).and_then(|()| stdout.flush()) {
            // A closed pipe (e.g. `| head`) is not an error of this program.
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                Err(Failure::Usage(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn cmd_solve(a: &SolveArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let problem = build_problem(&a.common)?;
    let spec = build_spec(&a.common)?;
    let sol =
        solve(&problem, spec, a.n).map_err(|e| Failure::Numerical(format!("N = {}: {e}", a.n)))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Numerical(format!("CSV encoding: {e}"));
    w.write_record(["t", "u_num", "u_exact", "abs_error"])
        .map_err(csv_err)?;
    for p in evaluation_grid(spec, a.common.eval_points as usize) {
        let u = sol.eval_backward(p.x);
        let exact = problem.exact(p.x);
        w.write_record([
            format::float(p.t),
            format::float(u),
            format::optional(exact),
            format::optional(exact.map(|e| (u - e).abs())),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Failure::Numerical(e.to_string()))?;
    emit(a.common.out.as_ref(), &bytes, stdout)
}

fn cmd_converge(
    a: &ConvergeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    if a.n_min > a.n_max {
        return Err(Failure::Usage(format!(
            "--n-min {} exceeds --n-max {}",
            a.n_min, a.n_max
        )));
    }
    let problem = build_problem(&a.common)?;
    let spec = build_spec(&a.common)?;
    let l2_spec = match a.l2_weight {
        Some((mu, up)) => Spec::new(mu, up, a.common.rho)
            .map_err(|e| Failure::Usage(format!("--l2-weight: {e}")))?,
        None => spec,
    };
    let cfg = SweepConfig {
        spec,
        l2_spec,
        degrees: (a.n_min..=a.n_max).step_by(a.n_step as usize).collect(),
        eval_points: a.common.eval_points as usize,
        timings: a.timings,
    };
    let report = ConvergenceReport::run(&problem, &cfg);
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let mut bytes = Vec::new();
    report
        .write_csv(&mut bytes)
        .map_err(|e| Failure::Numerical(format!("CSV encoding: {e}")))?;
    emit(a.common.out.as_ref(), &bytes, stdout)?;
    if let Some(path) = &a.svg {
        File::create(path)
            .and_then(|mut f| f.write_all(svg::render(&report).as_bytes()))
            .map_err(|e| Failure::Usage(format!("cannot write --svg {}: {e}", path.display())))?;
    }
    if report.rows.iter().all(|r| r.cond.is_none()) {
        return Err(Failure::Numerical(
            "every degree of the sweep failed".into(),
        ));
    }
    Ok(())
}

fn cmd_selftest(a: &SelftestArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let results = checks::run_all(SelftestOptions {
        seed: a.seed,
        quick: a.quick,
    });
    emit(
        a.out.as_ref(),
        checks::render_table(&results).as_bytes(),
        stdout,
    )?;
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Selftest(failed.join(", ")))
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                ExitStatus::Usage
            } else {
                // --help and --version
                let _ = write!(stdout, "{}", e.render());
                ExitStatus::Success
            };
        }
    };
    let res = match &cli.command {
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Converge(a) => cmd_converge(a, stdout, stderr),
        Command::Selftest(a) => cmd_selftest(a, stdout),
    };
    match res {
        Ok(()) => ExitStatus::Success,
        Err(f) => {
            let _ = writeln!(stderr, "fbjacobi: {f}");
            f.status()
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout().lock(), &mut io::stderr().lock())
}
