//! Fractional backward Jacobi bases and spectral collocation for weakly
//! singular adjoint Volterra integral equations
//!
//! ```text
//! u(t) - ∫_t^1 (ϱ - t)^{-θ} K(t, ϱ) u(ϱ) dϱ = g(t),   t ∈ [0, 1].
//! ```
//!
//! Everything is generic over [`Real`] (implemented for `f32` and `f64`);
//! the aliases below fix the scalar to `f64`.
//!
//! Functions near t = 1 are handled in the backward variable x = 1 - t and
//! the mapped variable z = 1 - x^ρ, because t itself rounds to 1 long before
//! the collocation nodes stop being distinct.
//!
//! ```
//! use fbjacobi::{solve, Problem, Spec};
//!
//! // K ≡ 1, θ = 1/2, exact solution u = 1 - t = x, so 𝒦u = B(1/2, 2) x^{3/2}
//! // and B(1/2, 2) = 4/3. Closures take x = 1 - t.
//! let g = |x: f64| x - 4.0 / 3.0 * x.powf(1.5);
//! let p = Problem::new(0.5, |_, _| 1.0, g)?.with_exact(|x| x);
//! let sol = solve(&p, Spec::new(-0.25, -0.25, 1.0)?, 8)?;
//! assert!((sol.eval(0.3) - 0.7).abs() < 1e-12);
//! # Ok::<(), fbjacobi::Error>(())
//! ```

pub mod approximation;
pub mod basis;
pub mod error;
pub mod jacobi;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod special;
pub mod volterra;

pub use approximation::{Expansion, Interpolant};
pub use basis::BackwardSpec;
pub use error::{Error, Result};
pub use jacobi::{gauss_rule, JacobiParams, QuadratureRule};
pub use problems::OracleConfig;
pub use scalar::Real;
pub use volterra::{solve, CollocationSolution, Diagnostics, Discretization, ProblemDefinition};

pub type Spec = BackwardSpec<f64>;
pub type Params = JacobiParams<f64>;
pub type Rule = QuadratureRule<f64>;
pub type Problem = ProblemDefinition<f64>;
pub type Solution = CollocationSolution<f64>;
pub type Approximant = Interpolant<f64>;
pub type Series = Expansion<f64>;
