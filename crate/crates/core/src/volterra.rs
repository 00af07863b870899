//! Collocation solver for weakly singular adjoint Volterra equations
//!
//! ```text
//! u(t) = g(t) + ∫_t^1 (ϱ - t)^{-θ} K(t, ϱ) u(ϱ) dϱ,   0 < θ < 1.
//! ```
//!
//! Collocation happens at the zeros of the degree-(N+1) backward basis
//! function. At each node t_i the integral is moved onto η ∈ (0, 1) by
//! ϱ = t_i + (1 - t_i)(1 - (1 - η)^{1/ρ}), which turns the kernel singularity
//! into the Jacobi weight (1 - η)^{1/ρ - 1} η^{-θ} and is then approximated by
//! the matching (N+1)-point Gauss rule.
//!
//! Problem data are expressed in the backward variables x = 1 - t and
//! y = 1 - ϱ. With small ρ the outermost collocation nodes lie closer to
//! t = 1 than machine epsilon, so t itself cannot resolve them.

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::approximation::Interpolant;
use crate::basis::BackwardSpec;
use crate::error::{domain, Error, Result};
use crate::jacobi::{gauss_rule, JacobiParams, QuadratureRule};
use crate::linalg::{condition_estimate, Lu, Matrix};
use crate::scalar::Real;

/// K(x, y) with x = 1 - t and y = 1 - ϱ, defined for 0 ≤ y ≤ x ≤ 1.
pub type KernelFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// g(x) with x = 1 - t; may fail (e.g. an oracle-backed source).
pub type SourceFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// A function of the backward variable x = 1 - t.
pub type BackwardFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Below this η the singular factor switches to its Taylor expansion.
pub const TAYLOR_SPLICE: f64 = 1e-6;

/// Condition estimates above this are flagged in the diagnostics.
pub const NEAR_SINGULAR_CONDITION: f64 = 1e12;

/// Data of one Volterra problem.
#[derive(Clone)]
pub struct ProblemDefinition<T> {
    label: String,
    theta: T,
    kernel: KernelFn<T>,
    source: SourceFn<T>,
    exact: Option<BackwardFn<T>>,
}

impl<T: Real> fmt::Debug for ProblemDefinition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("label", &self.label)
            .field("theta", &self.theta)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl<T: Real> ProblemDefinition<T> {
    /// Kernel and source in backward variables.
    pub fn new<K, G>(theta: T, kernel: K, source: G) -> Result<Self>
    where
        K: Fn(T, T) -> T + Send + Sync + 'static,
        G: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::with_fallible_source(theta, Arc::new(kernel), Arc::new(move |x| Ok(source(x))))
    }

    pub fn with_fallible_source(
        theta: T,
        kernel: KernelFn<T>,
        source: SourceFn<T>,
    ) -> Result<Self> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "singularity exponent theta = {theta} must lie in (0, 1)"
            )));
        }
        // Finite on the closed triangle 0 ≤ y ≤ x ≤ 1.
        let steps = 10;
        for a in 0..=steps {
            for b in 0..=a {
                let x = T::of_usize(a) / T::of_usize(steps);
                let y = T::of_usize(b) / T::of_usize(steps);
                let k = kernel(x, y);
                if !k.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "kernel is not finite at (t, rho) = ({}, {})",
                        T::one() - x,
                        T::one() - y
                    )));
                }
            }
        }
        Ok(Self {
            label: String::from("custom"),
            theta,
            kernel,
            source,
            exact: None,
        })
    }

    /// Kernel K(t, ϱ) and source g(t) in the original variables.
    pub fn from_forward<K, G>(theta: T, kernel: K, source: G) -> Result<Self>
    where
        K: Fn(T, T) -> T + Send + Sync + 'static,
        G: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::new(
            theta,
            move |x, y| kernel(T::one() - x, T::one() - y),
            move |x| source(T::one() - x),
        )
    }

    /// Attaches the exact solution as a function of x = 1 - t.
    pub fn with_exact<U>(mut self, exact: U) -> Self
    where
        U: Fn(T) -> T + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// K at backward coordinates (x, y).
    pub fn kernel(&self, x: T, y: T) -> T {
        (self.kernel)(x, y)
    }

    /// g at backward coordinate x.
    pub fn source(&self, x: T) -> Result<T> {
        (self.source)(x)
    }

    /// Exact solution at backward coordinate x, when known.
    pub fn exact(&self, x: T) -> Option<T> {
        self.exact.as_ref().map(|u| u(x))
    }

    pub fn exact_fn(&self) -> Option<BackwardFn<T>> {
        self.exact.clone()
    }
}

/// ((1 - (1 - η)^{1/ρ}) / η)^{-θ}; tends to ρ^θ as η → 0.
pub fn singular_factor<T: Real>(rho: T, theta: T, eta: T) -> T {
    let q = T::one() / rho;
    if eta < T::of(TAYLOR_SPLICE) {
        let a = -(q - T::one()) / T::of(2.0);
        let b = (q - T::one()) * (q - T::of(2.0)) / T::of(6.0);
        let c1 = -theta * a;
        let c2 = theta * (theta + T::one()) / T::of(2.0) * a * a - theta * b;
        rho.powf(theta) * (T::one() + eta * (c1 + eta * c2))
    } else {
        let ratio = -(q * (-eta).ln_1p()).exp_m1() / eta;
        ratio.powf(-theta)
    }
}

/// K̄ at backward node coordinate x_i = 1 - t_i and quadrature variable η:
/// (x_i^{1-θ}/ρ) · ((1 - (1-η)^{1/ρ})/η)^{-θ} · K(t_i, ϱ_i(η)).
pub fn kernel_transform_backward<T: Real>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    x_i: T,
    eta: T,
) -> Result<T> {
    if !(x_i > T::zero()) {
        return Err(domain(
            "kernel_transform",
            "collocation point must lie strictly before t = 1",
        ));
    }
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(domain(
            "kernel_transform",
            format!("eta = {eta} outside [0, 1)"),
        ));
    }
    let rho = spec.rho();
    let theta = problem.theta();
    let y = x_i * ((-eta).ln_1p() / rho).exp();
    Ok(
        x_i.powf(T::one() - theta) / rho
            * singular_factor(rho, theta, eta)
            * problem.kernel(x_i, y),
    )
}

/// [`kernel_transform_backward`] at t_i; fails for t_i = 1.
pub fn kernel_transform<T: Real>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    t_i: T,
    eta: T,
) -> Result<T> {
    kernel_transform_backward(problem, spec, T::one() - t_i, eta)
}

/// Jacobi exponents (1/ρ - 1, -θ) of the transformed kernel weight.
pub fn transformed_weight<T: Real>(spec: BackwardSpec<T>, theta: T) -> Result<JacobiParams<T>> {
    JacobiParams::new(T::one() / spec.rho() - T::one(), -theta)
}

/// Nodes, quadrature rule and interpolation template for one (spec, N).
#[derive(Clone, Debug)]
pub struct Discretization<T> {
    spec: BackwardSpec<T>,
    theta: T,
    nodes_z: Vec<T>,
    nodes_x: Vec<T>,
    rule: QuadratureRule<T>,
    template: Interpolant<T>,
}

impl<T: Real> Discretization<T> {
    /// Uses the (N+1)-point rule unless `quad_size` overrides it.
    pub fn new(
        spec: BackwardSpec<T>,
        theta: T,
        n: usize,
        quad_size: Option<usize>,
    ) -> Result<Self> {
        let nodes_z = spec.nodes_z(n)?;
        let nodes_x: Vec<T> = nodes_z.iter().map(|&z| spec.backward_of_z(z)).collect();
        if nodes_x.iter().any(|&x| !(x > T::zero())) {
            return Err(domain(
                "assemble",
                "a collocation node underflowed onto the terminal endpoint",
            ));
        }
        let rule = gauss_rule(transformed_weight(spec, theta)?, quad_size.unwrap_or(n + 1))?;
        let template = Interpolant::from_values(spec, nodes_z.clone(), vec![T::zero(); n + 1])?;
        Ok(Self {
            spec,
            theta,
            nodes_z,
            nodes_x,
            rule,
            template,
        })
    }

    pub fn spec(&self) -> BackwardSpec<T> {
        self.spec
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn degree(&self) -> usize {
        self.nodes_z.len() - 1
    }

    pub fn nodes_z(&self) -> &[T] {
        &self.nodes_z
    }

    /// Nodes as x_i = 1 - t_i.
    pub fn nodes_x(&self) -> &[T] {
        &self.nodes_x
    }

    pub fn nodes_t(&self) -> Vec<T> {
        self.nodes_z
            .iter()
            .map(|&z| self.spec.map_inverse(z))
            .collect()
    }

    /// Quadrature rule in η.
    pub fn rule(&self) -> &QuadratureRule<T> {
        &self.rule
    }

    /// Mapped coordinate of ϱ_i(η): z_i + (1 - z_i) η.
    #[inline]
    fn z_of_quad_point(&self, i: usize, eta: T) -> T {
        let zi = self.nodes_z[i];
        zi + (T::one() - zi) * eta
    }
}

/// Quadrature approximation of (𝒦φ) at the backward point x_i, for φ given
/// as a function of y = 1 - ϱ.
pub fn discrete_operator_at<T: Real, F: Fn(T) -> T>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    rule: &QuadratureRule<T>,
    x_i: T,
    phi: F,
) -> Result<T> {
    let rho = spec.rho();
    let mut acc = T::zero();
    for (eta, chi) in rule.iter() {
        let y = x_i * ((-eta).ln_1p() / rho).exp();
        acc += kernel_transform_backward(problem, spec, x_i, eta)? * phi(y) * chi;
    }
    Ok(acc)
}

/// (𝒦_N φ)(t_i) at collocation node i of the degree-N discretization.
pub fn discrete_operator<T: Real, F: Fn(T) -> T>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    n: usize,
    phi: F,
    i: usize,
) -> Result<T> {
    let disc = Discretization::new(spec, problem.theta(), n, None)?;
    let x_i = *disc.nodes_x.get(i).ok_or_else(|| {
        Error::InvalidParameter(format!("node index {i} out of range for N = {n}"))
    })?;
    discrete_operator_at(problem, spec, &disc.rule, x_i, phi)
}

/// Collocation matrix I - A and right-hand side g(t_i).
#[derive(Clone, Debug)]
pub struct AssembledSystem<T> {
    pub matrix: Matrix<T>,
    pub rhs: Vec<T>,
    pub discretization: Discretization<T>,
}

/// Builds the (N+1)×(N+1) system with A_ij = Σ_k K̄(t_i, η_k) h_j(ϱ_i(η_k)) χ_k.
pub fn assemble<T: Real>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    n: usize,
) -> Result<AssembledSystem<T>> {
    assemble_with(
        problem,
        Discretization::new(spec, problem.theta(), n, None)?,
    )
}

pub fn assemble_with<T: Real>(
    problem: &ProblemDefinition<T>,
    disc: Discretization<T>,
) -> Result<AssembledSystem<T>> {
    let size = disc.degree() + 1;
    let spec = disc.spec;
    let mut matrix = Matrix::identity(size);
    let mut rhs = Vec::with_capacity(size);
    let mut cardinals = vec![T::zero(); size];
    for i in 0..size {
        let x_i = disc.nodes_x[i];
        let g = problem.source(x_i).map_err(|e| Error::SourceEvaluation {
            index: i,
            t: (T::one() - x_i).as_f64(),
            reason: e.to_string(),
        })?;
        if !g.is_finite() {
            return Err(Error::SourceEvaluation {
                index: i,
                t: (T::one() - x_i).as_f64(),
                reason: format!("source returned {g}"),
            });
        }
        rhs.push(g);
        for (eta, chi) in disc.rule.iter() {
            let weight = kernel_transform_backward(problem, spec, x_i, eta)? * chi;
            disc.template
                .cardinals_z(disc.z_of_quad_point(i, eta), &mut cardinals);
            let row = matrix.row_mut(i);
            for (a, &h) in row.iter_mut().zip(&cardinals) {
                *a -= weight * h;
            }
        }
    }
    Ok(AssembledSystem {
        matrix,
        rhs,
        discretization: disc,
    })
}

/// Solver diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T> {
    /// 1-norm condition estimate of I - A.
    pub condition: T,
    /// Set when the condition estimate exceeds 1e12.
    pub near_singular: bool,
    /// max_i |(I - A)u - g|_i.
    pub residual: T,
    pub assembly_time: Duration,
    pub solve_time: Duration,
}

/// Nodal solution of the collocation scheme and its interpolant.
#[derive(Clone, Debug)]
pub struct CollocationSolution<T> {
    spec: BackwardSpec<T>,
    nodes_t: Vec<T>,
    nodes_x: Vec<T>,
    interpolant: Interpolant<T>,
    diagnostics: Diagnostics<T>,
}

impl<T: Real> CollocationSolution<T> {
    pub fn spec(&self) -> BackwardSpec<T> {
        self.spec
    }

    pub fn degree(&self) -> usize {
        self.nodes_t.len() - 1
    }

    pub fn nodes_t(&self) -> &[T] {
        &self.nodes_t
    }

    /// Nodes as x_i = 1 - t_i.
    pub fn nodes_x(&self) -> &[T] {
        &self.nodes_x
    }

    pub fn nodes_z(&self) -> &[T] {
        self.interpolant.nodes_z()
    }

    /// Nodal values u_i.
    pub fn values(&self) -> &[T] {
        self.interpolant.values()
    }

    pub fn interpolant(&self) -> &Interpolant<T> {
        &self.interpolant
    }

    pub fn diagnostics(&self) -> &Diagnostics<T> {
        &self.diagnostics
    }

    pub fn eval(&self, t: T) -> T {
        self.interpolant.eval(t)
    }

    pub fn eval_z(&self, z: T) -> T {
        self.interpolant.eval_z(z)
    }

    pub fn eval_backward(&self, x: T) -> T {
        self.interpolant.eval_backward(x)
    }
}

/// Assembles and solves the collocation system for degree N.
pub fn solve<T: Real>(
    problem: &ProblemDefinition<T>,
    spec: BackwardSpec<T>,
    n: usize,
) -> Result<CollocationSolution<T>> {
    solve_with(
        problem,
        Discretization::new(spec, problem.theta(), n, None)?,
    )
}

pub fn solve_with<T: Real>(
    problem: &ProblemDefinition<T>,
    disc: Discretization<T>,
) -> Result<CollocationSolution<T>> {
    let start = Instant::now();
    let system = assemble_with(problem, disc)?;
    let assembly_time = start.elapsed();

    let start = Instant::now();
    let lu = Lu::factor(&system.matrix)?;
    let values = lu.solve(&system.rhs);
    let condition = condition_estimate(&system.matrix, &lu);
    let solve_time = start.elapsed();

    let residual = system
        .matrix
        .mul_vec(&values)
        .iter()
        .zip(&system.rhs)
        .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()));

    let disc = system.discretization;
    let interpolant = Interpolant::from_values(disc.spec, disc.nodes_z.clone(), values)?;
    Ok(CollocationSolution {
        spec: disc.spec,
        nodes_t: disc.nodes_t(),
        nodes_x: disc.nodes_x.clone(),
        interpolant,
        diagnostics: Diagnostics {
            condition,
            near_singular: !(condition <= T::of(NEAR_SINGULAR_CONDITION)),
            residual,
            assembly_time,
            solve_time,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta;

    fn unit_kernel(
        theta: f64,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> ProblemDefinition<f64> {
        ProblemDefinition::new(theta, |_, _| 1.0, g).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(ProblemDefinition::new(0.0, |_, _| 1.0, |_| 0.0).is_err());
        assert!(ProblemDefinition::new(1.0, |_, _| 1.0, |_| 0.0).is_err());
        assert!(ProblemDefinition::new(0.5, |x: f64, _| 1.0 / (x - 0.5), |_| 0.0).is_err());
        assert!(ProblemDefinition::new(0.5, |_, _| 1.0, |_| 0.0).is_ok());
    }

    #[test]
    fn singular_factor_limits() {
        for &(rho, theta) in &[
            (0.5, 0.5),
            (0.25, 0.5),
            (1.0 / 3.0, 2.0 / 3.0),
            (1.0 / 6.0, 2.0 / 3.0),
        ] {
            let v0 = singular_factor(rho, theta, 0.0);
            assert!((v0 - f64::powf(rho, theta)).abs() < 1e-15);
            let below = singular_factor(rho, theta, TAYLOR_SPLICE * (1.0 - 1e-12));
            let above = singular_factor(rho, theta, TAYLOR_SPLICE);
            assert!((below - above).abs() <= 1e-12 * above, "rho {rho}");
        }
        for &eta in &[0.0, 1e-8, 0.3, 0.99] {
            assert!((singular_factor(1.0_f64, 0.5, eta) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_transform_values() {
        let spec = BackwardSpec::new(0.0, 0.0, 0.5).unwrap();
        let p = unit_kernel(0.5, |_| 0.0);
        let middle = singular_factor(0.5, 0.5, 0.75);
        assert!((middle - 1.25f64.powf(-0.5)).abs() < 1e-15);
        let kb = kernel_transform(&p, spec, 0.0, 0.75).unwrap();
        assert!((kb - 2.0 * 1.25f64.powf(-0.5)).abs() < 1e-15);
        assert!(kernel_transform(&p, spec, 1.0, 0.5).is_err());
    }

    #[test]
    fn discrete_operator_values() {
        let spec = BackwardSpec::new(0.0, 0.0, 1.0).unwrap();
        let p = unit_kernel(0.5, |_| 0.0);
        assert_eq!(discrete_operator(&p, spec, 4, |_| 0.0, 2).unwrap(), 0.0);
        let rule = gauss_rule(transformed_weight(spec, 0.5).unwrap(), 5).unwrap();
        let v = discrete_operator_at(&p, spec, &rule, 1.0, |_| 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        // ∫_{1/4}^1 (ϱ - 1/4)^{-1/2} (1 - ϱ)^2 dϱ = (3/4)^{5/2} B(1/2, 3)
        let v = discrete_operator_at(&p, spec, &rule, 0.75, |y| y * y).unwrap();
        let expected = 0.75f64.powf(2.5) * beta(0.5, 3.0).unwrap();
        assert!((v - expected).abs() < 1e-14);
        assert!(discrete_operator(&p, spec, 4, |_| 1.0, 5).is_err());
    }

    #[test]
    fn zero_kernel_gives_identity() {
        let spec = BackwardSpec::new(-0.25, -0.25, 0.5).unwrap();
        let p = ProblemDefinition::new(0.5, |_, _| 0.0, |x: f64| x.sin()).unwrap();
        let sys = assemble(&p, spec, 6).unwrap();
        assert_eq!(sys.matrix, Matrix::identity(7));
        let sol = solve(&p, spec, 6).unwrap();
        for (&x, &u) in sol.nodes_x().iter().zip(sol.values()) {
            assert!((u - x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn row_sums_match_operator_on_constant() {
        let spec = BackwardSpec::new(-0.25, -0.25, 0.5).unwrap();
        let p = ProblemDefinition::new(0.5, |x: f64, y: f64| 1.0 + x * y, |_| 1.0).unwrap();
        let sys = assemble(&p, spec, 8).unwrap();
        for i in 0..9 {
            let row_sum: f64 = sys.matrix.row(i).iter().sum();
            let a_sum = 1.0 - row_sum;
            let op = discrete_operator(&p, spec, 8, |_| 1.0, i).unwrap();
            assert!((a_sum - op).abs() < 1e-13, "row {i}");
        }
    }

    #[test]
    fn manufactured_quadratic_recovered() {
        // u(t) = (1-t)², K ≡ 1, θ = 1/2: g = u - B(1/2, 3)(1-t)^{5/2}
        let theta = 0.5;
        let b = beta(1.0 - theta, 3.0).unwrap();
        let p = unit_kernel(theta, move |x| x * x - b * x.powf(3.0 - theta));
        let spec = BackwardSpec::new(0.0, 0.0, 1.0).unwrap();
        let sol = solve(&p, spec, 6).unwrap();
        for (&x, &u) in sol.nodes_x().iter().zip(sol.values()) {
            assert!((u - x * x).abs() < 1e-10);
        }
        assert!(!sol.diagnostics().near_singular);
        assert!(sol.diagnostics().residual < 1e-12);
    }

    #[test]
    fn failing_source_reports_node() {
        let p = ProblemDefinition::new(
            0.5,
            |_, _| 1.0,
            |x: f64| if x < 0.5 { f64::NAN } else { 1.0 },
        )
        .unwrap();
        let spec = BackwardSpec::new(0.0, 0.0, 1.0).unwrap();
        match assemble(&p, spec, 4) {
            Err(Error::SourceEvaluation { index, .. }) => assert!(index >= 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
