//! Weighted orthogonal projection, Gauss-type interpolation and error norms
//! in the backward basis.
//!
//! Every computation here runs in the mapped coordinate z, where the basis
//! is polynomial. Functions of t are sampled through `map_inverse`; the
//! `_backward` variants take functions of x = 1 - t instead, which keeps
//! full precision for samples that sit closer to t = 1 than machine epsilon.

use crate::basis::BackwardSpec;
use crate::error::{Error, Result};
use crate::jacobi::{gauss_rule, jacobi_norm, recurrence};
use crate::scalar::Real;

/// Below this distance in z an evaluation point is treated as a node.
pub const NODE_SNAP: f64 = 1e-15;

/// Left end of the error-sampling grid, in t.
pub const GRID_T_MIN: f64 = 1e-6;

/// Gap between the right end of the error-sampling grid and z = 1.
pub const GRID_Z_GAP: f64 = 1e-12;

/// Default number of error-sampling points.
pub const DEFAULT_SAMPLES: usize = 2001;

/// Default projection quadrature size, max(2N, N + 32).
pub fn default_quad_size(n: usize) -> usize {
    (2 * n).max(n + 32)
}

/// Truncated expansion Σ c_r P_r^{μ,υ,ρ}.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion<T> {
    spec: BackwardSpec<T>,
    coeffs: Vec<T>,
}

impl<T: Real> Expansion<T> {
    pub fn new(spec: BackwardSpec<T>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "expansion needs at least one finite coefficient".into(),
            ));
        }
        Ok(Self { spec, coeffs })
    }

    pub fn spec(&self) -> BackwardSpec<T> {
        self.spec
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Highest degree N.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: T) -> T {
        self.eval_z(self.spec.map_forward(t))
    }

    /// Clenshaw summation of the Jacobi recurrence at x = 2z - 1.
    pub fn eval_z(&self, z: T) -> T {
        let params = self.spec.params();
        let x = T::of(2.0) * z - T::one();
        let n = self.coeffs.len();
        let (mut b1, mut b2) = (T::zero(), T::zero());
        let mut c_next = T::zero();
        for k in (0..n).rev() {
            let (a, b, c) = recurrence(params, k);
            let bk = self.coeffs[k] + (a * x + b) * b1 - c_next * b2;
            b2 = b1;
            b1 = bk;
            c_next = c;
        }
        b1
    }
}

/// Coefficients of the weighted orthogonal projection onto the first N+1
/// basis functions, with inner products from a `quad_size`-point Gauss rule.
pub fn project<T: Real, F: Fn(T) -> T>(
    spec: BackwardSpec<T>,
    n: usize,
    f: F,
    quad_size: usize,
) -> Result<Expansion<T>> {
    project_z(spec, n, |z| f(spec.map_inverse(z)), quad_size)
}

/// As [`project`], for a function given in the mapped coordinate z.
pub fn project_z<T: Real, F: Fn(T) -> T>(
    spec: BackwardSpec<T>,
    n: usize,
    f: F,
    quad_size: usize,
) -> Result<Expansion<T>> {
    if quad_size < n + 1 {
        return Err(Error::InvalidParameter(format!(
            "projection of degree {n} needs at least {} quadrature points, got {quad_size}",
            n + 1
        )));
    }
    let rule = gauss_rule(spec.params(), quad_size)?;
    let samples: Vec<T> = rule.nodes().iter().map(|&z| f(z)).collect();
    let coeffs = (0..=n)
        .map(|r| {
            let inner = rule
                .iter()
                .zip(&samples)
                .fold(T::zero(), |acc, ((z, w), &fz)| {
                    acc + w * fz * spec.eval_z(r, z)
                });
            inner / jacobi_norm(spec.params(), r)
        })
        .collect();
    Expansion::new(spec, coeffs)
}

/// Barycentric weights 1/Π_{k≠j}(z_j - z_k), scaled so the largest has
/// magnitude one.
pub fn barycentric_weights<T: Real>(nodes: &[T]) -> Vec<T> {
    let logs: Vec<(T, bool)> = nodes
        .iter()
        .enumerate()
        .map(|(j, &zj)| {
            let mut log = T::zero();
            let mut negative = false;
            for (k, &zk) in nodes.iter().enumerate() {
                if k != j {
                    let d = zj - zk;
                    log -= d.abs().ln();
                    negative ^= d < T::zero();
                }
            }
            (log, negative)
        })
        .collect();
    let max = logs.iter().map(|&(l, _)| l).fold(T::neg_infinity(), T::max);
    logs.into_iter()
        .map(|(l, neg)| {
            let w = (l - max).exp();
            if neg {
                -w
            } else {
                w
            }
        })
        .collect()
}

/// Nodal interpolant at the zeros of the degree-(N+1) basis function.
///
/// The cardinal functions are Lagrange polynomials in z, evaluated in the
/// second barycentric form.
#[derive(Clone, Debug, PartialEq)]
pub struct Interpolant<T> {
    spec: BackwardSpec<T>,
    nodes_z: Vec<T>,
    values: Vec<T>,
    bary_weights: Vec<T>,
}

impl<T: Real> Interpolant<T> {
    /// Samples f (a function of t) at the N+1 collocation nodes.
    pub fn new<F: Fn(T) -> T>(spec: BackwardSpec<T>, n: usize, f: F) -> Result<Self> {
        let nodes_z = spec.nodes_z(n)?;
        let values = nodes_z.iter().map(|&z| f(spec.map_inverse(z))).collect();
        Self::from_values(spec, nodes_z, values)
    }

    /// Samples f given as a function of the backward variable x = 1 - t.
    pub fn new_backward<F: Fn(T) -> T>(spec: BackwardSpec<T>, n: usize, f: F) -> Result<Self> {
        let nodes_z = spec.nodes_z(n)?;
        let values = nodes_z.iter().map(|&z| f(spec.backward_of_z(z))).collect();
        Self::from_values(spec, nodes_z, values)
    }

    /// Builds an interpolant from nodes in z and the values there.
    pub fn from_values(spec: BackwardSpec<T>, nodes_z: Vec<T>, values: Vec<T>) -> Result<Self> {
        if nodes_z.is_empty() || nodes_z.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "interpolant needs matching non-empty node ({}) and value ({}) lists",
                nodes_z.len(),
                values.len()
            )));
        }
        if nodes_z.windows(2).any(|w| !(w[0] < w[1]))
            || nodes_z.iter().any(|&z| !(z > T::zero() && z < T::one()))
        {
            return Err(Error::InvalidParameter(
                "interpolation nodes must be strictly increasing in (0, 1)".into(),
            ));
        }
        let bary_weights = barycentric_weights(&nodes_z);
        Ok(Self {
            spec,
            nodes_z,
            values,
            bary_weights,
        })
    }

    pub fn spec(&self) -> BackwardSpec<T> {
        self.spec
    }

    pub fn nodes_z(&self) -> &[T] {
        &self.nodes_z
    }

    /// Nodes in t.
    pub fn nodes(&self) -> Vec<T> {
        self.nodes_z
            .iter()
            .map(|&z| self.spec.map_inverse(z))
            .collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn bary_weights(&self) -> &[T] {
        &self.bary_weights
    }

    /// Polynomial degree N.
    pub fn degree(&self) -> usize {
        self.nodes_z.len() - 1
    }

    fn snapped(&self, z: T) -> Option<usize> {
        if self.nodes_z.len() == 1 {
            return Some(0);
        }
        let snap = T::of(NODE_SNAP);
        self.nodes_z.iter().position(|&zj| (z - zj).abs() <= snap)
    }

    pub fn eval(&self, t: T) -> T {
        self.eval_z(self.spec.map_forward(t))
    }

    /// Evaluates at the backward variable x = 1 - t.
    pub fn eval_backward(&self, x: T) -> T {
        self.eval_z(self.spec.z_of_backward(x))
    }

    pub fn eval_z(&self, z: T) -> T {
        if let Some(j) = self.snapped(z) {
            return self.values[j];
        }
        let (mut num, mut den) = (T::zero(), T::zero());
        for ((&zj, &wj), &vj) in self
            .nodes_z
            .iter()
            .zip(&self.bary_weights)
            .zip(&self.values)
        {
            let c = wj / (z - zj);
            num += c * vj;
            den += c;
        }
        num / den
    }

    /// Writes the cardinal functions h_j(z), j = 0..=N, into `out`.
    pub fn cardinals_z(&self, z: T, out: &mut [T]) {
        assert_eq!(out.len(), self.nodes_z.len());
        if let Some(j) = self.snapped(z) {
            out.iter_mut().for_each(|h| *h = T::zero());
            out[j] = T::one();
            return;
        }
        let mut den = T::zero();
        for ((&zj, &wj), h) in self
            .nodes_z
            .iter()
            .zip(&self.bary_weights)
            .zip(out.iter_mut())
        {
            *h = wj / (z - zj);
            den += *h;
        }
        out.iter_mut().for_each(|h| *h /= den);
    }

    /// Σ_j |h_j(z)|.
    pub fn lebesgue_function_z(&self, z: T) -> T {
        let mut h = vec![T::zero(); self.nodes_z.len()];
        self.cardinals_z(z, &mut h);
        h.iter().fold(T::zero(), |acc, v| acc + v.abs())
    }
}

/// ‖f - g‖ in the weighted L² norm of κ^{μ,υ,ρ}, by a Gauss rule in z.
pub fn weighted_l2_error<T: Real, F, G>(
    spec: BackwardSpec<T>,
    f: F,
    g: G,
    quad_size: usize,
) -> Result<T>
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    weighted_l2_norm_z(
        spec,
        |z| {
            let t = spec.map_inverse(z);
            f(t) - g(t)
        },
        quad_size,
    )
}

/// As [`weighted_l2_error`] for functions of the backward variable x = 1 - t.
pub fn weighted_l2_error_backward<T: Real, F, G>(
    spec: BackwardSpec<T>,
    f: F,
    g: G,
    quad_size: usize,
) -> Result<T>
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    weighted_l2_norm_z(
        spec,
        |z| {
            let x = spec.backward_of_z(z);
            f(x) - g(x)
        },
        quad_size,
    )
}

/// Weighted L² norm of a function given in z.
pub fn weighted_l2_norm_z<T: Real, F: Fn(T) -> T>(
    spec: BackwardSpec<T>,
    f: F,
    quad_size: usize,
) -> Result<T> {
    let rule = gauss_rule(spec.params(), quad_size)?;
    Ok(rule
        .integrate(|z| {
            let v = f(z);
            v * v
        })
        .sqrt())
}

/// One point of the error-sampling grid in all three coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint<T> {
    pub t: T,
    /// Backward variable 1 - t, computed without cancellation.
    pub x: T,
    pub z: T,
}

/// Grid uniform in z over [z(10⁻⁶), 1 - 10⁻¹²], so samples cluster toward
/// t = 1 where terminal singularities live.
pub fn evaluation_grid<T: Real>(spec: BackwardSpec<T>, samples: usize) -> Vec<GridPoint<T>> {
    let z0 = spec.map_forward(T::of(GRID_T_MIN));
    let z1 = T::one() - T::of(GRID_Z_GAP);
    let last = samples.max(2) - 1;
    (0..=last)
        .map(|k| {
            let z = if k == last {
                z1
            } else {
                z0 + (z1 - z0) * T::of_usize(k) / T::of_usize(last)
            };
            GridPoint {
                t: spec.map_inverse(z),
                x: spec.backward_of_z(z),
                z,
            }
        })
        .collect()
}

/// max |f - g| over the z-uniform evaluation grid.
pub fn linf_error<T: Real, F, G>(spec: BackwardSpec<T>, f: F, g: G, samples: usize) -> T
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    evaluation_grid(spec, samples)
        .iter()
        .map(|p| (f(p.t) - g(p.t)).abs())
        .fold(T::zero(), T::max)
}

/// As [`linf_error`] for functions of the backward variable x = 1 - t.
pub fn linf_error_backward<T: Real, F, G>(spec: BackwardSpec<T>, f: F, g: G, samples: usize) -> T
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    evaluation_grid(spec, samples)
        .iter()
        .map(|p| (f(p.x) - g(p.x)).abs())
        .fold(T::zero(), T::max)
}

/// Maximum of the Lebesgue function Σ_j |h_j| over `samples` points uniform
/// in z on [0, 1]. The value does not depend on ρ, since the cardinal
/// functions are polynomials in z.
pub fn lebesgue_constant<T: Real>(spec: BackwardSpec<T>, n: usize, samples: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "Lebesgue constant needs N >= 1".into(),
        ));
    }
    let nodes_z = spec.nodes_z(n)?;
    let values = vec![T::zero(); nodes_z.len()];
    let ip = Interpolant::from_values(spec, nodes_z, values)?;
    let last = samples.max(2) - 1;
    Ok((0..=last)
        .map(|k| ip.lebesgue_function_z(T::of_usize(k) / T::of_usize(last)))
        .fold(T::zero(), T::max))
}
