//! Classical Jacobi polynomials on [-1, 1] and their shifted Gauss rules on
//! [0, 1].
//!
//! Parameter convention: `mu` is the exponent of the `(1 - z)` factor and
//! `upsilon` the exponent of the `z` factor of the weight on [0, 1], which
//! corresponds to the classical pair (α, β) = (mu, upsilon) on [-1, 1] under
//! x = 2z - 1.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{log_beta, log_gamma_unchecked};

/// Exponent pair of the Jacobi weight `(1 - z)^mu z^upsilon` on [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams<T> {
    mu: T,
    upsilon: T,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(mu: T, upsilon: T) -> Result<Self> {
        if !(mu > -T::one()) || !(upsilon > -T::one()) || !mu.is_finite() || !upsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents ({mu}, {upsilon}) must both exceed -1"
            )));
        }
        Ok(Self { mu, upsilon })
    }

    #[inline]
    pub fn mu(&self) -> T {
        self.mu
    }

    #[inline]
    pub fn upsilon(&self) -> T {
        self.upsilon
    }

    /// The pair (mu + k, upsilon + k) carried by k-th derivatives.
    pub fn shifted(&self, k: usize) -> Self {
        let k = T::of_usize(k);
        Self {
            mu: self.mu + k,
            upsilon: self.upsilon + k,
        }
    }

    /// Total mass B(mu + 1, upsilon + 1) of the weight on [0, 1].
    pub fn mass(&self) -> T {
        jacobi_norm(*self, 0)
    }
}

/// Coefficients (a, b, c) of P_{n+1}(x) = (a x + b) P_n(x) - c P_{n-1}(x).
#[inline]
pub(crate) fn recurrence<T: Real>(params: JacobiParams<T>, n: usize) -> (T, T, T) {
    let (al, be) = (params.mu, params.upsilon);
    let two = T::of(2.0);
    if n == 0 {
        return ((al + be + two) / two, (al - be) / two, T::zero());
    }
    let nf = T::of_usize(n);
    let s = two * nf + al + be;
    let denom = two * (nf + T::one()) * (nf + al + be + T::one()) * s;
    let a = (s + T::one()) * (s + two) * s / denom;
    let b = (s + T::one()) * (al * al - be * be) / denom;
    let c = two * (nf + al) * (nf + be) * (s + two) / denom;
    (a, b, c)
}

/// Classical Jacobi polynomial P_r^{(mu, upsilon)}(x) on [-1, 1] by forward
/// three-term recurrence.
pub fn jacobi_eval<T: Real>(params: JacobiParams<T>, r: usize, x: T) -> T {
    let mut prev = T::zero();
    let mut cur = T::one();
    for n in 0..r {
        let (a, b, c) = recurrence(params, n);
        let next = (a * x + b) * cur - c * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Value and x-derivative of P_r^{(mu, upsilon)} at x.
pub fn jacobi_eval_with_derivative<T: Real>(params: JacobiParams<T>, r: usize, x: T) -> (T, T) {
    let value = jacobi_eval(params, r, x);
    if r == 0 {
        return (value, T::zero());
    }
    let scale = (T::of_usize(r) + params.mu + params.upsilon + T::one()) / T::of(2.0);
    (value, scale * jacobi_eval(params.shifted(1), r - 1, x))
}

/// ln of the squared norm of the shifted polynomial P_r(2z - 1) under the
/// weight `(1 - z)^mu z^upsilon` on [0, 1].
pub fn log_jacobi_norm<T: Real>(params: JacobiParams<T>, r: usize) -> T {
    let (mu, up) = (params.mu, params.upsilon);
    let one = T::one();
    if r == 0 {
        // μ + υ + 1 may vanish (Chebyshev); the general form is then 0·∞.
        return log_beta(mu + one, up + one).expect("params validated");
    }
    let rf = T::of_usize(r);
    log_gamma_unchecked(rf + mu + one) + log_gamma_unchecked(rf + up + one)
        - log_gamma_unchecked(rf + one)
        - (T::of(2.0) * rf + mu + up + one).ln()
        - log_gamma_unchecked(rf + mu + up + one)
}

/// Squared weighted norm of the shifted Jacobi polynomial of degree r on [0, 1].
pub fn jacobi_norm<T: Real>(params: JacobiParams<T>, r: usize) -> T {
    log_jacobi_norm(params, r).exp()
}

/// Gauss rule on [0, 1] for the weight `(1 - z)^mu z^upsilon`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<T> {
    params: JacobiParams<T>,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn params(&self) -> JacobiParams<T> {
        self.params
    }

    /// Nodes in (0, 1), strictly increasing.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i f(z_i), approximating ∫₀¹ (1-z)^mu z^upsilon f(z) dz.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&z, &w)| acc + w * f(z))
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

const NEWTON_MAX_ITER: usize = 100;

/// M-point Gauss-Jacobi rule on [0, 1].
///
/// Initial node estimates are the eigenvalues of the symmetric Jacobi matrix
/// (Golub-Welsch); each is then polished by Newton's method on the
/// three-term recurrence. Weights are the Christoffel numbers up to a common
/// factor, fixed by the exact total mass.
pub fn gauss_rule<T: Real>(params: JacobiParams<T>, m: usize) -> Result<QuadratureRule<T>> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "a Gauss rule needs at least one node".into(),
        ));
    }
    let guesses = golub_welsch_nodes(params, m)?;
    let tol = T::of(1e-14).max(T::of(8.0) * T::epsilon());
    let one = T::one();

    let mut xs = Vec::with_capacity(m);
    for (index, &x0) in guesses.iter().enumerate() {
        let mut x = x0;
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = jacobi_eval_with_derivative(params, m, x);
            if dp == T::zero() || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= tol * (one + x.abs()) {
                converged = true;
                break;
            }
        }
        if !converged || !(x > -one && x < one) {
            return Err(Error::NoConvergence { index, size: m });
        }
        xs.push(x);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::NoConvergence { index: 0, size: m });
    }

    // w_k ∝ 1 / (z_k (1 - z_k) P'_m(x_k)²), scaled to the exact mass. The
    // scale is common to all nodes, so fixing it by Σ w_k = B(μ+1, υ+1)
    // avoids large-argument log-gamma differences.
    let half = T::of(0.5);
    let mut nodes = Vec::with_capacity(m);
    let mut log_w = Vec::with_capacity(m);
    for &x in &xs {
        let z = half * (one + x);
        let zc = half * (one - x);
        let (_, dp) = jacobi_eval_with_derivative(params, m, x);
        nodes.push(z);
        log_w.push(-(z * zc).ln() - T::of(2.0) * dp.abs().ln());
    }
    let shift = log_w.iter().copied().fold(T::neg_infinity(), T::max);
    let mut weights: Vec<T> = log_w.iter().map(|&l| (l - shift).exp()).collect();
    let total = weights.iter().fold(T::zero(), |acc, &w| acc + w);
    let scale = params.mass() / total;
    weights.iter_mut().for_each(|w| *w *= scale);
    Ok(QuadratureRule {
        params,
        nodes,
        weights,
    })
}

/// Eigenvalues of the Jacobi matrix of the monic recurrence, on [-1, 1].
fn golub_welsch_nodes<T: Real>(params: JacobiParams<T>, m: usize) -> Result<Vec<T>> {
    let (al, be) = (params.mu, params.upsilon);
    let two = T::of(2.0);
    let one = T::one();
    let mut diag = Vec::with_capacity(m);
    let mut off = vec![T::zero(); m];
    for n in 0..m {
        let nf = T::of_usize(n);
        let s = two * nf + al + be;
        diag.push(if n == 0 {
            (be - al) / (al + be + two)
        } else {
            (be * be - al * al) / (s * (s + two))
        });
    }
    for n in 1..m {
        let nf = T::of_usize(n);
        let s = two * nf + al + be;
        let b2 = if n == 1 {
            // (1 + α + β) cancels; keeps α + β = -1 well defined.
            T::of(4.0) * (one + al) * (one + be)
                / ((two + al + be).powi(2) * (T::of(3.0) + al + be))
        } else {
            T::of(4.0) * nf * (nf + al) * (nf + be) * (nf + al + be)
                / (s * s * (s + one) * (s - one))
        };
        off[n - 1] = b2.sqrt();
    }
    tridiagonal_eigenvalues(&mut diag, &mut off, m)?;
    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(diag)
}

/// Implicit QL with Wilkinson shifts; eigenvalues overwrite `d`.
fn tridiagonal_eigenvalues<T: Real>(d: &mut [T], e: &mut [T], m: usize) -> Result<()> {
    let two = T::of(2.0);
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut k = l;
            while k + 1 < m {
                let dd = d[k].abs() + d[k + 1].abs();
                if e[k].abs() <= T::epsilon() * dd {
                    break;
                }
                k += 1;
            }
            if k == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { index: l, size: m });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[k] - d[l] + e[l] / (g + if g >= T::zero() { r } else { -r });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = k;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[k] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[k] = T::zero();
        }
    }
    Ok(())
}
