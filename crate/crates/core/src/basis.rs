//! Fractional backward Jacobi functions.
//!
//! The backward mapping z = 1 - (1 - t)^ρ turns algebraic behaviour at the
//! terminal endpoint t = 1 into polynomial behaviour in z. The basis function
//! of degree r is the shifted Jacobi polynomial evaluated at 2z - 1, and all
//! weighted integrals over t reduce to classical Jacobi integrals over z.
//!
//! Near t = 1 the value of t itself stops carrying information once
//! (1 - t) drops below machine epsilon, so the mapping is also exposed in
//! terms of the backward variable x = 1 - t.

use crate::error::{Error, Result};
use crate::jacobi::{gauss_rule, jacobi_eval, JacobiParams};
use crate::scalar::Real;
use crate::special::gamma_ratio;

/// Jacobi exponents plus the mapping exponent ρ ∈ (0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardSpec<T> {
    params: JacobiParams<T>,
    rho: T,
}

impl<T: Real> BackwardSpec<T> {
    pub fn new(mu: T, upsilon: T, rho: T) -> Result<Self> {
        Self::from_params(JacobiParams::new(mu, upsilon)?, rho)
    }

    pub fn from_params(params: JacobiParams<T>, rho: T) -> Result<Self> {
        if !(rho > T::zero() && rho <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "mapping exponent rho = {rho} must lie in (0, 1]"
            )));
        }
        Ok(Self { params, rho })
    }

    #[inline]
    pub fn params(&self) -> JacobiParams<T> {
        self.params
    }

    #[inline]
    pub fn rho(&self) -> T {
        self.rho
    }

    #[inline]
    pub fn mu(&self) -> T {
        self.params.mu()
    }

    #[inline]
    pub fn upsilon(&self) -> T {
        self.params.upsilon()
    }

    /// Same mapping, Jacobi exponents raised by k.
    pub fn shifted(&self, k: usize) -> Self {
        Self {
            params: self.params.shifted(k),
            rho: self.rho,
        }
    }

    /// z = 1 - (1 - t)^ρ.
    pub fn map_forward(&self, t: T) -> T {
        -(self.rho * (-t).ln_1p()).exp_m1()
    }

    /// t = 1 - (1 - z)^{1/ρ}. Underflow of (1 - z)^{1/ρ} yields t = 1.
    pub fn map_inverse(&self, z: T) -> T {
        -((-z).ln_1p() / self.rho).exp_m1()
    }

    /// Backward variable x = 1 - t = (1 - z)^{1/ρ}, accurate near t = 1.
    pub fn backward_of_z(&self, z: T) -> T {
        ((-z).ln_1p() / self.rho).exp()
    }

    /// z = 1 - x^ρ for the backward variable x = 1 - t.
    pub fn z_of_backward(&self, x: T) -> T {
        if x <= T::zero() {
            return T::one();
        }
        -(self.rho * x.ln()).exp_m1()
    }

    /// Basis function of degree r at t.
    pub fn eval(&self, r: usize, t: T) -> T {
        self.eval_z(r, self.map_forward(t))
    }

    /// Basis function of degree r at the mapped coordinate z.
    pub fn eval_z(&self, r: usize, z: T) -> T {
        jacobi_eval(self.params, r, T::of(2.0) * z - T::one())
    }

    /// κ(t) = ρ (1-t)^{ρ(μ+1)-1} (1-(1-t)^ρ)^υ, the orthogonality weight.
    pub fn weight(&self, t: T) -> T {
        let x = T::one() - t;
        self.rho
            * x.powf(self.rho * (self.mu() + T::one()) - T::one())
            * self.map_forward(t).powf(self.upsilon())
    }

    /// κ̃(t) = ρ^{-1} (1-t)^{ρμ+1} (1-(1-t)^ρ)^{υ+1}, the weight of the
    /// derivative-side norm.
    pub fn weight_tilde(&self, t: T) -> T {
        let x = T::one() - t;
        x.powf(self.rho * self.mu() + T::one())
            * self.map_forward(t).powf(self.upsilon() + T::one())
            / self.rho
    }

    /// κ̂(t) = (1-t)^{ρμ} (1-(1-t)^ρ)^υ.
    pub fn weight_hat(&self, t: T) -> T {
        let x = T::one() - t;
        x.powf(self.rho * self.mu()) * self.map_forward(t).powf(self.upsilon())
    }

    /// Factor d̂_{r,k} in 𝓓_ρ^k P_r = d̂_{r,k} P_{r-k}^{(μ+k, υ+k)}, as the
    /// product of the k single-step factors (r-j) + (μ+j) + (υ+j) + 1.
    pub fn deriv_factor(&self, r: usize, k: usize) -> T {
        let base = self.mu() + self.upsilon() + T::one();
        (0..k).fold(T::one(), |acc, j| {
            acc * (T::of_usize(r - j) + T::of_usize(2 * j) + base)
        })
    }

    /// d̂_{r,k} as Γ(r+k+μ+υ+1)/Γ(r+μ+υ+1).
    pub fn deriv_factor_gamma(&self, r: usize, k: usize) -> Result<T> {
        let base = T::of_usize(r) + self.mu() + self.upsilon() + T::one();
        gamma_ratio(base + T::of_usize(k), base)
    }

    /// k-th transformed derivative 𝓓_ρ^k of the degree-r basis function, where
    /// 𝓓_ρ = d/dz. Requires 1 ≤ k ≤ r.
    pub fn deriv_eval(&self, r: usize, k: usize, t: T) -> Result<T> {
        self.deriv_eval_z(r, k, self.map_forward(t))
    }

    pub fn deriv_eval_z(&self, r: usize, k: usize, z: T) -> Result<T> {
        if k == 0 || k > r {
            return Err(Error::InvalidParameter(format!(
                "derivative order k = {k} must satisfy 1 <= k <= r = {r}"
            )));
        }
        Ok(self.deriv_factor(r, k) * self.shifted(k).eval_z(r - k, z))
    }

    /// Zeros of the degree-(N+1) basis function in z, strictly increasing.
    pub fn nodes_z(&self, n: usize) -> Result<Vec<T>> {
        Ok(gauss_rule(self.params, n + 1)?.nodes().to_vec())
    }

    /// Collocation nodes t_i: zeros of the degree-(N+1) basis function.
    pub fn nodes(&self, n: usize) -> Result<Vec<T>> {
        Ok(self
            .nodes_z(n)?
            .into_iter()
            .map(|z| self.map_inverse(z))
            .collect())
    }
}

/// Eigenvalue r(r + μ + υ + 1) of the singular Sturm-Liouville operator.
pub fn sturm_liouville_eigenvalue<T: Real>(params: JacobiParams<T>, r: usize) -> T {
    let rf = T::of_usize(r);
    rf * (rf + params.mu() + params.upsilon() + T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_ratio;

    fn spec(mu: f64, up: f64, rho: f64) -> BackwardSpec<f64> {
        BackwardSpec::new(mu, up, rho).unwrap()
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(BackwardSpec::new(0.0_f64, 0.0, 0.0).is_err());
        assert!(BackwardSpec::new(0.0_f64, 0.0, 1.5).is_err());
        assert!(BackwardSpec::new(0.0_f64, 0.0, 1.0).is_ok());
        assert!(BackwardSpec::new(-1.0_f64, 0.0, 0.5).is_err());
    }

    #[test]
    fn mapping_values() {
        let s = spec(0.0, 0.0, 0.5);
        assert_eq!(s.map_forward(0.0), 0.0);
        assert_eq!(s.map_forward(1.0), 1.0);
        assert!((s.map_forward(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(s.map_inverse(0.0), 0.0);
        assert!((s.map_inverse(0.5) - 0.75).abs() < 1e-15);
        let q = spec(0.0, 0.0, 0.25);
        assert!((q.map_inverse(0.9) - 0.9999).abs() < 1e-15);
        assert_eq!(q.map_inverse(1.0), 1.0);
    }

    #[test]
    fn map_inverse_underflow_gives_one() {
        let s = spec(0.0, 0.0, 1.0 / 6.0);
        assert_eq!(s.map_inverse(1.0 - 1e-12), 1.0);
        // ... while the backward variable keeps the information.
        let x = s.backward_of_z(1.0 - 1e-12);
        assert!(x > 0.0 && (x / 1e-72 - 1.0).abs() < 1e-3);
        assert!((s.z_of_backward(x) - (1.0 - 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn composition_law() {
        for &rho in &[1.0, 0.5, 0.25, 1.0 / 6.0] {
            let s = spec(0.0, 0.0, rho);
            for k in 0..=999 {
                let t = k as f64 * 1e-3;
                assert!(
                    (s.map_inverse(s.map_forward(t)) - t).abs() <= 1e-13,
                    "rho {rho} t {t}"
                );
            }
        }
    }

    #[test]
    fn basis_values() {
        let s = spec(0.3, -0.2, 0.5);
        assert_eq!(s.eval(0, 0.4), 1.0);
        let l = spec(0.0, 0.0, 1.0);
        for &t in &[0.0, 0.2, 0.9, 1.0] {
            assert!((l.eval(1, t) - (2.0 * t - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_matches_explicit_series() {
        // Explicit expansion in powers of (1 - t)^ρ, Γ-ratios only.
        let (mu, up, rho) = (0.3, -0.2, 0.5);
        let s = spec(mu, up, rho);
        let t: f64 = 0.64;
        for r in 0..7usize {
            let lead = gamma_ratio(1.0 + r as f64 + mu, 1.0 + r as f64 + mu + up).unwrap()
                / (1..=r).map(|k| k as f64).product::<f64>();
            let mut sum = 0.0;
            let mut magnitude = 0.0;
            for k in 0..=r {
                let binom: f64 = (0..k).map(|j| (r - j) as f64 / (j + 1) as f64).product();
                let g = gamma_ratio(1.0 + (r + k) as f64 + mu + up, 1.0 + k as f64 + mu).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let term = binom * g * (1.0 - t).powf(rho * k as f64);
                sum += sign * term;
                magnitude += term;
            }
            let expected = lead * sum;
            // the alternating sum cancels; bound by the absolute term sum
            let tol = 1e-14 * lead * magnitude;
            assert!(
                (s.eval(r, t) - expected).abs() < tol,
                "r = {r}: {} vs {expected}",
                s.eval(r, t)
            );
        }
    }

    #[test]
    fn endpoint_reduction_for_rho_one() {
        let s = spec(-0.25, 0.7, 1.0);
        for r in 0..12 {
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let v = jacobi_eval(s.params(), r, 2.0 * t - 1.0);
                assert!((s.eval(r, t) - v).abs() <= 1e-14 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn weights() {
        assert!((spec(0.0, 0.0, 1.0).weight(0.3) - 1.0).abs() < 1e-15);
        assert!((spec(1.0, 0.0, 0.5).weight(0.75) - 0.5).abs() < 1e-15);
        assert!((spec(-0.5, -0.5, 1.0).weight(0.5) - 2.0).abs() < 1e-14);
        assert!((spec(0.0, 0.0, 1.0).weight_tilde(0.5) - 0.25).abs() < 1e-15);
        assert!((spec(0.0, 0.0, 0.5).weight_tilde(0.75) - 0.25).abs() < 1e-15);
        let s = spec(-0.25, -0.25, 0.5);
        assert!(s.weight_tilde(1e-12) < 1e-8);
        assert!(s.weight_tilde(1.0 - 1e-12) < 1e-5);
        // κ̂ = ρ^{-1}(1-t)^{1-ρ} κ
        let t = 0.37;
        assert!((s.weight_hat(t) - (1.0 - t).powf(0.5) * s.weight(t) / 0.5).abs() < 1e-14);
    }

    #[test]
    fn derivative_factor_routes_agree() {
        for &(mu, up) in &[
            (0.0, 0.0),
            (-0.25, -0.25),
            (-0.5, -0.5),
            (0.3, -0.2),
            (2.0, 5.0),
        ] {
            let s = spec(mu, up, 0.5);
            for r in 1..40 {
                for k in 1..=r.min(8) {
                    let a = s.deriv_factor(r, k);
                    let b = s.deriv_factor_gamma(r, k).unwrap();
                    assert!((a - b).abs() <= 1e-12 * a.abs(), "r={r} k={k}");
                }
            }
        }
        assert_eq!(spec(0.0, 0.0, 0.5).deriv_factor(3, 2), 20.0);
    }

    #[test]
    fn derivative_values() {
        let s = spec(0.0, 0.0, 1.0);
        for &t in &[0.1, 0.5, 0.9] {
            assert!((s.deriv_eval(1, 1, t).unwrap() - 2.0).abs() < 1e-15);
        }
        let q = spec(-0.25, -0.25, 0.5);
        let c = q.deriv_eval(4, 4, 0.1).unwrap();
        assert!((q.deriv_eval(4, 4, 0.8).unwrap() - c).abs() < 1e-12 * c.abs());
        assert!(q.deriv_eval(3, 0, 0.5).is_err());
        assert!(q.deriv_eval(3, 4, 0.5).is_err());
    }

    #[test]
    fn derivative_matches_z_finite_difference() {
        let s = spec(-0.25, -0.25, 0.5);
        let t = 0.3;
        let z = s.map_forward(t);
        let h = 1e-6;
        let fd = (s.eval(4, s.map_inverse(z + h)) - s.eval(4, s.map_inverse(z - h))) / (2.0 * h);
        assert!((s.deriv_eval(4, 1, t).unwrap() - fd).abs() < 1e-7);
    }

    #[test]
    fn nodes() {
        assert!((spec(0.0, 0.0, 1.0).nodes(0).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((spec(0.0, 0.0, 0.5).nodes(0).unwrap()[0] - 0.75).abs() < 1e-15);
        let s = spec(-0.25, -0.25, 0.5);
        let nodes = s.nodes(8).unwrap();
        assert_eq!(nodes.len(), 9);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        for &t in &nodes {
            assert!(t > 0.0 && t < 1.0);
            assert!(s.eval(9, t).abs() < 1e-10);
        }
    }
}
