use fbjacobi::approximation::linf_error_backward;
use fbjacobi::problems::{oracle_kr_backward, polynomial, OracleConfig};
use fbjacobi::special::{gamma_ratio, log_gamma, mittag_leffler};
use fbjacobi::volterra::{assemble, discrete_operator_at, solve_with, transformed_weight};
use fbjacobi::{
    gauss_rule, solve, BackwardSpec, Discretization, Error, Problem, ProblemDefinition, Spec,
};

fn spec(mu: f64, up: f64, rho: f64) -> Spec {
    Spec::new(mu, up, rho).unwrap()
}

#[test]
fn exact_recovery_of_polynomial_solutions() {
    for &theta in &[0.3, 0.5, 0.7] {
        for &n in &[6usize, 10, 14] {
            let coeffs: Vec<f64> = (0..=n)
                .map(|k| 1.0 / (k as f64 + 1.0) * if k % 2 == 0 { 1.0 } else { -1.0 })
                .collect();
            let p = polynomial(theta, &coeffs).unwrap();
            let sol = solve(&p, spec(-0.25, -0.25, 1.0), n).unwrap();
            for (&x, &u) in sol.nodes_x().iter().zip(sol.values()) {
                let e = p.exact(x).unwrap();
                assert!((u - e).abs() < 1e-10, "θ={theta} N={n} x={x}: {u} vs {e}");
            }
        }
    }
}

#[test]
fn mittag_leffler_solution_for_constant_kernel() {
    // u - λ𝒦u = 1 with K ≡ λ has u(x) = E_{1-θ}(λ Γ(1-θ) x^{1-θ}).
    let (theta, lambda) = (0.5, 1.0);
    let p = Problem::new(theta, move |_, _| lambda, |_| 1.0).unwrap();
    let s = spec(-0.25, -0.25, 0.5);
    let sol = solve(&p, s, 24).unwrap();
    let g = log_gamma(1.0 - theta).unwrap().exp();
    let exact = |x: f64| mittag_leffler(1.0 - theta, lambda * g * x.powf(1.0 - theta)).unwrap();
    // frozen mpmath values of the series
    assert!((exact(1.0) / 45.999326089382855366 - 1.0).abs() < 1e-13);
    assert!((exact(0.3) / 4.6969734591302552611 - 1.0).abs() < 1e-13);
    let err = linf_error_backward(s, |x| sol.eval_backward(x), exact, 2001);
    assert!(err < 1e-11, "{err:e}");
    assert!(!sol.diagnostics().near_singular);
}

#[test]
fn degenerates_to_the_classical_equation_as_theta_vanishes() {
    // θ = 0: u - ∫_t^1 u = t² gives u = 2t - 2 + e^{1-t}.
    let p = ProblemDefinition::from_forward(1e-6, |_, _| 1.0, |t: f64| t * t).unwrap();
    let s = spec(0.0, 0.0, 1.0);
    let sol = solve(&p, s, 16).unwrap();
    let exact = |t: f64| 2.0 * t - 2.0 + (1.0 - t).exp();
    assert!((exact(0.5) - 0.64872127070012814685).abs() < 1e-15);
    for k in 0..=20 {
        let t = k as f64 / 20.0;
        assert!((sol.eval(t) - exact(t)).abs() < 1e-5, "t={t}");
    }
}

#[test]
fn quadrature_converges_to_the_exact_operator() {
    let theta = 0.4;
    let p = Problem::new(theta, |x, y| 1.0 + x * y, |_| 0.0).unwrap();
    let s = spec(-0.25, -0.25, 0.5);
    let phi = |y: f64| (3.0 * y).cos() + y.powf(0.75);
    let x = 0.8;
    let oracle =
        oracle_kr_backward(phi, theta, |x, y| 1.0 + x * y, x, &OracleConfig::default()).unwrap();
    let mut prev = f64::INFINITY;
    for m in [4usize, 8, 16, 32, 64] {
        let rule = gauss_rule(transformed_weight(s, theta).unwrap(), m).unwrap();
        let approx = discrete_operator_at(&p, s, &rule, x, phi).unwrap();
        let err = (approx - oracle).abs();
        assert!(err <= prev || err < 1e-13, "M={m}: {err:e}");
        prev = err;
    }
    assert!(prev < 1e-12, "{prev:e}");
}

#[test]
fn beta_integrals_are_exact_for_integer_inverse_rho() {
    // (1-t)^k is a polynomial in η after the transform when 1/ρ is an integer.
    let s = spec(-0.25, -0.25, 0.25);
    let theta = 2.0 / 3.0;
    let p = Problem::new(theta, |_, _| 1.0, |_| 0.0).unwrap();
    let rule = gauss_rule(transformed_weight(s, theta).unwrap(), 12).unwrap();
    for k in 0..4 {
        let kf = k as f64;
        for &x in &[1.0, 0.5, 1e-3] {
            let approx = discrete_operator_at(&p, s, &rule, x, |y| y.powi(k)).unwrap();
            let exact = gamma_ratio(kf + 1.0, kf + 2.0 - theta).unwrap()
                * log_gamma(1.0 - theta).unwrap().exp()
                * x.powf(kf + 1.0 - theta);
            assert!((approx / exact - 1.0).abs() < 1e-13, "k={k} x={x}");
        }
    }
}

#[test]
fn collocation_residual_identity() {
    let theta = 0.5;
    let p = Problem::new(theta, |x, y| (x - y).exp(), |x: f64| x.cos()).unwrap();
    let s = spec(-0.25, -0.25, 0.5);
    let disc = Discretization::new(s, theta, 12, None).unwrap();
    let rule = disc.rule().clone();
    let sol = solve_with(&p, disc).unwrap();
    for (&x, &u) in sol.nodes_x().iter().zip(sol.values()) {
        let ku = discrete_operator_at(&p, s, &rule, x, |y| sol.eval_backward(y)).unwrap();
        assert!((u - ku - p.source(x).unwrap()).abs() < 1e-13);
    }
    assert!(sol.diagnostics().residual < 1e-13);
    assert!(sol.diagnostics().condition >= 1.0);
}

#[test]
fn assembled_row_sums_match_operator_on_constants() {
    let theta = 0.6;
    let p = Problem::new(theta, |_, _| 1.0, |_| 0.0).unwrap();
    for &rho in &[1.0, 0.5, 1.0 / 6.0] {
        let sys = assemble(&p, spec(-0.25, -0.25, rho), 16).unwrap();
        for (i, &x) in sys.discretization.nodes_x().iter().enumerate() {
            let a1: f64 = 1.0 - sys.matrix.row(i).iter().sum::<f64>();
            let exact = x.powf(1.0 - theta) / (1.0 - theta);
            assert!((a1 - exact).abs() < 1e-13, "rho={rho} i={i}");
        }
    }
}

#[test]
fn single_precision_solver() {
    let p = ProblemDefinition::<f32>::new(0.5, |_, _| 1.0, |x: f32| 1.0 - 2.0 * x.sqrt()).unwrap();
    let s = BackwardSpec::<f32>::new(-0.25, -0.25, 1.0).unwrap();
    let sol = solve(&p, s, 6).unwrap();
    for &u in sol.values() {
        assert!((u - 1.0).abs() < 1e-5, "{u}");
    }
}

#[test]
fn failing_source_is_reported() {
    let p = ProblemDefinition::with_fallible_source(
        0.5,
        std::sync::Arc::new(|_: f64, _: f64| 1.0),
        std::sync::Arc::new(|x: f64| {
            if x < 0.5 {
                Err(Error::InvalidParameter("boom".into()))
            } else {
                Ok(1.0)
            }
        }),
    )
    .unwrap();
    assert!(matches!(
        solve(&p, spec(0.0, 0.0, 1.0), 8),
        Err(Error::SourceEvaluation { .. })
    ));
}

#[test]
fn underflowing_nodes_are_rejected() {
    let p = Problem::new(0.5, |_, _| 1.0, |_| 1.0).unwrap();
    // ρ = 1/200 pushes the last node below the smallest positive double.
    let err = solve(&p, spec(-0.25, -0.25, 0.005), 40).unwrap_err();
    assert!(matches!(err, Error::Domain { .. }), "{err:?}");
}
