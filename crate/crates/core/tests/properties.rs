//! Property tests: risk-measure coherence axioms, feasibility of the
//! momentum parameterization across randomized constants, monotonicity of
//! the matrix inequality in the rate, and prox contraction on the built-in
//! quadratic instances.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sapd::params::{matrix_inequality, theta_thresholds, SapdParams};
use sapd::problems::quadratic_saddle;
use sapd::quadratic::QuadProblem;
use sapd::risk::{chi2_risk, cvar_p, evar_p, var_p, SampleSet};
use sapd::{Lipschitz, ProblemConstants};

fn sample_vec() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn risk_measures_are_ordered(values in sample_vec(), p in 0.0..0.95f64) {
        let s = SampleSet::new(values).unwrap();
        let v = var_p(&s, p).unwrap();
        let c = cvar_p(&s, p).unwrap();
        let e = evar_p(&s, p).unwrap();
        prop_assert!(v <= c + 1e-9);
        prop_assert!(c <= e + 1e-9);
    }

    #[test]
    fn risk_measures_translate(values in sample_vec(), p in 0.0..0.95f64, shift in -20.0..20.0f64) {
        let s = SampleSet::new(values.clone()).unwrap();
        let t = SampleSet::new(values.iter().map(|v| v + shift).collect()).unwrap();
        prop_assert!((var_p(&t, p).unwrap() - var_p(&s, p).unwrap() - shift).abs() < 1e-9);
        prop_assert!((cvar_p(&t, p).unwrap() - cvar_p(&s, p).unwrap() - shift).abs() < 1e-9);
        prop_assert!((evar_p(&t, p).unwrap() - evar_p(&s, p).unwrap() - shift).abs() < 1e-6);
    }

    #[test]
    fn risk_measures_scale(values in sample_vec(), p in 0.0..0.95f64, a in 0.1..10.0f64) {
        let s = SampleSet::new(values.clone()).unwrap();
        let t = SampleSet::new(values.iter().map(|v| v * a).collect()).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / (1.0 + x.abs().max(y.abs()));
        prop_assert!(rel(var_p(&t, p).unwrap(), a * var_p(&s, p).unwrap()) < 1e-9);
        prop_assert!(rel(cvar_p(&t, p).unwrap(), a * cvar_p(&s, p).unwrap()) < 1e-9);
        prop_assert!(rel(evar_p(&t, p).unwrap(), a * evar_p(&s, p).unwrap()) < 1e-6);
    }

    #[test]
    fn risk_measures_monotone_in_level(values in sample_vec(), p1 in 0.0..0.9f64, dp in 0.0..0.09f64) {
        let s = SampleSet::new(values).unwrap();
        let p2 = p1 + dp;
        prop_assert!(var_p(&s, p1).unwrap() <= var_p(&s, p2).unwrap() + 1e-12);
        prop_assert!(cvar_p(&s, p1).unwrap() <= cvar_p(&s, p2).unwrap() + 1e-9);
        prop_assert!(evar_p(&s, p1).unwrap() <= evar_p(&s, p2).unwrap() + 1e-6);
    }

    #[test]
    fn chi2_risk_dominates_mean_and_translates(values in sample_vec(), r in 0.0..20.0f64, shift in -5.0..5.0f64) {
        let s = SampleSet::new(values.clone()).unwrap();
        prop_assert!(chi2_risk(&s, r).unwrap() >= s.mean() - 1e-7);
        let t = SampleSet::new(values.iter().map(|v| v + shift).collect()).unwrap();
        prop_assert!((chi2_risk(&t, r).unwrap() - chi2_risk(&s, r).unwrap() - shift).abs() < 1e-6);
    }

    #[test]
    fn momentum_rule_is_feasible_above_thresholds(
        mu_x in 0.05..20.0f64,
        mu_y in 0.05..20.0f64,
        l_yx_rel in 0.1..30.0f64,
        l_xx_rel in 0.0..5.0f64,
        l_yy_rel in 0.0..5.0f64,
        slack in 0.0..1.0f64,
    ) {
        let constants = ProblemConstants::new(mu_x, mu_y, Lipschitz {
            l_xx: l_xx_rel * mu_x,
            l_xy: l_yx_rel * (mu_x * mu_y).sqrt(),
            l_yx: l_yx_rel * (mu_x * mu_y).sqrt(),
            l_yy: l_yy_rel * mu_y,
        });
        let thr = theta_thresholds(&constants).unwrap();
        let lo = 0.5f64.max(thr.theta1).max(thr.theta2);
        let theta = (lo + slack * (1.0 - lo) * 0.999).min(1.0 - 1e-9);
        let params = SapdParams::chambolle_pock(theta, &constants).unwrap();
        prop_assert!(params.is_certified(), "infeasible at theta={} (cert {:?})", theta, params.certificate);
    }

    #[test]
    fn matrix_inequality_monotone_in_rate(
        rho1 in 0.4..0.98f64,
        drho in 0.0..0.5f64,
    ) {
        // on the bilinear toy with fixed other entries, feasibility at rho
        // implies feasibility at any larger rho < 1
        let constants = ProblemConstants::new(1.0, 1.0, Lipschitz {
            l_xx: 0.0, l_xy: 1.0, l_yx: 1.0, l_yy: 0.0,
        });
        let thr = theta_thresholds(&constants).unwrap();
        let theta = 0.5f64.max(thr.theta1).max(thr.theta2) + 0.01;
        let params = SapdParams::chambolle_pock(theta, &constants).unwrap();
        let rho2 = (rho1 + drho).min(0.999);
        let at = |rho: f64| {
            let candidate = SapdParams::new(params.tau, params.sigma, params.theta, rho, params.alpha).unwrap();
            matrix_inequality(&candidate, &constants).unwrap().0
        };
        if at(rho1) {
            prop_assert!(at(rho2), "feasible at {} but not at {}", rho1, rho2);
        }
    }

    #[test]
    fn prox_contracts_with_strong_convexity(
        mu_x in 0.1..10.0f64,
        tau in 0.01..10.0f64,
        u in -10.0..10.0f64,
        v in -10.0..10.0f64,
    ) {
        // built-in quadratic prox: ||prox(u) - prox(v)|| <= ||u - v|| / (1 + tau mu)
        let quad = QuadProblem::new(DMatrix::from_element(1, 1, 1.0), mu_x, 1.0, 0.0).unwrap();
        let problem = quadratic_saddle(&quad);
        let pu = problem.prox_f(&DVector::from_element(1, u), tau);
        let pv = problem.prox_f(&DVector::from_element(1, v), tau);
        let lhs = (pu - pv).norm();
        let rhs = (u - v).abs() / (1.0 + tau * mu_x);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn dual_gradient_lipschitz_block_bound(
        k in -5.0..5.0f64,
        x1 in -5.0..5.0f64, y1 in -5.0..5.0f64,
        x2 in -5.0..5.0f64, y2 in -5.0..5.0f64,
    ) {
        // ||grad_y(x,y) - grad_y(x',y')|| <= L_yx ||x-x'|| + L_yy ||y-y'||
        let quad = QuadProblem::new(DMatrix::from_element(1, 1, k), 1.0, 1.0, 0.0).unwrap();
        let problem = quadratic_saddle(&quad);
        let g1 = problem.grad_y(&DVector::from_element(1, x1), &DVector::from_element(1, y1));
        let g2 = problem.grad_y(&DVector::from_element(1, x2), &DVector::from_element(1, y2));
        let lhs = (g1 - g2).norm();
        let rhs = problem.lips.l_yx * (x1 - x2).abs() + problem.lips.l_yy * (y1 - y2).abs();
        prop_assert!(lhs <= rhs + 1e-12);
    }
}

#[test]
fn cvar_brute_force_small_rational_sets() {
    // exact comparison of the quantile integral against a tail average on
    // sets where p N is rational with small denominator
    let s = SampleSet::new((1..=20).map(f64::from).collect()).unwrap();
    // p = 0.65, N = 20: ceil(13) = 13; integral over (0.65, 1]:
    // u_13 * (13/20 - 0.65) + sum_{14..20} u_j / 20 = 0 + (14+...+20)/20
    let expect = ((14..=20).sum::<i32>() as f64 / 20.0) / 0.35;
    assert!((cvar_p(&s, 0.65).unwrap() - expect).abs() < 1e-12);
}
