//! On quadratic instances the engine must agree with the straight-line
//! stacked recursion `z_{k+1} = A z_k + B w_k` driven by the same noise
//! stream. This pins the sample-sharing subtlety of the iteration: the dual
//! gradient sample at index k is used both by the momentum difference of
//! step k-1 and the average of step k.

use nalgebra::{DMatrix, DVector};
use sapd::core::{sample_noise, NoiseModel, NoiseStream, OracleTag};
use sapd::engine::{run, RunOptions};
use sapd::params::{cp_params, SapdParams};
use sapd::problems::quadratic_saddle;
use sapd::quadratic::{build_system, QuadProblem};

fn engine_vs_recursion(quad: &QuadProblem, params: &SapdParams, n: usize, seed: u64) {
    let d = quad.dim();
    let problem = quadratic_saddle(quad);
    let noise = NoiseModel::IsotropicGaussian { delta: quad.delta };
    let traj = run(
        &problem,
        params,
        n,
        (DVector::from_element(d, 3.0), DVector::from_element(d, -2.0)),
        &noise,
        seed,
        0,
        RunOptions {
            store_iterates: true,
            thin: 1,
        },
    );
    assert!(traj.failed_at.is_none());
    assert_eq!(traj.iterates.len(), n + 1);

    let model = build_system(quad, params).unwrap();
    let stream = NoiseStream::new(seed, 0);
    let eps_x = |k: u64| sample_noise(&noise, d, &stream, k, OracleTag::GradX);
    let eps_y = |k: u64| sample_noise(&noise, d, &stream, k, OracleTag::GradY);

    // z_1 = (x_0, y_1) computed from the first prox step directly
    let (x0, y0) = (&traj.iterates[0].0, &traj.iterates[0].1);
    let s0 = &quad.k * x0 + eps_y(0);
    let y1 = (y0 + &s0 * params.sigma) / (1.0 + params.sigma * quad.mu_y);
    let mut z = DVector::zeros(2 * d);
    z.rows_mut(0, d).copy_from(x0);
    z.rows_mut(d, d).copy_from(&y1);

    for k in 1..=n {
        // compare (x_{k-1}, y_k) against the engine
        let (ex, ey) = (&traj.iterates[k - 1].0, &traj.iterates[k].1);
        let scale = z.norm().max(1.0);
        let mut diff = 0.0f64;
        for i in 0..d {
            diff = diff.max((z[i] - ex[i]).abs()).max((z[d + i] - ey[i]).abs());
        }
        assert!(
            diff <= 1e-12 * scale,
            "recursion deviates at step {k}: {diff:.3e}"
        );
        if k == n {
            break;
        }
        let mut w = DVector::zeros(3 * d);
        w.rows_mut(0, d).copy_from(&eps_x(k as u64 - 1));
        w.rows_mut(d, d).copy_from(&eps_y(k as u64 - 1));
        w.rows_mut(2 * d, d).copy_from(&eps_y(k as u64));
        z = &model.a_full * &z + &model.b_full * &w;
    }
}

#[test]
fn scalar_instance_matches_over_thousand_steps() {
    let quad = QuadProblem::new(DMatrix::from_element(1, 1, 1.0), 1.0, 1.0, 0.3).unwrap();
    let (tau, sigma) = cp_params(0.95, 1.0, 1.0).unwrap();
    let params = SapdParams::new(tau, sigma, 0.95, 0.95, 0.5 / sigma).unwrap();
    engine_vs_recursion(&quad, &params, 1000, 11);
}

#[test]
fn matrix_instance_matches() {
    let k = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 0.5, -0.1, 0.0, -0.1, 2.0]);
    let quad = QuadProblem::new(k, 1.3, 0.7, 0.8).unwrap();
    let (tau, sigma) = cp_params(0.93, 1.3, 0.7).unwrap();
    let params = SapdParams::new(tau, sigma, 0.93, 0.93, 0.5 / sigma).unwrap();
    engine_vs_recursion(&quad, &params, 400, 99);
}

#[test]
fn general_non_cp_steps_also_match() {
    // the recursion is valid for any step sizes, not just the momentum rule
    let quad = QuadProblem::new(DMatrix::from_element(1, 1, 0.8), 2.0, 1.0, 0.5).unwrap();
    let params = SapdParams::new(0.05, 0.08, 0.9, 0.95, 1.0).unwrap();
    engine_vs_recursion(&quad, &params, 600, 5);
}

#[test]
fn noiseless_linear_contraction_of_weighted_distance() {
    // with certified parameters and a deterministic oracle the weighted
    // distance contracts by rho each step
    let quad = QuadProblem::new(DMatrix::from_element(1, 1, 1.0), 1.0, 1.0, 0.0).unwrap();
    let problem = quadratic_saddle(&quad);
    let constants = sapd::ProblemConstants::new(1.0, 1.0, problem.lips);
    let params = SapdParams::chambolle_pock(0.95, &constants).unwrap();
    assert!(params.is_certified());
    let traj = run(
        &problem,
        &params,
        500,
        (DVector::from_element(1, 10.0), DVector::from_element(1, 10.0)),
        &NoiseModel::None,
        0,
        0,
        RunOptions::default(),
    );
    for w in traj.d.windows(2) {
        assert!(
            w[1] <= params.rho * w[0] * (1.0 + 1e-10) + 1e-300,
            "no contraction: {} -> {}",
            w[0],
            w[1]
        );
    }
}
