//! Monte Carlo checks of the light-tail inequalities the certificates rely
//! on: the squared norm of a centered norm-subGaussian vector with proxy s
//! satisfies `E[exp(l ||X||^2)] <= exp(8 l s^2)` for `l in [0, 1/(4 s^2)]`,
//! and inner products satisfy `E[exp(l <u, X>)] <= exp(8 l^2 ||u||^2 s^2)`.
//! The isotropic Gaussian model with total variance delta^2 advertises the
//! proxy s = delta.

use nalgebra::DVector;
use sapd::core::{NoiseStream, OracleTag};

const DRAWS: usize = 100_000;

/// mean and standard error of `f(X)` over the draws
fn monte_carlo(
    dim: usize,
    delta: f64,
    seed: u64,
    f: impl Fn(&DVector<f64>) -> f64,
) -> (f64, f64) {
    let stream = NoiseStream::new(seed, 0);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for i in 0..DRAWS {
        let x = stream.gaussian(i as u64, OracleTag::GradY, dim, delta);
        let v = f(&x);
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / DRAWS as f64;
    let var = (sumsq / DRAWS as f64 - mean * mean).max(0.0);
    (mean, (var / DRAWS as f64).sqrt())
}

#[test]
fn squared_norm_mgf_bound() {
    for &dim in &[1usize, 4] {
        for &delta in &[0.5f64, 1.0] {
            let s2 = delta * delta;
            for &frac in &[1.0, 0.5, 0.25] {
                let lambda = frac / (4.0 * s2);
                let (mean, se) =
                    monte_carlo(dim, delta, 7 + dim as u64, |x| (lambda * x.norm_squared()).exp());
                let bound = (8.0 * lambda * s2).exp();
                assert!(
                    mean <= bound * (1.0 + 3.0 * se / mean.max(1e-300)),
                    "dim={dim} delta={delta} frac={frac}: {mean} > {bound} (se {se})"
                );
            }
        }
    }
}

#[test]
fn inner_product_mgf_bound() {
    let dim = 3;
    let delta = 1.0f64;
    let u = DVector::from_vec(vec![0.6, -0.3, 1.1]);
    let u2 = u.norm_squared();
    for &lambda in &[0.1f64, 0.5, 1.0, 2.0] {
        let (mean, se) = monte_carlo(dim, delta, 41, |x| (lambda * u.dot(x)).exp());
        let bound = (8.0 * lambda * lambda * u2 * delta * delta).exp();
        assert!(
            mean <= bound * (1.0 + 3.0 * se / mean.max(1e-300)),
            "lambda={lambda}: {mean} > {bound} (se {se})"
        );
    }
}

#[test]
fn squared_norm_tail_is_subgaussian_at_the_proxy() {
    // P[||X|| >= t] <= 2 exp(-t^2 / (2 delta^2)) spot-checked at a few t
    let dim = 2;
    let delta = 1.0f64;
    let stream = NoiseStream::new(99, 0);
    let thresholds = [1.0f64, 1.5, 2.0];
    let mut counts = [0usize; 3];
    for i in 0..DRAWS {
        let norm = stream
            .gaussian(i as u64, OracleTag::GradX, dim, delta)
            .norm();
        for (j, &t) in thresholds.iter().enumerate() {
            if norm >= t {
                counts[j] += 1;
            }
        }
    }
    for (j, &t) in thresholds.iter().enumerate() {
        let phat = counts[j] as f64 / DRAWS as f64;
        let se = (phat * (1.0 - phat) / DRAWS as f64).sqrt();
        let bound = 2.0 * (-t * t / (2.0 * delta * delta)).exp();
        assert!(
            phat <= bound + 3.0 * se,
            "tail at t={t}: {phat} > {bound}"
        );
    }
}
