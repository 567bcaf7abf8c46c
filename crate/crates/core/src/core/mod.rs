//! Problem model, oracles and error metrics shared by every other module.

pub mod noise;

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};

pub use noise::{sample_noise, NoiseModel, NoiseStream, OracleTag};

pub type Vector = DVector<f64>;
type GradFn = dyn Fn(&Vector, &Vector) -> Vector + Send + Sync;
type ProxFn = dyn Fn(&Vector, f64) -> Vector + Send + Sync;
type BatchGradFn = dyn Fn(&Vector, &Vector, &[usize]) -> Vector + Send + Sync;

/// Block Lipschitz constants of the coupling gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lipschitz {
    pub l_xx: f64,
    pub l_xy: f64,
    pub l_yx: f64,
    pub l_yy: f64,
}

/// A strongly convex-strongly concave saddle problem
/// `min_x max_y f(x) + phi(x, y) - g(y)`, described by its partial-gradient
/// oracles, prox maps of `f` and `g`, and the constants the certificates need.
///
/// All fields are immutable after construction; oracles are shared closures
/// so problems can be sent across ensemble workers.
#[derive(Clone)]
pub struct SaddleProblem {
    pub dim_x: usize,
    pub dim_y: usize,
    pub mu_x: f64,
    pub mu_y: f64,
    pub lips: Lipschitz,
    grad_x: Arc<GradFn>,
    grad_y: Arc<GradFn>,
    prox_f: Arc<ProxFn>,
    prox_g: Arc<ProxFn>,
    /// Known saddle point, when available, for error measurement.
    pub saddle: Option<(Vector, Vector)>,
    /// Finite-sum oracles for minibatch noise; `data_len` is the sum length.
    batch_grad_x: Option<Arc<BatchGradFn>>,
    batch_grad_y: Option<Arc<BatchGradFn>>,
    pub data_len: Option<usize>,
}

impl std::fmt::Debug for SaddleProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleProblem")
            .field("dim_x", &self.dim_x)
            .field("dim_y", &self.dim_y)
            .field("mu_x", &self.mu_x)
            .field("mu_y", &self.mu_y)
            .field("lips", &self.lips)
            .field("has_saddle", &self.saddle.is_some())
            .field("data_len", &self.data_len)
            .finish()
    }
}

impl SaddleProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim_x: usize,
        dim_y: usize,
        mu_x: f64,
        mu_y: f64,
        lips: Lipschitz,
        grad_x: Arc<GradFn>,
        grad_y: Arc<GradFn>,
        prox_f: Arc<ProxFn>,
        prox_g: Arc<ProxFn>,
    ) -> Result<Self> {
        if mu_x <= 0.0 || mu_y <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "strong convexity moduli must be positive, got mu_x={mu_x}, mu_y={mu_y}"
            )));
        }
        Ok(Self {
            dim_x,
            dim_y,
            mu_x,
            mu_y,
            lips,
            grad_x,
            grad_y,
            prox_f,
            prox_g,
            saddle: None,
            batch_grad_x: None,
            batch_grad_y: None,
            data_len: None,
        })
    }

    pub fn with_saddle(mut self, x_star: Vector, y_star: Vector) -> Self {
        self.saddle = Some((x_star, y_star));
        self
    }

    pub fn with_batch_oracles(
        mut self,
        batch_grad_x: Arc<BatchGradFn>,
        batch_grad_y: Arc<BatchGradFn>,
        data_len: usize,
    ) -> Self {
        self.batch_grad_x = Some(batch_grad_x);
        self.batch_grad_y = Some(batch_grad_y);
        self.data_len = Some(data_len);
        self
    }

    pub fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        (self.grad_x)(x, y)
    }

    pub fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        (self.grad_y)(x, y)
    }

    pub fn prox_f(&self, v: &Vector, tau: f64) -> Vector {
        (self.prox_f)(v, tau)
    }

    pub fn prox_g(&self, v: &Vector, sigma: f64) -> Vector {
        (self.prox_g)(v, sigma)
    }

    /// Noisy x-gradient under `model`, drawn from `stream` at `(iteration, GradX)`.
    pub fn noisy_grad_x(
        &self,
        x: &Vector,
        y: &Vector,
        model: &NoiseModel,
        stream: &NoiseStream,
        iteration: u64,
    ) -> Vector {
        match model {
            NoiseModel::Minibatch { batch_size } => {
                let oracle = self
                    .batch_grad_x
                    .as_ref()
                    .expect("minibatch noise requires batch oracles");
                let n = self.data_len.expect("minibatch noise requires data_len");
                let idx = stream.batch_indices(iteration, OracleTag::BatchX, *batch_size, n);
                oracle(x, y, &idx)
            }
            _ => {
                self.grad_x(x, y)
                    + sample_noise(model, self.dim_x, stream, iteration, OracleTag::GradX)
            }
        }
    }

    /// Noisy y-gradient under `model`, drawn from `stream` at `(iteration, GradY)`.
    pub fn noisy_grad_y(
        &self,
        x: &Vector,
        y: &Vector,
        model: &NoiseModel,
        stream: &NoiseStream,
        iteration: u64,
    ) -> Vector {
        match model {
            NoiseModel::Minibatch { batch_size } => {
                let oracle = self
                    .batch_grad_y
                    .as_ref()
                    .expect("minibatch noise requires batch oracles");
                let n = self.data_len.expect("minibatch noise requires data_len");
                let idx = stream.batch_indices(iteration, OracleTag::BatchY, *batch_size, n);
                oracle(x, y, &idx)
            }
            _ => {
                self.grad_y(x, y)
                    + sample_noise(model, self.dim_y, stream, iteration, OracleTag::GradY)
            }
        }
    }
}

/// How iterate error is reported: plain squared distance, or the
/// step-weighted variant the contraction analysis uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorMetric {
    /// `||x - x*||^2 + ||y - y*||^2`
    Unweighted,
    /// `1/(2 tau) ||x - x*||^2 + (1 - alpha sigma)/(2 sigma) ||y - y*||^2`
    Weighted { tau: f64, sigma: f64, alpha: f64 },
}

impl ErrorMetric {
    pub fn evaluate(&self, z: (&Vector, &Vector), z_star: (&Vector, &Vector)) -> Result<f64> {
        match self {
            ErrorMetric::Unweighted => {
                check_dims(z, z_star)?;
                Ok((z.0 - z_star.0).norm_squared() + (z.1 - z_star.1).norm_squared())
            }
            ErrorMetric::Weighted { tau, sigma, alpha } => {
                weighted_distance(z, z_star, *tau, *sigma, *alpha)
            }
        }
    }
}

fn check_dims(z: (&Vector, &Vector), z_star: (&Vector, &Vector)) -> Result<()> {
    if z.0.len() != z_star.0.len() {
        return Err(Error::DimensionMismatch {
            expected: z_star.0.len(),
            got: z.0.len(),
        });
    }
    if z.1.len() != z_star.1.len() {
        return Err(Error::DimensionMismatch {
            expected: z_star.1.len(),
            got: z.1.len(),
        });
    }
    Ok(())
}

/// Step-weighted squared distance
/// `1/(2 tau) ||x - x*||^2 + (1 - alpha sigma)/(2 sigma) ||y - y*||^2`.
///
/// Requires `alpha` in `[0, 1/sigma)` so the y-weight stays positive.
pub fn weighted_distance(
    z: (&Vector, &Vector),
    z_star: (&Vector, &Vector),
    tau: f64,
    sigma: f64,
    alpha: f64,
) -> Result<f64> {
    if tau <= 0.0 || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step sizes must be positive, got tau={tau}, sigma={sigma}"
        )));
    }
    if !(0.0..1.0 / sigma).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha={alpha} outside [0, 1/sigma) with sigma={sigma}"
        )));
    }
    check_dims(z, z_star)?;
    let dx = (z.0 - z_star.0).norm_squared();
    let dy = (z.1 - z_star.1).norm_squared();
    Ok(dx / (2.0 * tau) + (1.0 - alpha * sigma) / (2.0 * sigma) * dy)
}
