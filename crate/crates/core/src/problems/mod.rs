//! Concrete problem instances: random bilinear games, the scalar toy
//! problem, and distributionally robust logistic regression with the
//! simplex-ball ambiguity set.

pub mod dataset;
pub mod projection;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::core::{Lipschitz, NoiseStream, SaddleProblem, Vector};
use crate::error::{Error, Result};
use crate::quadratic::QuadProblem;

pub use dataset::{load_csv, parse_csv, Dataset, LabelColumn};
pub use projection::{feasibility_gap, project_pr, project_simplex, ProjectionOutcome};

/// Bilinear game generator: `K = target_norm * (M + M^T) / (2 ||sym||)`
/// with standard-normal `M`.
#[derive(Debug, Clone)]
pub struct BilinearGameSpec {
    pub dim: usize,
    pub seed: u64,
    pub mu_x: f64,
    pub mu_y: f64,
    pub target_norm: f64,
}

impl Default for BilinearGameSpec {
    fn default() -> Self {
        Self {
            dim: 30,
            seed: 0,
            mu_x: 1.0,
            mu_y: 1.0,
            target_norm: 10.0,
        }
    }
}

/// Build the quadratic instance for a bilinear game: symmetrize a
/// standard-normal matrix and rescale its spectral norm to the target.
pub fn gen_bilinear(spec: &BilinearGameSpec, delta: f64) -> Result<QuadProblem> {
    let d = spec.dim;
    let stream = NoiseStream::new(spec.seed, 0);
    let raw = stream.standard_normal(0, d * d);
    let m = DMatrix::from_fn(d, d, |i, j| raw[i * d + j]);
    let sym = (&m + m.transpose()) / 2.0;
    let spectral = sym
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(0.0, f64::max);
    let k = if spectral > 0.0 {
        sym * (spec.target_norm / spectral)
    } else {
        sym
    };
    QuadProblem::new(k, spec.mu_x, spec.mu_y, delta)
}

/// Oracle bundle for a quadratic instance: bilinear coupling plus quadratic
/// regularizers with closed-form prox `v / (1 + step mu)`. The saddle point
/// is the origin.
pub fn quadratic_saddle(quad: &QuadProblem) -> SaddleProblem {
    let d = quad.dim();
    let k1 = quad.k.clone();
    let k2 = quad.k.clone();
    let (mu_x, mu_y) = (quad.mu_x, quad.mu_y);
    let spectral = quad.kappa_max() * (mu_x * mu_y).sqrt();
    let lips = Lipschitz {
        l_xx: 0.0,
        l_xy: spectral.max(f64::MIN_POSITIVE),
        l_yx: spectral.max(f64::MIN_POSITIVE),
        l_yy: 0.0,
    };
    SaddleProblem::new(
        d,
        d,
        mu_x,
        mu_y,
        lips,
        Arc::new(move |_x: &Vector, y: &Vector| &k2 * y),
        Arc::new(move |x: &Vector, _y: &Vector| &k1 * x),
        Arc::new(move |v: &Vector, tau: f64| v / (1.0 + tau * mu_x)),
        Arc::new(move |v: &Vector, sigma: f64| v / (1.0 + sigma * mu_y)),
    )
    .expect("positive moduli")
    .with_saddle(DVector::zeros(d), DVector::zeros(d))
}

/// The scalar introduction toy `min_x max_y x^2/2 + x y + y^2/2`
/// as a quadratic instance (d = 1, unit constants).
pub fn toy_problem(delta: f64) -> (QuadProblem, SaddleProblem) {
    let quad = QuadProblem::new(DMatrix::from_element(1, 1, 1.0), 1.0, 1.0, delta)
        .expect("valid toy");
    let saddle = quadratic_saddle(&quad);
    (quad, saddle)
}

/// Distributionally robust logistic regression over the simplex-ball
/// ambiguity set.
#[derive(Debug, Clone)]
pub struct DrlrSpec {
    pub mu_x: f64,
    pub mu_y: f64,
    /// Ball radius parameter; the feasible set is
    /// `{y >= 0, 1^T y = 1, ||y - 1/n||^2 <= r/n^2}`. Defaults to `2 sqrt(n)`.
    pub radius: Option<f64>,
}

impl Default for DrlrSpec {
    fn default() -> Self {
        Self {
            mu_x: 1.0,
            mu_y: 1.0,
            radius: None,
        }
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-margin))`, overflow-safe.
fn logistic_loss(margin: f64) -> f64 {
    if margin >= 0.0 {
        (-margin).exp().ln_1p()
    } else {
        -margin + margin.exp().ln_1p()
    }
}

/// Assemble the saddle problem
/// `min_x max_{y in P_r} mu_x/2 ||x||^2 + sum_i y_i phi_i(x) - mu_y/2 ||y||^2`
/// with `phi_i(x) = log(1 + exp(-b_i a_i^T x))`.
///
/// The dual prox splits `g = mu_y/2 ||.||^2 + indicator(P_r)`; by the prox
/// calculus for a quadratic plus an indicator this is
/// `prox(v) = project_pr(v / (1 + sigma mu_y))`.
///
/// Lipschitz estimates from data norms (conservative upper bounds):
/// `L_xx = max_i ||a_i||^2 / 4` (sum of weighted logistic Hessians with
/// weights summing to one), `L_xy = L_yx = sqrt(n) max_i ||a_i||` (the
/// per-component slopes of `phi` never exceed `||a_i||`), `L_yy = 0`.
pub fn drlr_oracles(dataset: &Dataset, spec: &DrlrSpec) -> Result<SaddleProblem> {
    if dataset.n_rows == 0 {
        return Err(Error::Dataset("empty dataset".into()));
    }
    let n = dataset.n_rows;
    let d = dataset.n_features;
    let r = spec.radius.unwrap_or(2.0 * (n as f64).sqrt());
    let max_row_norm = dataset
        .features
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    let lips = Lipschitz {
        l_xx: max_row_norm * max_row_norm / 4.0,
        l_xy: (n as f64).sqrt() * max_row_norm,
        l_yx: (n as f64).sqrt() * max_row_norm,
        l_yy: 0.0,
    };

    let feats = Arc::new(dataset.features.clone());
    let labels = Arc::new(dataset.labels.clone());
    let (mu_x, mu_y) = (spec.mu_x, spec.mu_y);

    let f1 = feats.clone();
    let l1 = labels.clone();
    let grad_x = move |x: &Vector, y: &Vector| -> Vector {
        let mut g = DVector::zeros(x.len());
        for i in 0..f1.len() {
            let margin = l1[i] * f1[i].dot(x);
            let w = y[i] * l1[i] * sigmoid(-margin);
            g.axpy(-w, &f1[i], 1.0);
        }
        g
    };
    let f2 = feats.clone();
    let l2 = labels.clone();
    let grad_y = move |x: &Vector, _y: &Vector| -> Vector {
        DVector::from_iterator(
            f2.len(),
            f2.iter()
                .zip(l2.iter())
                .map(|(a, &b)| logistic_loss(b * a.dot(x))),
        )
    };
    let prox_f = move |v: &Vector, tau: f64| v / (1.0 + tau * mu_x);
    let prox_g = move |v: &Vector, sigma: f64| {
        let shrunk = v / (1.0 + sigma * mu_y);
        project_pr(&shrunk, r, shrunk.len()).point
    };

    let f3 = feats.clone();
    let l3 = labels.clone();
    let nf = n as f64;
    let batch_grad_x = move |x: &Vector, y: &Vector, idx: &[usize]| -> Vector {
        let mut g = DVector::zeros(x.len());
        let scale = nf / idx.len() as f64;
        for &i in idx {
            let margin = l3[i] * f3[i].dot(x);
            let w = y[i] * l3[i] * sigmoid(-margin);
            g.axpy(-w * scale, &f3[i], 1.0);
        }
        g
    };
    let f4 = feats;
    let l4 = labels;
    let batch_grad_y = move |x: &Vector, _y: &Vector, idx: &[usize]| -> Vector {
        let mut g = DVector::zeros(f4.len());
        let scale = nf / idx.len() as f64;
        for &i in idx {
            g[i] += scale * logistic_loss(l4[i] * f4[i].dot(x));
        }
        g
    };

    Ok(SaddleProblem::new(
        d,
        n,
        spec.mu_x,
        spec.mu_y,
        lips,
        Arc::new(grad_x),
        Arc::new(grad_y),
        Arc::new(prox_f),
        Arc::new(prox_g),
    )?
    .with_batch_oracles(Arc::new(batch_grad_x), Arc::new(batch_grad_y), n))
}
