//! Exact distributional analysis on the bilinear-coupling quadratic
//! `min_x max_y mu_x/2 ||x||^2 + <K x, y> - mu_y/2 ||y||^2`
//! under additive isotropic Gaussian gradient noise.
//!
//! The stacked iterate pair `(x_{k-1}, y_k)` follows the linear recursion
//! `z_{k+1} = A z_k + B w_k`, so its covariance obeys a discrete Lyapunov
//! recursion with constant forcing `R`. An orthogonal change of basis by the
//! eigenvectors of `K` splits everything into independent 2x2 systems, one
//! per eigenvalue; under the momentum step-size parameterization these admit
//! polynomial closed forms ([`polynomials`]).

pub mod polynomials;

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};
use crate::params::SapdParams;
use polynomials::*;

/// Eigenvalues below this relative magnitude are treated as zero.
const ZERO_EIG_REL: f64 = 1e-12;
/// Required relative symmetry of the coupling matrix.
const SYMMETRY_TOL: f64 = 1e-12;

/// The quadratic saddle instance: symmetric coupling `K`, regularizers and
/// the noise scale (per-coordinate variance `delta^2 / d`).
#[derive(Debug, Clone)]
pub struct QuadProblem {
    pub k: DMatrix<f64>,
    pub mu_x: f64,
    pub mu_y: f64,
    pub delta: f64,
}

impl QuadProblem {
    pub fn new(k: DMatrix<f64>, mu_x: f64, mu_y: f64, delta: f64) -> Result<Self> {
        if !k.is_square() {
            return Err(Error::InvalidParameter("K must be square".into()));
        }
        let asym = (&k - k.transpose()).norm();
        if asym > SYMMETRY_TOL * k.norm().max(1.0) {
            return Err(Error::AsymmetricMatrix { asym });
        }
        if mu_x <= 0.0 || mu_y <= 0.0 {
            return Err(Error::InvalidParameter(
                "regularizers must be positive".into(),
            ));
        }
        if delta < 0.0 {
            return Err(Error::InvalidParameter("delta must be nonnegative".into()));
        }
        Ok(Self { k, mu_x, mu_y, delta })
    }

    pub fn dim(&self) -> usize {
        self.k.nrows()
    }

    /// Largest condition ratio `rho(K) / sqrt(mu_x mu_y)`.
    pub fn kappa_max(&self) -> f64 {
        let eig = SymmetricEigen::new(self.k.clone());
        eig.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max)
            / (self.mu_x * self.mu_y).sqrt()
    }

    /// Momentum threshold `(sqrt(1 + kappa_max^2) - 1) / kappa_max` above
    /// which the per-eigenvalue maps are stable contractions.
    pub fn theta_threshold(&self) -> f64 {
        theta_min(self.kappa_max())
    }
}

/// `(sqrt(1 + kappa^2) - 1) / |kappa|`, the stability threshold of one
/// 2x2 system; zero when the eigenvalue vanishes.
pub fn theta_min(kappa: f64) -> f64 {
    if kappa == 0.0 {
        0.0
    } else {
        let k = kappa.abs();
        ((1.0 + k * k).sqrt() - 1.0) / k
    }
}

/// One eigenvalue's 2x2 system.
#[derive(Debug, Clone)]
pub struct LambdaSystem {
    pub lambda: f64,
    pub kappa: f64,
    pub theta_min: f64,
    pub a: Matrix2<f64>,
    pub r: Matrix2<f64>,
}

/// Spectral split of the stacked-iterate recursion.
#[derive(Debug, Clone)]
pub struct QuadSpectralModel {
    pub eigenvalues: Vec<f64>,
    /// Orthogonal eigenbasis `U` of `K` (columns).
    pub basis: DMatrix<f64>,
    pub systems: Vec<LambdaSystem>,
    pub a_full: DMatrix<f64>,
    pub b_full: DMatrix<f64>,
    pub r_full: DMatrix<f64>,
    pub spectral_radius: f64,
    pub params: SapdParams,
    pub delta: f64,
    pub dim: usize,
}

fn spectral_radius_2x2(a: &Matrix2<f64>) -> f64 {
    let tr = a[(0, 0)] + a[(1, 1)];
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        ((tr + s) / 2.0).abs().max(((tr - s) / 2.0).abs())
    } else {
        det.sqrt()
    }
}

/// General-parameter 2x2 iteration matrix for eigenvalue `lambda`.
pub fn a_lambda(lambda: f64, params: &SapdParams, mu_x: f64, mu_y: f64) -> Matrix2<f64> {
    let (tau, sigma, theta) = (params.tau, params.sigma, params.theta);
    let px = 1.0 / (1.0 + tau * mu_x);
    let py = 1.0 / (1.0 + sigma * mu_y);
    Matrix2::new(
        px,
        -tau * px * lambda,
        py * (sigma * (1.0 + theta) * px - sigma * theta) * lambda,
        py * (1.0 - tau * sigma * (1.0 + theta) * px * lambda * lambda),
    )
}

/// General-parameter 2x2 noise forcing for eigenvalue `lambda`. Includes the
/// cross-covariance between the stacked iterate and the shared dual sample,
/// with the per-coordinate noise scale `delta^2 / d`.
pub fn r_lambda(
    lambda: f64,
    params: &SapdParams,
    mu_x: f64,
    mu_y: f64,
    delta: f64,
    dim: usize,
) -> Matrix2<f64> {
    let (tau, sigma, theta) = (params.tau, params.sigma, params.theta);
    let px = 1.0 / (1.0 + tau * mu_x);
    let py = 1.0 / (1.0 + sigma * mu_y);
    let scale = delta * delta / dim as f64;
    let r11 = tau * tau * px * px;
    let r12 = (tau * tau * sigma * (1.0 + theta) * px * px * py
        + tau * sigma * sigma * theta * (1.0 + theta) * py * py * px)
        * lambda;
    let r22 = sigma * sigma * (1.0 + theta) * (1.0 + theta) * py * py
        * (tau * tau * px * px + 2.0 * tau * sigma * theta * px * py)
        * lambda
        * lambda
        + sigma * sigma * py * py * (1.0 + 2.0 * theta * (1.0 + theta) * sigma * mu_y * py);
    Matrix2::new(r11, r12, r12, r22) * scale
}

/// Momentum-parameterized form of [`a_lambda`]:
/// `[[theta, -(1-theta) lambda / mu_x],
///   [(1-theta) theta^2 lambda / mu_y, theta - (1-theta)^2 (1+theta) kappa^2]]`.
pub fn a_lambda_cp(lambda: f64, theta: f64, mu_x: f64, mu_y: f64) -> Matrix2<f64> {
    let g = 1.0 - theta;
    let kappa2 = lambda * lambda / (mu_x * mu_y);
    Matrix2::new(
        theta,
        -g * lambda / mu_x,
        g * theta * theta * lambda / mu_y,
        theta - g * g * (1.0 + theta) * kappa2,
    )
}

/// Momentum-parameterized form of [`r_lambda`].
pub fn r_lambda_cp(
    lambda: f64,
    theta: f64,
    mu_x: f64,
    mu_y: f64,
    delta: f64,
    dim: usize,
) -> Matrix2<f64> {
    let g = 1.0 - theta;
    let scale = delta * delta / dim as f64 * g * g / (mu_x * mu_x * mu_y * mu_y);
    let off = (1.0 - theta * theta) * (theta * mu_x + mu_y) * lambda;
    let r22 = g * g * (1.0 + theta) * (1.0 + theta) * (1.0 + 2.0 * theta * mu_x / mu_y)
        * lambda
        * lambda
        + mu_x * mu_x * (1.0 + 2.0 * (1.0 - theta * theta) * theta);
    Matrix2::new(mu_y * mu_y, off, off, r22) * scale
}

/// Assemble the full-system and per-eigenvalue matrices for `params`.
pub fn build_system(quad: &QuadProblem, params: &SapdParams) -> Result<QuadSpectralModel> {
    let d = quad.dim();
    let (tau, sigma, theta) = (params.tau, params.sigma, params.theta);
    if tau <= 0.0 || sigma <= 0.0 {
        return Err(Error::InvalidParameter(
            "step sizes must be positive".into(),
        ));
    }
    let eig = SymmetricEigen::new(quad.k.clone());
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let basis = eig.eigenvectors;
    let scale_k = quad.k.norm();

    let mut systems = Vec::with_capacity(d);
    for &lambda in &eigenvalues {
        let lambda = if lambda.abs() < ZERO_EIG_REL * scale_k.max(1.0) {
            0.0
        } else {
            lambda
        };
        let kappa = lambda / (quad.mu_x * quad.mu_y).sqrt();
        systems.push(LambdaSystem {
            lambda,
            kappa,
            theta_min: theta_min(kappa),
            a: a_lambda(lambda, params, quad.mu_x, quad.mu_y),
            r: r_lambda(lambda, params, quad.mu_x, quad.mu_y, quad.delta, d),
        });
    }
    let spectral_radius = systems
        .iter()
        .map(|s| spectral_radius_2x2(&s.a))
        .fold(0.0, f64::max);

    let px = 1.0 / (1.0 + tau * quad.mu_x);
    let py = 1.0 / (1.0 + sigma * quad.mu_y);
    let id = DMatrix::<f64>::identity(d, d);
    let k2 = &quad.k * &quad.k;

    let mut a_full = DMatrix::zeros(2 * d, 2 * d);
    a_full.view_mut((0, 0), (d, d)).copy_from(&(&id * px));
    a_full
        .view_mut((0, d), (d, d))
        .copy_from(&(&quad.k * (-tau * px)));
    a_full
        .view_mut((d, 0), (d, d))
        .copy_from(&(&quad.k * (py * (sigma * (1.0 + theta) * px - sigma * theta))));
    a_full
        .view_mut((d, d), (d, d))
        .copy_from(&(&id * py - &k2 * (tau * sigma * (1.0 + theta) * px * py)));

    let mut b_full = DMatrix::zeros(2 * d, 3 * d);
    b_full.view_mut((0, 0), (d, d)).copy_from(&(&id * (-tau * px)));
    b_full
        .view_mut((d, 0), (d, d))
        .copy_from(&(&quad.k * (-tau * sigma * (1.0 + theta) * px * py)));
    b_full
        .view_mut((d, d), (d, d))
        .copy_from(&(&id * (-sigma * theta * py)));
    b_full
        .view_mut((d, 2 * d), (d, d))
        .copy_from(&(&id * (sigma * (1.0 + theta) * py)));

    let scale = quad.delta * quad.delta / d as f64;
    let r11 = &id * (tau * tau * px * px);
    let r12 = &quad.k
        * (tau * tau * sigma * (1.0 + theta) * px * px * py
            + tau * sigma * sigma * theta * (1.0 + theta) * py * py * px);
    let r22 = &k2
        * (sigma * sigma * (1.0 + theta) * (1.0 + theta) * py * py
            * (tau * tau * px * px + 2.0 * tau * sigma * theta * px * py))
        + &id * (sigma * sigma * py * py * (1.0 + 2.0 * theta * (1.0 + theta) * sigma * quad.mu_y * py));
    let mut r_full = DMatrix::zeros(2 * d, 2 * d);
    r_full.view_mut((0, 0), (d, d)).copy_from(&r11);
    r_full.view_mut((0, d), (d, d)).copy_from(&r12);
    r_full.view_mut((d, 0), (d, d)).copy_from(&r12.transpose());
    r_full.view_mut((d, d), (d, d)).copy_from(&r22);
    r_full *= scale;

    Ok(QuadSpectralModel {
        eigenvalues,
        basis,
        systems,
        a_full,
        b_full,
        r_full,
        spectral_radius,
        params: *params,
        delta: quad.delta,
        dim: d,
    })
}

/// Conjugate eigenpair plus the eigenvector matrix of a 2x2 system.
pub type EigenPair = (Complex<f64>, Complex<f64>, Matrix2<Complex<f64>>);

/// Closed-form conjugate eigenpair and eigenvector matrix of a 2x2
/// momentum-parameterized iteration matrix, valid above the stability
/// threshold where the discriminant is negative.
pub fn eigen_alambda(a: &Matrix2<f64>, theta: f64, kappa: f64) -> Result<EigenPair> {
    let thr = theta_min(kappa);
    if kappa == 0.0 || theta <= thr {
        return Err(Error::ThetaBelowThreshold {
            theta,
            threshold: thr,
            lambda: kappa,
        });
    }
    let g = 1.0 - theta;
    let k2 = kappa * kappa;
    let tr = 2.0 * theta - g * g * (1.0 + theta) * k2;
    let disc = g.powi(4) * (1.0 + theta) * (1.0 + theta) * k2 * k2
        - 4.0 * theta * theta * g * g * k2;
    debug_assert!(disc < 0.0);
    let im = disc.abs().sqrt() / 2.0;
    let nu1 = Complex::new(tr / 2.0, im);
    let nu2 = Complex::new(tr / 2.0, -im);
    let a12 = Complex::new(a[(0, 1)], 0.0);
    let th = Complex::new(theta, 0.0);
    let v = Matrix2::new(-a12, -a12, th - nu1, th - nu2);
    Ok((nu1, nu2, v))
}

/// Unique solution of the 2x2 stationary equation `S = A S A^T + R`, through
/// the vectorized 4x4 linear system `(I4 - A (x) A) vec(S) = vec(R)`.
pub fn lyapunov_2x2(a: &Matrix2<f64>, r: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let rho = spectral_radius_2x2(a);
    if rho >= 1.0 - 1e-12 {
        return Err(Error::NoStationarySolution { rho });
    }
    // Kronecker product A (x) A on column-stacked 2x2 matrices
    let mut m = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    m[(2 * j + i, 2 * q + p)] = a[(j, q)] * a[(i, p)];
                }
            }
        }
    }
    let lhs = Matrix4::identity() - m;
    let rhs = Vector4::new(r[(0, 0)], r[(1, 0)], r[(0, 1)], r[(1, 1)]);
    let sol = lhs
        .lu()
        .solve(&rhs)
        .ok_or(Error::NoStationarySolution { rho })?;
    let mut s = Matrix2::new(sol[0], sol[2], sol[1], sol[3]);
    // symmetrize round-off
    let off = 0.5 * (s[(0, 1)] + s[(1, 0)]);
    s[(0, 1)] = off;
    s[(1, 0)] = off;
    Ok(s)
}

/// Residual `||S - A S A^T - R||_F`.
pub fn lyapunov_residual(a: &Matrix2<f64>, r: &Matrix2<f64>, s: &Matrix2<f64>) -> f64 {
    (s - a * s * a.transpose() - r).norm()
}

/// Stationary covariance in closed form, per eigenvalue and assembled.
#[derive(Debug, Clone)]
pub struct LimitingCovariance {
    /// Covariance of `(x_n, y_n)` in the original coordinates, `2d x 2d`.
    pub sigma: DMatrix<f64>,
    /// Per-eigenvalue blocks of the `(x_n, y_n)` limit.
    pub blocks: Vec<Matrix2<f64>>,
    /// Per-eigenvalue blocks of the intermediate `(x_{n-1}, y_n)` limit.
    pub tilde_blocks: Vec<Matrix2<f64>>,
    pub eigenvalues: Vec<f64>,
    pub basis: DMatrix<f64>,
}

/// Change of variables from the `(x_{n-1}, y_n)` block to the `(x_n, y_n)`
/// block under the momentum parameterization.
pub fn t_lambda(lambda: f64, theta: f64, mu_x: f64) -> Matrix2<f64> {
    Matrix2::new(theta, -(1.0 - theta) * lambda / mu_x, 0.0, 1.0)
}

fn sigma_tilde_block_closed(quad: &QuadProblem, theta: f64, lambda: f64) -> Matrix2<f64> {
    let d = quad.dim() as f64;
    let (mu_x, mu_y, delta) = (quad.mu_x, quad.mu_y, quad.delta);
    if lambda == 0.0 {
        let pref = delta * delta / d * (1.0 - theta) / (mu_x * mu_x * mu_y * mu_y * (1.0 + theta));
        return Matrix2::new(
            pref * mu_y * mu_y,
            0.0,
            0.0,
            pref * mu_x * mu_x * (1.0 + 2.0 * (1.0 - theta * theta) * theta),
        );
    }
    let kappa = lambda / (mu_x * mu_y).sqrt();
    let pref = delta * delta * (1.0 - theta) / (d * lambda * lambda * P_C.eval(theta, kappa));
    let s11 = pref
        * (lambda * lambda / (mu_x * mu_x))
        * (P_TILDE_11_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_TILDE_11_2.eval(theta, kappa));
    let s12 = pref
        * (lambda / mu_x)
        * (P_TILDE_12_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_TILDE_12_2.eval(theta, kappa));
    let s22 = pref
        * (P_TILDE_22_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_TILDE_22_2.eval(theta, kappa));
    Matrix2::new(s11, s12, s12, s22)
}

fn sigma_block_closed(quad: &QuadProblem, theta: f64, lambda: f64) -> Matrix2<f64> {
    let d = quad.dim() as f64;
    let (mu_x, mu_y, delta) = (quad.mu_x, quad.mu_y, quad.delta);
    if lambda == 0.0 {
        let pref = delta * delta / d * (1.0 - theta) / (mu_x * mu_x * mu_y * mu_y * (1.0 + theta));
        return Matrix2::new(
            pref * theta * theta * mu_y * mu_y,
            0.0,
            0.0,
            pref * mu_x * mu_x * (1.0 + 2.0 * (1.0 - theta * theta) * theta),
        );
    }
    let kappa = lambda / (mu_x * mu_y).sqrt();
    let pref = delta * delta * (1.0 - theta) / (d * lambda * lambda * P_C.eval(theta, kappa));
    let s11 = pref
        * (lambda * lambda / (mu_x * mu_x))
        * (P_INF_11_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_INF_11_2.eval(theta, kappa));
    let s12 = pref
        * (lambda / mu_x)
        * (P_INF_12_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_INF_12_2.eval(theta, kappa));
    let s22 = pref
        * (P_INF_22_1.eval(theta, kappa)
            + lambda * lambda / (mu_y * mu_y) * P_INF_22_2.eval(theta, kappa));
    Matrix2::new(s11, s12, s12, s22)
}

/// Closed-form limiting covariance of the iterates under the momentum
/// parameterization. Requires `theta` strictly above the threshold of every
/// nonzero eigenvalue.
pub fn limiting_covariance(quad: &QuadProblem, theta: f64) -> Result<LimitingCovariance> {
    if !(0.0 < theta && theta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "theta={theta} outside (0, 1)"
        )));
    }
    let eig = SymmetricEigen::new(quad.k.clone());
    let scale_k = quad.k.norm();
    let eigenvalues: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if l.abs() < ZERO_EIG_REL * scale_k.max(1.0) {
                0.0
            } else {
                l
            }
        })
        .collect();
    for &lambda in &eigenvalues {
        let kappa = lambda / (quad.mu_x * quad.mu_y).sqrt();
        if lambda != 0.0 && theta <= theta_min(kappa) {
            return Err(Error::ThetaBelowThreshold {
                theta,
                threshold: theta_min(kappa),
                lambda,
            });
        }
    }
    let basis = eig.eigenvectors;
    let d = quad.dim();

    let blocks: Vec<Matrix2<f64>> = eigenvalues
        .iter()
        .map(|&l| sigma_block_closed(quad, theta, l))
        .collect();
    let tilde_blocks: Vec<Matrix2<f64>> = eigenvalues
        .iter()
        .map(|&l| sigma_tilde_block_closed(quad, theta, l))
        .collect();

    // sigma = [U diag(b11) U^T, U diag(b12) U^T; ., U diag(b22) U^T]
    let mut sigma = DMatrix::zeros(2 * d, 2 * d);
    let assemble = |pick: &dyn Fn(&Matrix2<f64>) -> f64| -> DMatrix<f64> {
        let diag = DVector::from_iterator(d, blocks.iter().map(pick));
        &basis * DMatrix::from_diagonal(&diag) * basis.transpose()
    };
    sigma
        .view_mut((0, 0), (d, d))
        .copy_from(&assemble(&|b| b[(0, 0)]));
    sigma
        .view_mut((0, d), (d, d))
        .copy_from(&assemble(&|b| b[(0, 1)]));
    sigma
        .view_mut((d, 0), (d, d))
        .copy_from(&assemble(&|b| b[(0, 1)]));
    sigma
        .view_mut((d, d), (d, d))
        .copy_from(&assemble(&|b| b[(1, 1)]));

    Ok(LimitingCovariance {
        sigma,
        blocks,
        tilde_blocks,
        eigenvalues,
        basis,
    })
}

/// Iterate the covariance recursion `S_{k+1} = A S_k A^T + R` for the stacked
/// pair `(x_{k-1}, y_k)`, returning `S_0..S_n` inclusive.
pub fn covariance_recursion(
    quad: &QuadProblem,
    params: &SapdParams,
    sigma0: &DMatrix<f64>,
    n: usize,
) -> Result<Vec<DMatrix<f64>>> {
    let model = build_system(quad, params)?;
    let d2 = 2 * quad.dim();
    if sigma0.nrows() != d2 || sigma0.ncols() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d2,
            got: sigma0.nrows(),
        });
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(sigma0.clone());
    let mut cur = sigma0.clone();
    for _ in 0..n {
        cur = &model.a_full * &cur * model.a_full.transpose() + &model.r_full;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Map a stacked-pair covariance to the `(x_n, y_n)` convention through the
/// one-step change of variables, blockwise in the eigenbasis-free form
/// `T = [[px I, -tau px K], [0, I]]`.
pub fn to_iterate_covariance(
    quad: &QuadProblem,
    params: &SapdParams,
    sigma_tilde: &DMatrix<f64>,
) -> DMatrix<f64> {
    let d = quad.dim();
    let px = 1.0 / (1.0 + params.tau * quad.mu_x);
    let id = DMatrix::<f64>::identity(d, d);
    let mut t = DMatrix::zeros(2 * d, 2 * d);
    t.view_mut((0, 0), (d, d)).copy_from(&(&id * px));
    t.view_mut((0, d), (d, d))
        .copy_from(&(&quad.k * (-params.tau * px)));
    t.view_mut((d, d), (d, d)).copy_from(&id);
    &t * sigma_tilde * t.transpose()
}

/// Lower and upper envelopes for the `p`-quantile of the stationary squared
/// distance `||z_inf||^2`.
///
/// The lower value is `lambda_min(Sigma) * max(0, 2d + 2 log(1/(1-p)) - 5/2)`
/// from the chi-square quantile bound; the upper witness combines the
/// stationary terms of the high-probability certificate, delegated to
/// [`crate::certificates`].
pub fn tightness_bounds(quad: &QuadProblem, theta: f64, p: f64) -> Result<(f64, f64)> {
    if !(0.0 < p && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p={p} outside (0, 1)")));
    }
    let cov = limiting_covariance(quad, theta)?;
    let eig = SymmetricEigen::new(cov.sigma.clone());
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let d = quad.dim() as f64;
    let log_term = (1.0 / (1.0 - p)).ln();
    let psi1 = min_eig.max(0.0) * (2.0 * d + 2.0 * log_term - 2.5).max(0.0);

    let psi2 = {
        use crate::certificates::build_ledger;
        use crate::core::Lipschitz;
        use crate::params::{ProblemConstants, SapdParams};
        let l = quad.kappa_max() * (quad.mu_x * quad.mu_y).sqrt();
        let constants = ProblemConstants::new(
            quad.mu_x,
            quad.mu_y,
            Lipschitz {
                l_xx: 0.0,
                l_xy: l.max(f64::MIN_POSITIVE),
                l_yx: l.max(f64::MIN_POSITIVE),
                l_yy: 0.0,
            },
        );
        let params = SapdParams::chambolle_pock(theta, &constants)?;
        let d_usize = quad.dim();
        let zeros = (DVector::zeros(d_usize), DVector::zeros(d_usize));
        let ledger = build_ledger(
            &constants,
            &params,
            (quad.delta, quad.delta),
            (&zeros.0, &zeros.1),
            (&zeros.0, &zeros.1),
        )?;
        4.0 * (1.0 - theta) / (theta * quad.mu_x.min(quad.mu_y))
            * (ledger.xi1() + ledger.xi2() + ledger.xi3() * log_term)
    };
    Ok((psi1, psi2))
}
