//! The theoretical-guarantee toolbox: the ledger of analysis constants, the
//! high-probability bound on the weighted distance, risk-measure bounds built
//! on top of it, and the iteration-count recipe.
//!
//! The high-probability statement rolls the constants `Xi^(1..3)` up from a
//! chain of Young-inequality assemblies whose fully expanded forms are
//! unwieldy; what the complexity argument actually consumes are a handful of
//! aggregates with clean envelopes. The ledger evaluates those aggregates
//! directly ("gamma-mode"):
//!
//! ```text
//! gamma_x = 2 (1-theta)/mu_x + 16 Q_x + 4 ||A_1||^2
//! gamma_y = 4 (1-theta)/mu_y + 16 Q_y + 4 ||A_2||^2 + 4 ||A_3||^2
//! Xi^(1,w) = 16 (1-theta)/mu_w + 32 Q_w
//! Xi^(2,w) = 64 Q_w / (1-theta)
//! Xi^(3,w) = 4 gamma_w / (1-theta)
//! ```
//!
//! These choices reproduce exactly the sufficient conditions the complexity
//! argument checks, at its stated numeric constants; every downstream use is
//! one-sided (upper bounds), so the assembly is conservative. Reports carry
//! a `mode: "gamma"` marker.

use nalgebra::Vector4;
use serde::Serialize;

use crate::core::Vector;
use crate::error::{Error, Result};
use crate::params::{ProblemConstants, SapdParams, UniversalConstants};

/// Every constant of the convergence analysis for one `(problem, params,
/// proxies, start)` tuple.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsLedger {
    pub mode: &'static str,
    pub a0: [f64; 4],
    pub a1: [f64; 4],
    pub a2: [f64; 4],
    pub a3: [f64; 4],
    pub b_x: f64,
    pub c_x: f64,
    pub c_x_m1: f64,
    pub b_y: f64,
    pub b_y_m1: f64,
    pub c_y: f64,
    pub c_y_m1: f64,
    pub c_y_m2: f64,
    pub q_x: f64,
    pub q_y: f64,
    pub c_sigma_theta: f64,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub xi1_x: f64,
    pub xi1_y: f64,
    pub xi2_x: f64,
    pub xi2_y: f64,
    pub xi3_x: f64,
    pub xi3_y: f64,
    /// Noise proxies `(nu_x, nu_y)` the aggregate `Xi`'s consume.
    pub proxies: (f64, f64),
    pub c_total: f64,
    pub bias: f64,
}

impl ConstantsLedger {
    pub fn xi1(&self) -> f64 {
        self.xi1_x * self.proxies.0.powi(2) + self.xi1_y * self.proxies.1.powi(2)
    }
    pub fn xi2(&self) -> f64 {
        self.xi2_x * self.proxies.0.powi(2) + self.xi2_y * self.proxies.1.powi(2)
    }
    pub fn xi3(&self) -> f64 {
        self.xi3_x * self.proxies.0.powi(2) + self.xi3_y * self.proxies.1.powi(2)
    }
}

fn norm_sq(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

struct Shared {
    px: f64,
    py: f64,
    one_minus_alpha_sigma: f64,
    c_st: f64,
    dxw: f64,
    dyw: f64,
}

fn shared(constants: &ProblemConstants, params: &SapdParams) -> Result<Shared> {
    let one_minus_alpha_sigma = 1.0 - params.alpha * params.sigma;
    if one_minus_alpha_sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "degenerate weight: 1 - alpha sigma = {one_minus_alpha_sigma}"
        )));
    }
    let px = 1.0 / (1.0 + params.tau * constants.mu_x);
    let py = 1.0 / (1.0 + params.sigma * constants.mu_y);
    let c_st = 1.0 + params.sigma * (1.0 + params.theta) * constants.lips.l_yy;
    let dxw = (2.0 * params.rho * params.tau).sqrt();
    let dyw = (2.0 * params.rho * params.sigma / one_minus_alpha_sigma).sqrt();
    Ok(Shared {
        px,
        py,
        one_minus_alpha_sigma,
        c_st,
        dxw,
        dyw,
    })
}

fn a0_vector(constants: &ProblemConstants, params: &SapdParams, s: &Shared) -> [f64; 4] {
    let (sigma, theta) = (params.sigma, params.theta);
    let l = &constants.lips;
    [
        s.py * s.dxw * sigma * (1.0 + theta) * l.l_yx,
        s.py * s.dyw * s.c_st,
        s.py * s.dxw * sigma * theta * l.l_yx,
        s.py * s.dyw * sigma * theta * l.l_yy,
    ]
}

fn a123_vectors(
    constants: &ProblemConstants,
    params: &SapdParams,
    s: &Shared,
) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let (tau, sigma, theta, rho) = (params.tau, params.sigma, params.theta, params.rho);
    let l = &constants.lips;
    let (mu_x, mu_y) = (constants.mu_x, constants.mu_y);
    let inv_px = 1.0 + tau * mu_x;
    let inv_py = 1.0 + sigma * mu_y;

    let a1_hat = Vector4::new(
        1.0 + tau * l.l_xx + tau * sigma * (1.0 + theta) * l.l_yx * l.l_xy * s.py,
        tau * l.l_xy * s.c_st * s.py,
        sigma * tau * theta * l.l_xy * l.l_yx * s.py,
        sigma * tau * theta * l.l_xy * l.l_yy * s.py,
    );
    let a2_hat = Vector4::new(
        sigma * (1.0 + theta) * l.l_yx,
        s.c_st,
        sigma * theta * l.l_yx,
        sigma * theta * l.l_yy,
    );
    let a3_hat = Vector4::new(
        s.c_st * sigma * (1.0 + theta) * inv_px * l.l_yx
            + sigma
                * (1.0 + theta)
                * l.l_yx
                * ((1.0 + tau * l.l_xx) * inv_py + tau * sigma * (1.0 + theta) * l.l_yx * l.l_xy)
            + sigma * theta * l.l_yx * inv_px * inv_py,
        inv_px * s.c_st * s.c_st
            + sigma * (1.0 + theta) * l.l_yx * tau * l.l_xy * s.c_st
            + sigma * theta * l.l_yy * inv_px * inv_py,
        sigma * (s.c_st * theta * l.l_yx * inv_px + (1.0 + theta) * tau * sigma * theta * l.l_xy * l.l_yx * l.l_yx),
        sigma * (s.c_st * theta * l.l_yy * inv_px + (1.0 + theta) * tau * sigma * theta * l.l_xy * l.l_yx * l.l_yy),
    );

    let lead = ((1.0 + rho) / rho).sqrt();
    let weights = Vector4::new(s.dxw, s.dyw, s.dxw, s.dyw);
    let scale1 = lead * 4.0 * s.px;
    let scale2 = lead * 4.0 * 2f64.sqrt() * (1.0 + theta) * s.py;
    let scale3 = lead * 4.0 * 2f64.sqrt() * theta / rho * s.py * s.py * s.px;

    let mk = |hat: Vector4<f64>, scale: f64| -> [f64; 4] {
        [
            scale * weights[0] * hat[0],
            scale * weights[1] * hat[1],
            scale * weights[2] * hat[2],
            scale * weights[3] * hat[3],
        ]
    };
    (mk(a1_hat, scale1), mk(a2_hat, scale2), mk(a3_hat, scale3))
}

/// Evaluate the full ledger from the general-parameter formulas.
pub fn build_ledger(
    constants: &ProblemConstants,
    params: &SapdParams,
    proxies: (f64, f64),
    z0: (&Vector, &Vector),
    z_star: (&Vector, &Vector),
) -> Result<ConstantsLedger> {
    let s = shared(constants, params)?;
    let (tau, sigma, theta, rho) = (params.tau, params.sigma, params.theta, params.rho);
    let l = &constants.lips;
    let (mu_x, mu_y) = (constants.mu_x, constants.mu_y);

    let a0 = a0_vector(constants, params, &s);
    let a0_sq = norm_sq(&a0);
    let (a1, a2, a3) = a123_vectors(constants, params, &s);

    // recurring pieces
    let yx_gain = (sigma * (1.0 + theta) * l.l_yx * s.py).powi(2);
    let damp = rho / (4.0 * a0_sq * (1.0 + rho));
    let cyy = s.c_st * s.py; // (1 + sigma (1+theta) L_yy) / (1 + sigma mu_y)
    let cross = cyy + tau * sigma * (1.0 + theta) * l.l_yx * l.l_xy * s.px * s.py;

    let b_x = 4.0 * tau / (1.0 + rho) + yx_gain * damp * 3.0 * tau * tau * s.px * s.px;
    let c_x = tau * s.px + tau * sigma * (1.0 + 2.0 * theta) * l.l_xy * s.px * s.py / 2.0;
    let c_x_m1 = tau * sigma * theta / (2.0 * rho) * s.py * (1.0 + theta) * l.l_yx * s.px;

    let b_y = 4.0 * (1.0 + theta).powi(2) * sigma / ((1.0 + rho) * s.one_minus_alpha_sigma)
        + 3.0 * a0_sq * (1.0 + rho) * theta * theta / rho.powi(3)
        + damp * cyy * cyy * 2.0 * (sigma * (1.0 + theta) * s.py).powi(2)
        + yx_gain * damp * 3.0 * (tau * sigma * (1.0 + theta) * l.l_xy * s.px * s.py).powi(2);
    let b_y_m1 = 4.0 * sigma * theta * theta / (rho * (1.0 + rho) * s.one_minus_alpha_sigma)
        + damp * cyy * cyy * 2.0 * (sigma * theta * s.py).powi(2) / rho
        + yx_gain * damp * 3.0 * (tau * sigma * theta * l.l_xy * s.px * s.py).powi(2) / rho;
    let c_y = sigma * (1.0 + 2.0 * theta) * (1.0 + theta) * s.py
        + tau * sigma * (1.0 + theta) * l.l_xy * s.px * s.py / 2.0;
    let c_y_m1 = sigma * theta / rho * s.py
        * (1.0 + 2.0 * theta
            + tau * s.px / 2.0 * ((1.0 + theta) * l.l_yx + l.l_xy)
            + (1.0 + 1.5 * theta) * cross);
    let c_y_m2 = sigma * theta * theta / (2.0 * rho * rho) * s.py * cross;

    let q_x = b_x + c_x + c_x_m1;
    let q_y = b_y + b_y_m1 + c_y + c_y_m1 + c_y_m2;

    let gap = 1.0 - theta;
    let gamma_x = 2.0 * gap / mu_x + 16.0 * q_x + 4.0 * norm_sq(&a1);
    let gamma_y = 4.0 * gap / mu_y + 16.0 * q_y + 4.0 * norm_sq(&a2) + 4.0 * norm_sq(&a3);

    let c_total = 4.0
        + (mu_x * norm_sq(&a1) + mu_y / 2.0 * (norm_sq(&a2) + norm_sq(&a3)))
            / (4.0 * (1.0 - rho));

    let bias = (z0.0 - z_star.0).norm_squared() / (2.0 * tau)
        + (z0.1 - z_star.1).norm_squared() / (2.0 * sigma);

    Ok(ConstantsLedger {
        mode: "gamma",
        a0,
        a1,
        a2,
        a3,
        b_x,
        c_x,
        c_x_m1,
        b_y,
        b_y_m1,
        c_y,
        c_y_m1,
        c_y_m2,
        q_x,
        q_y,
        c_sigma_theta: s.c_st,
        gamma_x,
        gamma_y,
        xi1_x: 16.0 * gap / mu_x + 32.0 * q_x,
        xi1_y: 16.0 * gap / mu_y + 32.0 * q_y,
        xi2_x: 64.0 * q_x / gap,
        xi2_y: 64.0 * q_y / gap,
        xi3_x: 4.0 * gamma_x / gap,
        xi3_y: 4.0 * gamma_y / gap,
        proxies,
        c_total,
        bias,
    })
}

/// The same aggregates from the momentum-parameterized simplifications
/// (valid when `params` came from the step-size rule with `rho = theta`
/// and `alpha = 1/(2 sigma) - sqrt(theta) L_yy`). Used to cross-check
/// [`build_ledger`].
pub fn build_ledger_cp(
    constants: &ProblemConstants,
    theta: f64,
    proxies: (f64, f64),
    z0: (&Vector, &Vector),
    z_star: (&Vector, &Vector),
) -> Result<ConstantsLedger> {
    let params = SapdParams::chambolle_pock(theta, constants)?;
    let l = &constants.lips;
    let (mu_x, mu_y) = (constants.mu_x, constants.mu_y);
    let g = 1.0 - theta;
    let oma = 0.5 + g * l.l_yy / (theta.sqrt() * mu_y); // 1 - alpha sigma
    let c_st = 1.0 + g * (1.0 + theta) * l.l_yy / (theta * mu_y);

    let a0 = {
        let lead = (g / mu_y).sqrt();
        let root2 = 2f64.sqrt();
        [
            lead * root2 * (1.0 + theta) * g * l.l_yx / (mu_x * mu_y).sqrt(),
            lead * root2 * theta / oma.sqrt() * (1.0 + (1.0 + theta) / theta * g * l.l_yy / mu_y),
            lead * root2 * theta * g * l.l_yx / (mu_x * mu_y).sqrt(),
            lead * root2 * theta / oma.sqrt() * g * l.l_yy / mu_y,
        ]
    };
    let a0_sq = norm_sq(&a0);

    let h = [
        (2.0 / mu_x).sqrt(),
        (2.0 / mu_y).sqrt() / oma.sqrt(),
        (2.0 / mu_x).sqrt(),
        (2.0 / mu_y).sqrt() / oma.sqrt(),
    ];
    let apply = |lead: f64, core: [f64; 4]| -> [f64; 4] {
        [
            lead * h[0] * core[0],
            lead * h[1] * core[1],
            lead * h[2] * core[2],
            lead * h[3] * core[3],
        ]
    };
    let a1 = apply(
        g.sqrt() * 4.0 * (theta * (1.0 + theta)).sqrt(),
        [
            1.0 + g * l.l_xx / (theta * mu_x)
                + (1.0 + theta) / theta * g * g * l.l_xy * l.l_yx / (mu_x * mu_y),
            g * l.l_xy / mu_x * c_st,
            g * g * l.l_xy * l.l_yx / (mu_x * mu_y),
            g * g * l.l_xy * l.l_yy / (mu_x * mu_y),
        ],
    );
    let a2 = apply(
        g.sqrt() * 4.0 * 2f64.sqrt() * (theta * (1.0 + theta)).sqrt() * (1.0 + theta),
        [
            (1.0 + theta) / theta * g * l.l_yx / mu_y,
            c_st,
            g * l.l_yx / mu_y,
            g * l.l_yy / mu_y,
        ],
    );
    let a3 = apply(
        g.sqrt() * (1.0 + theta).sqrt() * 4.0 * 2f64.sqrt() * theta.sqrt(),
        [
            (1.0 + (1.0 + theta) + (1.0 + theta)) * g * l.l_yx / mu_y
                + (1.0 + theta).powi(2) / theta * g * g * l.l_yx * l.l_yy / (mu_y * mu_y)
                + (1.0 + theta) / theta * g * g * l.l_xx * l.l_yx / (mu_x * mu_y)
                + (1.0 + theta).powi(2) / theta * g.powi(3) * l.l_yx.powi(2) * l.l_xy
                    / (mu_x * mu_y * mu_y),
            theta
                + (1.0 + 2.0 * (1.0 + theta)) * g * l.l_yy / mu_y
                + (1.0 + theta).powi(2) / theta * g * g * l.l_yy.powi(2) / (mu_y * mu_y)
                + g * g * (1.0 + theta) * l.l_xy * l.l_yx / (mu_x * mu_y)
                + g.powi(3) * (1.0 + theta).powi(2) / theta * l.l_yx * l.l_xy * l.l_yy
                    / (mu_x * mu_y * mu_y),
            theta * g * l.l_yx / mu_y
                + (1.0 + theta) * g * g * l.l_yx * l.l_yy / (mu_y * mu_y)
                + (1.0 + theta) * g.powi(3) * l.l_xy * l.l_yx.powi(2) / (mu_x * mu_y * mu_y),
            theta * g * l.l_yy / mu_y
                + (1.0 + theta) * g * g * l.l_yy.powi(2) / (mu_y * mu_y)
                + (1.0 + theta) * g.powi(3) * l.l_xy * l.l_yx * l.l_yy / (mu_x * mu_y * mu_y),
        ],
    );

    let c_sq = c_st * c_st;
    let b_x = g / mu_x
        * (4.0 / (theta * (1.0 + theta))
            + 3.0 * theta * (1.0 + theta) * g / (4.0 * a0_sq) * g * g * l.l_yx.powi(2)
                / (mu_x * mu_y * mu_y));
    let b_y = g / mu_y
        * (4.0 * (1.0 + theta) / (theta * oma)
            + 3.0 * a0_sq * (1.0 + theta) * mu_y / (theta * g)
            + theta.powi(3) * (1.0 + theta) * g / (2.0 * mu_y * a0_sq) * c_sq
            + 3.0 * theta * (1.0 + theta).powi(3) / (4.0 * a0_sq) * g.powi(5) / mu_y
                * l.l_yx.powi(2) * l.l_xy.powi(2) / (mu_x * mu_x * mu_y * mu_y));
    let b_y_m1 = g / mu_y
        * (4.0 / ((1.0 + theta) * oma)
            + theta.powi(4) * g / (2.0 * a0_sq * (1.0 + theta) * mu_y) * c_sq
            + g / mu_y * 3.0 * (1.0 + theta) * theta * theta / (4.0 * a0_sq) * g.powi(4)
                * l.l_yx.powi(2) * l.l_xy.powi(2) / (mu_x * mu_x * mu_y * mu_y));
    let c_x = g / mu_x * (1.0 + (1.0 + 2.0 * theta) / 2.0 * g * l.l_xy / mu_y);
    let c_x_m1 = g / mu_x * ((1.0 + theta) / 2.0 * g * l.l_yx / mu_y);
    let c_y = g / mu_y
        * ((1.0 + 2.0 * theta) * (1.0 + theta) + (1.0 + theta) / 2.0 * g * l.l_xy / mu_x);
    let cross = theta + g * (1.0 + theta) * l.l_yy / mu_y
        + g * g * (1.0 + theta) * l.l_yx * l.l_xy / (mu_x * mu_y);
    let c_y_m1 = g / mu_y
        * (1.0 + 2.0 * theta
            + (1.0 + theta) / 2.0 * g * l.l_yx / mu_x
            + 0.5 * g * l.l_xy / mu_x
            + (1.0 + 1.5 * theta) * cross);
    let c_y_m2 = g / mu_y
        * (theta / 2.0 + (1.0 + theta) / 2.0 * g * l.l_yy / mu_y
            + (1.0 + theta) / 2.0 * g * g * l.l_yx * l.l_xy / (mu_x * mu_y));

    let q_x = b_x + c_x + c_x_m1;
    let q_y = b_y + b_y_m1 + c_y + c_y_m1 + c_y_m2;
    let gamma_x = 2.0 * g / mu_x + 16.0 * q_x + 4.0 * norm_sq(&a1);
    let gamma_y = 4.0 * g / mu_y + 16.0 * q_y + 4.0 * norm_sq(&a2) + 4.0 * norm_sq(&a3);
    let c_total = 4.0
        + (mu_x * norm_sq(&a1) + mu_y / 2.0 * (norm_sq(&a2) + norm_sq(&a3))) / (4.0 * g);
    let bias = (z0.0 - z_star.0).norm_squared() / (2.0 * params.tau)
        + (z0.1 - z_star.1).norm_squared() / (2.0 * params.sigma);

    Ok(ConstantsLedger {
        mode: "gamma",
        a0,
        a1,
        a2,
        a3,
        b_x,
        c_x,
        c_x_m1,
        b_y,
        b_y_m1,
        c_y,
        c_y_m1,
        c_y_m2,
        q_x,
        q_y,
        c_sigma_theta: c_st,
        gamma_x,
        gamma_y,
        xi1_x: 16.0 * g / mu_x + 32.0 * q_x,
        xi1_y: 16.0 * g / mu_y + 32.0 * q_y,
        xi2_x: 64.0 * q_x / g,
        xi2_y: 64.0 * q_y / g,
        xi3_x: 4.0 * gamma_x / g,
        xi3_y: 4.0 * gamma_y / g,
        proxies,
        c_total,
        bias,
    })
}

/// High-probability envelope for the summed weighted distance at step `n+1`:
/// `q = ((1+rho)/2)^n (C bias + Xi1) + Xi2 + Xi3 log(1/(1-p))`.
pub fn q_bound(ledger: &ConstantsLedger, rho: f64, n: usize, p: f64) -> f64 {
    let geo = ((1.0 + rho) / 2.0).powf(n as f64);
    geo * (ledger.c_total * ledger.bias + ledger.xi1())
        + ledger.xi2()
        + ledger.xi3() * (1.0 / (1.0 - p)).ln()
}

/// Risk-measure bounds on the square-root weighted distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RiskBounds {
    pub cvar: f64,
    pub evar: f64,
    pub chi2: f64,
}

/// Bounds on `CVaR_p`, `EVaR_p` of `D_{n+1}^(1/2)` and on the chi-square
/// risk at radius `r` (through `p = 1 - 1/(1+r)`).
pub fn cvar_evar_chi2_bounds(
    ledger: &ConstantsLedger,
    rho: f64,
    n: usize,
    p: f64,
    r: f64,
) -> RiskBounds {
    let stationary_head = |pp: f64| -> f64 {
        let geo = ((1.0 + rho) / 2.0).powf(n as f64 / 2.0);
        let _ = pp;
        (geo * (ledger.c_total * ledger.bias + ledger.xi1()) + ledger.xi2()).sqrt()
    };
    let log_term = |pp: f64| (1.0 / (1.0 - pp)).ln();
    let cvar = stationary_head(p) + (ledger.xi3() * (1.0 + log_term(p))).sqrt();
    let evar =
        stationary_head(p) + ledger.xi3().sqrt() * (log_term(p).sqrt() + std::f64::consts::PI.sqrt());
    let p_chi = 1.0 - 1.0 / (1.0 + r);
    let chi2 = stationary_head(p_chi)
        + ledger.xi3().sqrt() * (log_term(p_chi).sqrt() + std::f64::consts::PI.sqrt());
    RiskBounds { cvar, evar, chi2 }
}

/// Iteration count sufficient for
/// `P[mu_x ||x_n - x*||^2 + mu_y ||y_n - y*||^2 <= eps] >= p` under the
/// selected momentum:
/// `n >= 2/(1-theta) log((32 + 6 a1 + 4 a3 (L_xy/L_yx)^2) W_0 / eps)`.
pub fn complexity_n(
    eps: f64,
    p: f64,
    constants: &ProblemConstants,
    proxies: (f64, f64),
    z0: (&Vector, &Vector),
    z_star: (&Vector, &Vector),
    universal: &UniversalConstants,
) -> Result<(usize, f64)> {
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps={eps} must be > 0")));
    }
    let theta = crate::params::select_theta(eps, p, constants, proxies, universal)?;
    let w0 = constants.mu_x * (z0.0 - z_star.0).norm_squared()
        + constants.mu_y * (z0.1 - z_star.1).norm_squared();
    let ratio2 = (constants.lips.l_xy / constants.lips.l_yx).powi(2);
    let lead = 32.0 + 6.0 * universal.a[0] + 4.0 * universal.a[2] * ratio2;
    let arg = (lead * w0 / eps).max(1.0);
    let n = (2.0 / (1.0 - theta) * arg.ln()).ceil().max(1.0);
    Ok((n as usize, theta))
}
