//! Certificate report: feasibility of the momentum-parameterized candidate,
//! the full constants ledger, a table of high-probability envelopes over an
//! (n, p) grid, and the iteration count for a target accuracy.

use nalgebra::DVector;
use serde::Serialize;

use sapd::certificates::{build_ledger, complexity_n, cvar_evar_chi2_bounds, q_bound};
use sapd::params::{SapdParams, UniversalConstants};
use sapd::{Lipschitz, ProblemConstants};

use crate::config::CertifyConfig;
use crate::error::CliError;
use crate::output::OutputContext;

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    p: f64,
    q: f64,
    cvar: f64,
    evar: f64,
}

#[derive(Serialize)]
struct CertifyReport {
    params: SapdParams,
    feasible: bool,
    min_eig: f64,
    ledger: sapd::certificates::ConstantsLedger,
    bounds: Vec<BoundRow>,
    epsilon: f64,
    confidence: f64,
    complexity_iterations: usize,
    complexity_theta: f64,
}

pub fn run(config: &CertifyConfig, ctx: &OutputContext) -> Result<(), CliError> {
    let constants = ProblemConstants::new(
        config.mu_x,
        config.mu_y,
        Lipschitz {
            l_xx: config.l_xx,
            l_xy: config.l_xy,
            l_yx: config.l_yx,
            l_yy: config.l_yy,
        },
    );
    let params = SapdParams::chambolle_pock(config.theta, &constants)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let cert = params.certificate.expect("constructor certifies");
    if !cert.feasible {
        eprintln!(
            "parameters are NOT certified: min eigenvalue {:.6e}",
            cert.min_eig
        );
    }
    let x0 = DVector::from_vec(config.x0.clone());
    let y0 = DVector::from_vec(config.y0.clone());
    let xs = DVector::zeros(x0.len());
    let ys = DVector::zeros(y0.len());
    let ledger = build_ledger(
        &constants,
        &params,
        (config.nu_x, config.nu_y),
        (&x0, &y0),
        (&xs, &ys),
    )
    .map_err(|e| CliError::Numerical(e.to_string()))?;

    let mut bounds = Vec::new();
    for &n in &config.bound_iterations {
        for &p in &config.bound_levels {
            if !(0.0..1.0).contains(&p) {
                return Err(CliError::Config(format!("level {p} outside [0, 1)")));
            }
            let rb = cvar_evar_chi2_bounds(&ledger, params.rho, n, p, p / (1.0 - p));
            bounds.push(BoundRow {
                n,
                p,
                q: q_bound(&ledger, params.rho, n, p),
                cvar: rb.cvar,
                evar: rb.evar,
            });
        }
    }
    let (n_complexity, theta_star) = complexity_n(
        config.epsilon,
        config.confidence,
        &constants,
        (config.nu_x, config.nu_y),
        (&x0, &y0),
        (&xs, &ys),
        &UniversalConstants::default(),
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    let report = CertifyReport {
        params,
        feasible: cert.feasible,
        min_eig: cert.min_eig,
        ledger,
        bounds,
        epsilon: config.epsilon,
        confidence: config.confidence,
        complexity_iterations: n_complexity,
        complexity_theta: theta_star,
    };
    if config.emit.json {
        ctx.write_json("certificate.json", &report)?;
    }
    println!(
        "feasible: {} (min eig {:.3e}); mode {}; complexity: {} iterations at theta {:.6}",
        report.feasible, report.min_eig, report.ledger.mode, n_complexity, theta_star
    );
    for row in &report.bounds {
        println!(
            "  n={:6} p={:.3}: q={:.6e} cvar<={:.6e} evar<={:.6e}",
            row.n, row.p, row.q, row.cvar, row.evar
        );
    }
    Ok(())
}
