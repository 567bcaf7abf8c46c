//! Stationary covariance analysis on scalar quadratic instances: analytic
//! limit, covariance snapshots as level-set polylines, spectral radius and
//! the decay-rate fit.

use nalgebra::{DMatrix, Matrix2};
use serde::Serialize;

use sapd::params::{cp_params, SapdParams};
use sapd::quadratic::{
    build_system, covariance_recursion, limiting_covariance, to_iterate_covariance, QuadProblem,
};

use crate::config::QuadcovConfig;
use crate::error::CliError;
use crate::output::{ellipse_polyline, OutputContext};

#[derive(Serialize)]
struct ProblemReport {
    constants: (f64, f64, f64, f64),
    theta: f64,
    theta_threshold: f64,
    sigma_infinity: Vec<Vec<f64>>,
    per_lambda_blocks: Vec<Vec<f64>>,
    spectral_radius: f64,
    rate_fit_slope: f64,
    rate_expected: f64,
    lyapunov_residual: f64,
}

pub fn run(config: &QuadcovConfig, ctx: &OutputContext) -> Result<(), CliError> {
    if config.problems.is_empty() {
        return Err(CliError::Config("no problem instances".into()));
    }
    let mut reports = Vec::new();
    for (idx, &(c, mu_x, mu_y, delta)) in config.problems.iter().enumerate() {
        let quad = QuadProblem::new(DMatrix::from_element(1, 1, c), mu_x, mu_y, delta)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let threshold = quad.theta_threshold();
        if config.theta <= threshold {
            return Err(CliError::Config(format!(
                "theta {} at or below the stability threshold {threshold:.6} of instance {idx}",
                config.theta
            )));
        }
        let (tau, sigma) = cp_params(config.theta, mu_x, mu_y)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let params = SapdParams::new(tau, sigma, config.theta, config.theta, 0.5 / sigma)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let model = build_system(&quad, &params).map_err(|e| CliError::Numerical(e.to_string()))?;
        let cov = limiting_covariance(&quad, config.theta)
            .map_err(|e| CliError::Numerical(e.to_string()))?;

        // stationary-equation residual of the pre-transform block
        let residual = sapd::quadratic::lyapunov_residual(
            &model.systems[0].a,
            &model.systems[0].r,
            &cov.tilde_blocks[0],
        );
        let r_norm = model.systems[0].r.norm();
        if residual > 1e-9 * r_norm {
            return Err(CliError::Numerical(format!(
                "stationary residual {residual:.3e} exceeds 1e-9 x {r_norm:.3e}"
            )));
        }

        // covariance snapshots as level-set polylines
        let n_max = 1usize << config.max_power;
        let seq = covariance_recursion(&quad, &params, &DMatrix::zeros(2, 2), n_max)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for p in 0..=config.max_power {
            let n = 1usize << p;
            let sn = to_iterate_covariance(&quad, &params, &seq[n]);
            let m = Matrix2::new(sn[(0, 0)], sn[(0, 1)], sn[(1, 0)], sn[(1, 1)]);
            if m[(0, 0)] <= 0.0 || m.determinant() <= 0.0 {
                continue; // degenerate before noise has accumulated
            }
            curves.push((format!("n={n}"), ellipse_polyline(&m, 128)));
        }
        let sm = Matrix2::new(
            cov.sigma[(0, 0)],
            cov.sigma[(0, 1)],
            cov.sigma[(1, 0)],
            cov.sigma[(1, 1)],
        );
        curves.push(("limit".to_string(), ellipse_polyline(&sm, 128)));
        if config.emit.csv {
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for (label, pts) in &curves {
                // -1 marks the stationary limit
                let tag = label
                    .strip_prefix("n=")
                    .map(|v| v.parse::<f64>().unwrap())
                    .unwrap_or(-1.0);
                for (x, y) in pts {
                    rows.push(vec![tag, *x, *y]);
                }
            }
            ctx.write_csv(
                &format!("quadcov_p{}_ellipses.csv", idx + 1),
                &["n", "x", "y"],
                rows.into_iter(),
            )?;
        }
        if config.emit.svg {
            let svg = crate::output::ellipses_svg(
                &format!(
                    "covariance level sets, instance {} (c={c}, mu=({mu_x},{mu_y}), delta={delta})",
                    idx + 1
                ),
                &curves,
            );
            ctx.write_svg(&format!("quadcov_p{}_ellipses.svg", idx + 1), &svg)?;
        }

        // straight-line rate fit over the tail of the snapshots
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (n, tilde) in seq.iter().enumerate().skip(20).take(181) {
            let sn = to_iterate_covariance(&quad, &params, tilde);
            let diff = &sn - &cov.sigma;
            let rho = diff
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .map(|l| l.abs())
                .fold(0.0, f64::max);
            if rho > 0.0 {
                xs.push(n as f64);
                ys.push(rho.ln());
            }
        }
        let slope = {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            xs.iter()
                .zip(&ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>()
        };

        reports.push(ProblemReport {
            constants: (c, mu_x, mu_y, delta),
            theta: config.theta,
            theta_threshold: threshold,
            sigma_infinity: (0..2)
                .map(|i| (0..2).map(|j| cov.sigma[(i, j)]).collect())
                .collect(),
            per_lambda_blocks: cov
                .blocks
                .iter()
                .map(|b| vec![b[(0, 0)], b[(0, 1)], b[(1, 1)]])
                .collect(),
            spectral_radius: model.spectral_radius,
            rate_fit_slope: slope,
            rate_expected: 2.0 * model.spectral_radius.ln(),
            lyapunov_residual: residual,
        });
    }
    if config.emit.json {
        #[derive(Serialize)]
        struct Wrap {
            problems: Vec<ProblemReport>,
        }
        ctx.write_json("quadcov_report.json", &Wrap { problems: reports })?;
    }
    Ok(())
}
