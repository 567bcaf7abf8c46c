//! Distributionally robust logistic regression on a CSV dataset. The saddle
//! point has no closed form, so errors are measured against a long
//! deterministic full-gradient run (10x the horizon, zero noise).

use std::path::Path;

use nalgebra::DVector;
use serde::Serialize;

use sapd::core::NoiseModel;
use sapd::engine::{ensemble, run as run_single, RunOptions};
use sapd::params::SapdParams;
use sapd::problems::{drlr_oracles, feasibility_gap, load_csv, DrlrSpec, LabelColumn};
use sapd::risk::{var_p, SampleSet};
use sapd::ProblemConstants;

use crate::commands::{theta_tag, write_histogram};
use crate::config::DrlrConfig;
use crate::error::CliError;
use crate::output::OutputContext;

#[derive(Serialize)]
struct DrlrReport {
    rows: usize,
    features: usize,
    radius: f64,
    theta_threshold: f64,
    thetas: Vec<f64>,
    reference_gap: f64,
    per_theta: Vec<ThetaSummary>,
}

#[derive(Serialize)]
struct ThetaSummary {
    theta: f64,
    mean_final: f64,
    var_final: f64,
    max_dual_infeasibility: f64,
}

pub fn run(config: &DrlrConfig, ctx: &OutputContext) -> Result<(), CliError> {
    let label = match config.label.parse::<usize>() {
        Ok(i) => LabelColumn::Index(i),
        Err(_) => LabelColumn::Name(config.label.clone()),
    };
    let dataset = load_csv(Path::new(&config.dataset), &label)?;
    let spec = DrlrSpec {
        mu_x: config.mu_x,
        mu_y: config.mu_y,
        radius: None,
    };
    let radius = 2.0 * (dataset.n_rows as f64).sqrt();
    let problem = drlr_oracles(&dataset, &spec)?;
    let constants = ProblemConstants::new(config.mu_x, config.mu_y, problem.lips);
    let thr = sapd::params::theta_thresholds(&constants)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let threshold = 0.5f64.max(thr.theta1).max(thr.theta2);
    let thetas = if config.thetas.is_empty() {
        vec![
            (threshold + 0.01).min(1.0 - 1e-6),
            1.0 - (1.0 - threshold).powi(2),
        ]
    } else {
        config.thetas.clone()
    };

    let x0 = DVector::from_element(dataset.n_features, 2.0);
    let y0 = DVector::from_element(dataset.n_rows, 1.0 / dataset.n_rows as f64);

    // reference saddle point: long deterministic run at the smaller momentum
    let ref_theta = thetas.iter().cloned().fold(f64::INFINITY, f64::min);
    let ref_params = SapdParams::chambolle_pock(ref_theta, &constants)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let reference = run_single(
        &problem,
        &ref_params,
        config.iterations * 10,
        (x0.clone(), y0.clone()),
        &NoiseModel::None,
        config.seed,
        0,
        RunOptions::default(),
    );
    if reference.failed_at.is_some() {
        return Err(CliError::Numerical("reference run diverged".into()));
    }
    // residual movement of the reference tail, as a quality indicator
    let ref_gap = {
        let probe = run_single(
            &problem,
            &ref_params,
            1,
            (reference.final_x.clone(), reference.final_y.clone()),
            &NoiseModel::None,
            config.seed,
            0,
            RunOptions::default(),
        );
        (&probe.final_x - &reference.final_x).norm() + (&probe.final_y - &reference.final_y).norm()
    };
    let problem = problem.with_saddle(reference.final_x.clone(), reference.final_y.clone());

    // empty histogram list means the final iterate
    let histogram_at = if config.histogram_at.is_empty() {
        vec![config.iterations]
    } else {
        config.histogram_at.clone()
    };
    let noise = if config.batch_size == 0 {
        NoiseModel::None
    } else {
        NoiseModel::Minibatch {
            batch_size: config.batch_size,
        }
    };
    let mut per_theta = Vec::new();
    for &theta in &thetas {
        let params = SapdParams::chambolle_pock(theta, &constants)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let ens = ensemble(
            &problem,
            &params,
            config.iterations,
            (x0.clone(), y0.clone()),
            &noise,
            config.runs,
            config.seed,
            RunOptions::default(),
        );
        if ens.failed_runs > 0 {
            return Err(CliError::Numerical(format!(
                "{} runs diverged at theta={theta}",
                ens.failed_runs
            )));
        }
        let tag = theta_tag(theta);
        if config.emit.csv {
            super::write_convergence(ctx, &format!("drlr_convergence_theta{tag}.csv"), &ens)?;
            super::write_trajectory(
                ctx,
                &format!("drlr_sample_trajectory_theta{tag}.csv"),
                &ens.runs[0],
            )?;
        }
        let finals = ens.e_at(config.iterations);
        let samples =
            SampleSet::new(finals.clone()).map_err(|e| CliError::Numerical(e.to_string()))?;
        let v = var_p(&samples, config.risk_level)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        for &k in &histogram_at {
            if k > config.iterations {
                return Err(CliError::Config(format!(
                    "histogram point {k} beyond the horizon"
                )));
            }
            let values = ens.e_at(k);
            if config.emit.csv {
                let label = format!("VaR{:.0}", config.risk_level * 100.0);
                write_histogram(
                    ctx,
                    &format!("drlr_histogram_theta{tag}_k{k}"),
                    &format!("squared distance to reference at k={k} (theta={theta:.4})"),
                    &values,
                    &[(v, label.as_str())],
                    config.emit.svg,
                )?;
            }
        }
        // dual iterates must remain in the ambiguity set
        let max_infeas = ens
            .runs
            .iter()
            .map(|t| feasibility_gap(&t.final_y, radius))
            .fold(0.0, f64::max);
        if max_infeas > 1e-8 {
            return Err(CliError::Numerical(format!(
                "dual iterate left the ambiguity set: gap {max_infeas:.3e}"
            )));
        }
        per_theta.push(ThetaSummary {
            theta,
            mean_final: finals.iter().sum::<f64>() / finals.len() as f64,
            var_final: v,
            max_dual_infeasibility: max_infeas,
        });
    }
    if config.emit.json {
        ctx.write_json(
            "drlr_report.json",
            &DrlrReport {
                rows: dataset.n_rows,
                features: dataset.n_features,
                radius,
                theta_threshold: threshold,
                thetas,
                reference_gap: ref_gap,
                per_theta,
            },
        )?;
    }
    Ok(())
}
