//! Random bilinear game: coupling matrix with spectral norm pinned to 10,
//! momentum values straddling the bias/variance trade-off, histograms at two
//! horizons with quantile markers.

use serde::Serialize;

use sapd::core::{NoiseModel, NoiseStream};
use sapd::engine::{ensemble, RunOptions};
use sapd::params::SapdParams;
use sapd::problems::{gen_bilinear, quadratic_saddle, BilinearGameSpec};
use sapd::risk::{var_p, SampleSet};
use sapd::{Lipschitz, ProblemConstants};

use crate::commands::{theta_tag, write_convergence, write_histogram};
use crate::config::BilinearConfig;
use crate::error::CliError;
use crate::output::OutputContext;

#[derive(Serialize)]
struct HorizonEntry {
    theta: f64,
    k: usize,
    var: f64,
    mean: f64,
}

#[derive(Serialize)]
struct BilinearReport {
    thetas: Vec<f64>,
    theta_threshold: f64,
    spectral_norm: f64,
    risk_level: f64,
    horizons: Vec<HorizonEntry>,
}

pub fn run(config: &BilinearConfig, ctx: &OutputContext) -> Result<(), CliError> {
    if config.dim == 0 || config.runs == 0 {
        return Err(CliError::Config("dim and runs must be >= 1".into()));
    }
    for &k in &config.histogram_at {
        if k > config.iterations {
            return Err(CliError::Config(format!(
                "histogram point {k} beyond the horizon {}",
                config.iterations
            )));
        }
    }
    let quad = gen_bilinear(
        &BilinearGameSpec {
            dim: config.dim,
            seed: config.seed,
            mu_x: config.mu_x,
            mu_y: config.mu_y,
            target_norm: 10.0,
        },
        config.delta,
    )
    .map_err(|e| CliError::Numerical(e.to_string()))?;
    let threshold = quad.theta_threshold();
    let thetas = if config.thetas.is_empty() {
        vec![threshold, 1.0 - (1.0 - threshold).powi(2)]
    } else {
        config.thetas.clone()
    };
    let problem = quadratic_saddle(&quad);
    let constants = ProblemConstants::new(
        config.mu_x,
        config.mu_y,
        Lipschitz {
            l_xx: 0.0,
            l_xy: 10.0,
            l_yx: 10.0,
            l_yy: 0.0,
        },
    );
    // one fixed random start, shared by all runs and both momentum values
    let init_stream = NoiseStream::new(config.seed ^ 0x5a5a, 0);
    let z0 = (
        init_stream.standard_normal(1, config.dim) * config.init_scale,
        init_stream.standard_normal(2, config.dim) * config.init_scale,
    );

    let mut horizons = Vec::new();
    for &theta in &thetas {
        let theta = theta.clamp(1e-6, 1.0 - 1e-9);
        let params = SapdParams::chambolle_pock(theta, &constants)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let ens = ensemble(
            &problem,
            &params,
            config.iterations,
            (z0.0.clone(), z0.1.clone()),
            &NoiseModel::IsotropicGaussian {
                delta: config.delta,
            },
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
            write_convergence(ctx, &format!("bilinear_convergence_theta{tag}.csv"), &ens)?;
        }
        for &k in &config.histogram_at {
            let values = ens.e_at(k);
            let samples =
                SampleSet::new(values.clone()).map_err(|e| CliError::Numerical(e.to_string()))?;
            let v = var_p(&samples, config.risk_level)
                .map_err(|e| CliError::Numerical(e.to_string()))?;
            if config.emit.csv {
                let label = format!("VaR{:.0}", config.risk_level * 100.0);
                write_histogram(
                    ctx,
                    &format!("bilinear_histogram_theta{tag}_k{k}"),
                    &format!("squared distance at k={k} (theta={theta:.4})"),
                    &values,
                    &[(v, label.as_str())],
                    config.emit.svg,
                )?;
            }
            horizons.push(HorizonEntry {
                theta,
                k,
                var: v,
                mean: values.iter().sum::<f64>() / values.len() as f64,
            });
        }
    }
    if config.emit.json {
        ctx.write_json(
            "bilinear_report.json",
            &BilinearReport {
                thetas,
                theta_threshold: threshold,
                spectral_norm: 10.0,
                risk_level: config.risk_level,
                horizons,
            },
        )?;
    }
    Ok(())
}
