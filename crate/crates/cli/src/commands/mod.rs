pub mod bilinear;
pub mod certify;
pub mod drlr;
pub mod quadcov;
pub mod risk;
pub mod toy;

use sapd::engine::RunEnsemble;

use crate::error::CliError;
use crate::output::{histogram, histogram_svg, OutputContext};

/// Write the per-iteration mean/stderr/quantile convergence CSV for an
/// ensemble.
pub fn write_convergence(
    ctx: &OutputContext,
    name: &str,
    ens: &RunEnsemble,
) -> Result<(), CliError> {
    let stats = ens.stats();
    let quantile = |k: usize, p: f64| -> f64 {
        let mut v = ens.e_at(k);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
        v[idx - 1]
    };
    ctx.write_csv(
        name,
        &["k", "mean_E", "stderr_E", "q10_E", "q50_E", "q90_E", "mean_D"],
        (0..stats.mean_e.len()).map(|k| {
            vec![
                k as f64,
                stats.mean_e[k],
                stats.stderr_e[k],
                quantile(k, 0.10),
                quantile(k, 0.50),
                quantile(k, 0.90),
                stats.mean_d[k],
            ]
        }),
    )?;
    Ok(())
}

/// Single-trajectory export with the documented `k, E_k, D_k` columns.
pub fn write_trajectory(
    ctx: &OutputContext,
    name: &str,
    trajectory: &sapd::engine::Trajectory,
) -> Result<(), CliError> {
    ctx.write_csv(
        name,
        &["k", "E_k", "D_k"],
        (0..trajectory.e.len()).map(|k| vec![k as f64, trajectory.e[k], trajectory.d[k]]),
    )?;
    Ok(())
}

/// Histogram CSV (+ optional SVG) of `E_k` at a fixed iteration, with
/// marker lines at the given (value, label) pairs.
pub fn write_histogram(
    ctx: &OutputContext,
    base: &str,
    title: &str,
    values: &[f64],
    markers: &[(f64, &str)],
    svg: bool,
) -> Result<(), CliError> {
    let h = histogram(values);
    ctx.write_csv(
        &format!("{base}.csv"),
        &["bin_lo", "bin_hi", "count"],
        (0..h.counts.len()).map(|i| vec![h.bin_edges[i], h.bin_edges[i + 1], h.counts[i] as f64]),
    )?;
    if svg {
        let body = histogram_svg(&h, title, markers);
        ctx.write_svg(&format!("{base}.svg"), &body)?;
    }
    Ok(())
}

/// Format a momentum value for file names: 0.95 -> "0950".
pub fn theta_tag(theta: f64) -> String {
    format!("{:04.0}", theta * 1000.0)
}
