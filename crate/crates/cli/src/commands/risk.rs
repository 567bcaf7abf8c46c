//! Risk report over a CSV column of scalar samples.

use std::path::Path;

use serde::Serialize;

use sapd::risk::{risk_report, RiskReport, SampleSet};

use crate::config::RiskConfig;
use crate::error::CliError;
use crate::output::OutputContext;

#[derive(Serialize)]
struct Report {
    source: String,
    column: usize,
    reports: Vec<RiskReport>,
}

fn read_column(path: &Path, column: usize) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if column >= fields.len() {
            return Err(CliError::Config(format!(
                "column {column} out of range on line {}",
                i + 1
            )));
        }
        match fields[column].parse::<f64>() {
            Ok(v) => values.push(v),
            // tolerate header rows before the first numeric value
            Err(_) if values.is_empty() => continue,
            Err(_) => {
                return Err(CliError::Config(format!(
                    "non-numeric value '{}' on line {}",
                    fields[column],
                    i + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(CliError::Config("no numeric samples found".into()));
    }
    Ok(values)
}

pub fn run(config: &RiskConfig, ctx: &OutputContext) -> Result<(), CliError> {
    let values = read_column(Path::new(&config.samples), config.column)?;
    let samples = SampleSet::new(values).map_err(|e| CliError::Config(e.to_string()))?;
    let mut reports = Vec::new();
    for &p in &config.levels {
        if !(0.0..1.0).contains(&p) {
            return Err(CliError::Config(format!("level {p} outside [0, 1)")));
        }
        let report = risk_report(&samples, p).map_err(|e| CliError::Numerical(e.to_string()))?;
        println!(
            "p={:.3}: var={:.6e} cvar={:.6e} evar={:.6e} chi2(r={:.3})={:.6e} n={}",
            report.p, report.var, report.cvar, report.evar, report.chi2_r, report.chi2, report.n
        );
        reports.push(report);
    }
    if config.emit.json {
        ctx.write_json(
            "risk_report.json",
            &Report {
                source: config.samples.clone(),
                column: config.column,
                reports,
            },
        )?;
    }
    Ok(())
}
