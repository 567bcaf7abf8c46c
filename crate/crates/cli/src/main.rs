//! Experiment harness for the SAPD saddle-point solver.
//!
//! ```text
//! sapd-lab <toy|bilinear|quadcov|drlr|certify|risk> [--config FILE.json]
//!          [--out DIR] [--seed N] [--runs N] [--iters N] [--theta X]...
//!          [--delta X] [--dataset FILE --label COL] [--batch N]
//!          [--samples FILE --column N] [--no-svg] [--print-config]
//! ```
//!
//! Flags override the JSON config; without `--config` the subcommand's
//! documented defaults apply. Exit codes: 0 success, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use config::{
    BilinearConfig, CertifyConfig, DrlrConfig, ExperimentConfig, QuadcovConfig, RiskConfig,
    ToyConfig,
};
use error::CliError;
use output::OutputContext;

const USAGE: &str = "\
sapd-lab: experiments for the stochastic accelerated primal-dual method

USAGE:
  sapd-lab <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  toy       scalar toy problem: convergence, histograms, tail-risk report
  bilinear  random 30-dim bilinear game with spectral norm 10
  quadcov   stationary covariance analysis on scalar quadratic instances
  drlr      distributionally robust logistic regression on a CSV dataset
  certify   parameter feasibility, constants ledger and bound tables
  risk      VaR/CVaR/EVaR/chi-square report over a CSV column

FLAGS:
  --config FILE     JSON experiment configuration (defaults per subcommand)
  --out DIR         output directory
  --seed N          master seed
  --runs N          Monte Carlo runs
  --iters N         iterations per run
  --theta X         momentum value (repeatable; replaces the default pair)
  --delta X         noise scale (bilinear)
  --dataset FILE    CSV dataset (drlr)
  --label COL       label column name or index (drlr)
  --batch N         minibatch size, 0 = deterministic oracle (drlr)
  --samples FILE    CSV of scalar samples (risk)
  --column N        zero-based sample column (risk)
  --no-svg          skip SVG emission
  --print-config    echo the effective config JSON and exit
  --help            this message

Every output embeds the config hash; identical configs reproduce identical
bytes.
";

fn parse_flag_value<'a>(
    args: &'a [String],
    i: &mut usize,
    flag: &str,
) -> Result<&'a str, CliError> {
    *i += 1;
    args.get(*i)
        .map(|s| s.as_str())
        .ok_or_else(|| CliError::Config(format!("{flag} requires a value")))
}

fn parse_num<T: std::str::FromStr>(v: &str, flag: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("invalid value '{v}' for {flag}")))
}

struct Overrides {
    out: Option<String>,
    seed: Option<u64>,
    runs: Option<usize>,
    iters: Option<usize>,
    thetas: Vec<f64>,
    delta: Option<f64>,
    dataset: Option<String>,
    label: Option<String>,
    batch: Option<usize>,
    samples: Option<String>,
    column: Option<usize>,
    no_svg: bool,
    print_config: bool,
}

fn run() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 2 || args[1] == "--help" || args[1] == "-h" {
        print!("{USAGE}");
        return if args.len() < 2 {
            Err(CliError::Config("missing subcommand".into()))
        } else {
            Ok(())
        };
    }
    let subcommand = args[1].as_str();

    let mut config_path: Option<String> = None;
    let mut ov = Overrides {
        out: None,
        seed: None,
        runs: None,
        iters: None,
        thetas: Vec::new(),
        delta: None,
        dataset: None,
        label: None,
        batch: None,
        samples: None,
        column: None,
        no_svg: false,
        print_config: false,
    };
    let mut i = 2;
    while i < args.len() {
        match args[i].as_str() {
            "--config" => config_path = Some(parse_flag_value(&args, &mut i, "--config")?.into()),
            "--out" => ov.out = Some(parse_flag_value(&args, &mut i, "--out")?.into()),
            "--seed" => ov.seed = Some(parse_num(parse_flag_value(&args, &mut i, "--seed")?, "--seed")?),
            "--runs" => ov.runs = Some(parse_num(parse_flag_value(&args, &mut i, "--runs")?, "--runs")?),
            "--iters" => {
                ov.iters = Some(parse_num(parse_flag_value(&args, &mut i, "--iters")?, "--iters")?)
            }
            "--theta" => ov
                .thetas
                .push(parse_num(parse_flag_value(&args, &mut i, "--theta")?, "--theta")?),
            "--delta" => {
                ov.delta = Some(parse_num(parse_flag_value(&args, &mut i, "--delta")?, "--delta")?)
            }
            "--dataset" => ov.dataset = Some(parse_flag_value(&args, &mut i, "--dataset")?.into()),
            "--label" => ov.label = Some(parse_flag_value(&args, &mut i, "--label")?.into()),
            "--batch" => {
                ov.batch = Some(parse_num(parse_flag_value(&args, &mut i, "--batch")?, "--batch")?)
            }
            "--samples" => ov.samples = Some(parse_flag_value(&args, &mut i, "--samples")?.into()),
            "--column" => {
                ov.column = Some(parse_num(parse_flag_value(&args, &mut i, "--column")?, "--column")?)
            }
            "--no-svg" => ov.no_svg = true,
            "--print-config" => ov.print_config = true,
            "--help" | "-h" => {
                print!("{USAGE}");
                return Ok(());
            }
            other => return Err(CliError::Config(format!("unknown flag '{other}'"))),
        }
        i += 1;
    }

    let mut config = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
            let parsed: ExperimentConfig = serde_json::from_str(&text)?;
            let expected = parsed_matches(subcommand, &parsed);
            if !expected {
                return Err(CliError::Config(format!(
                    "config subcommand does not match '{subcommand}'"
                )));
            }
            parsed
        }
        None => default_config(subcommand)?,
    };
    apply_overrides(&mut config, &ov);

    if ov.print_config {
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(());
    }

    let ctx = OutputContext::new(config.out_dir(), config.hash())?;
    match &config {
        ExperimentConfig::Toy(c) => commands::toy::run(c, &ctx),
        ExperimentConfig::Bilinear(c) => commands::bilinear::run(c, &ctx),
        ExperimentConfig::Quadcov(c) => commands::quadcov::run(c, &ctx),
        ExperimentConfig::Drlr(c) => commands::drlr::run(c, &ctx),
        ExperimentConfig::Certify(c) => commands::certify::run(c, &ctx),
        ExperimentConfig::Risk(c) => commands::risk::run(c, &ctx),
    }
}

fn parsed_matches(subcommand: &str, config: &ExperimentConfig) -> bool {
    matches!(
        (subcommand, config),
        ("toy", ExperimentConfig::Toy(_))
            | ("bilinear", ExperimentConfig::Bilinear(_))
            | ("quadcov", ExperimentConfig::Quadcov(_))
            | ("drlr", ExperimentConfig::Drlr(_))
            | ("certify", ExperimentConfig::Certify(_))
            | ("risk", ExperimentConfig::Risk(_))
    )
}

fn default_config(subcommand: &str) -> Result<ExperimentConfig, CliError> {
    Ok(match subcommand {
        "toy" => ExperimentConfig::Toy(ToyConfig::default()),
        "bilinear" => ExperimentConfig::Bilinear(BilinearConfig::default()),
        "quadcov" => ExperimentConfig::Quadcov(QuadcovConfig::default()),
        "drlr" => ExperimentConfig::Drlr(DrlrConfig::default()),
        "certify" => ExperimentConfig::Certify(CertifyConfig::default()),
        "risk" => ExperimentConfig::Risk(RiskConfig::default()),
        other => return Err(CliError::Config(format!("unknown subcommand '{other}'"))),
    })
}

fn apply_overrides(config: &mut ExperimentConfig, ov: &Overrides) {
    match config {
        ExperimentConfig::Toy(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = ov.seed {
                c.seed = v;
            }
            if let Some(v) = ov.runs {
                c.runs = v;
            }
            if let Some(v) = ov.iters {
                c.iterations = v;
            }
            if !ov.thetas.is_empty() {
                c.thetas = ov.thetas.clone();
            }
            if let Some(v) = ov.delta {
                c.noise_variance = v * v;
            }
            if ov.no_svg {
                c.emit.svg = false;
            }
        }
        ExperimentConfig::Bilinear(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = ov.seed {
                c.seed = v;
            }
            if let Some(v) = ov.runs {
                c.runs = v;
            }
            if let Some(v) = ov.iters {
                c.iterations = v;
            }
            if !ov.thetas.is_empty() {
                c.thetas = ov.thetas.clone();
            }
            if let Some(v) = ov.delta {
                c.delta = v;
            }
            if ov.no_svg {
                c.emit.svg = false;
            }
        }
        ExperimentConfig::Quadcov(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = ov.thetas.first() {
                c.theta = *v;
            }
            if ov.no_svg {
                c.emit.svg = false;
            }
        }
        ExperimentConfig::Drlr(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = ov.seed {
                c.seed = v;
            }
            if let Some(v) = ov.runs {
                c.runs = v;
            }
            if let Some(v) = ov.iters {
                c.iterations = v;
            }
            if !ov.thetas.is_empty() {
                c.thetas = ov.thetas.clone();
            }
            if let Some(v) = &ov.dataset {
                c.dataset = v.clone();
            }
            if let Some(v) = &ov.label {
                c.label = v.clone();
            }
            if let Some(v) = ov.batch {
                c.batch_size = v;
            }
            if ov.no_svg {
                c.emit.svg = false;
            }
        }
        ExperimentConfig::Certify(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = ov.thetas.first() {
                c.theta = *v;
            }
        }
        ExperimentConfig::Risk(c) => {
            if let Some(v) = &ov.out {
                c.out_dir = v.clone();
            }
            if let Some(v) = &ov.samples {
                c.samples = v.clone();
            }
            if let Some(v) = ov.column {
                c.column = v;
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sapd-lab: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
