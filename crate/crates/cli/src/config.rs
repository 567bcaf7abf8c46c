//! Experiment configurations. Every config round-trips through JSON
//! losslessly; the canonical serialization is hashed and the hash is
//! embedded in every output file so artifacts can be traced to the exact
//! configuration that produced them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = concat!("sapd-lab-v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Toy(ToyConfig),
    Bilinear(BilinearConfig),
    Quadcov(QuadcovConfig),
    Drlr(DrlrConfig),
    Certify(CertifyConfig),
    Risk(RiskConfig),
}

fn default_emit() -> EmitFlags {
    EmitFlags {
        csv: true,
        json: true,
        svg: true,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct EmitFlags {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

/// Scalar introduction problem: two momentum values, squared-error
/// histograms and a tail-risk report at the final iterate.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ToyConfig {
    pub runs: usize,
    pub iterations: usize,
    pub seed: u64,
    pub thetas: Vec<f64>,
    /// total gradient-noise variance per oracle
    pub noise_variance: f64,
    pub risk_level: f64,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            runs: 500,
            iterations: 1000,
            seed: 7,
            thetas: vec![0.95, 0.99],
            noise_variance: 0.1,
            risk_level: 0.8,
            out_dir: "out/toy".into(),
            emit: default_emit(),
        }
    }
}

/// Random symmetric bilinear game with spectral norm pinned to 10.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BilinearConfig {
    pub dim: usize,
    pub runs: usize,
    pub iterations: usize,
    pub seed: u64,
    pub mu_x: f64,
    pub mu_y: f64,
    /// noise scale (per-coordinate variance delta^2 / d)
    pub delta: f64,
    /// momentum values; when empty, uses the spectral threshold value
    /// theta_bar and 1 - (1 - theta_bar)^2
    #[serde(default)]
    pub thetas: Vec<f64>,
    pub init_scale: f64,
    pub histogram_at: Vec<usize>,
    pub risk_level: f64,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for BilinearConfig {
    fn default() -> Self {
        Self {
            dim: 30,
            runs: 500,
            iterations: 5000,
            seed: 11,
            mu_x: 1.0,
            mu_y: 1.0,
            delta: 3e-6,
            thetas: Vec::new(),
            init_scale: 50.0,
            histogram_at: vec![2000, 5000],
            risk_level: 0.9,
            out_dir: "out/bilinear".into(),
            emit: default_emit(),
        }
    }
}

/// Scalar quadratic instances for the covariance illustration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct QuadcovConfig {
    /// instances as (c, mu_x, mu_y, delta)
    pub problems: Vec<(f64, f64, f64, f64)>,
    pub theta: f64,
    /// covariance snapshots at powers of two up to this exponent
    pub max_power: u32,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for QuadcovConfig {
    fn default() -> Self {
        Self {
            problems: vec![
                (1.0, 4.4, 1.5, 35.0),
                (1.0, 2.0, 20.0, 50.0),
                (1e-3, 0.205, 0.307, 5.0),
            ],
            theta: 0.99,
            max_power: 9,
            out_dir: "out/quadcov".into(),
            emit: default_emit(),
        }
    }
}

/// Distributionally robust logistic regression on a CSV dataset.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DrlrConfig {
    pub dataset: String,
    /// label column name or zero-based index
    pub label: String,
    pub runs: usize,
    pub iterations: usize,
    pub seed: u64,
    pub mu_x: f64,
    pub mu_y: f64,
    /// minibatch size for the stochastic oracle; 0 means full gradients
    /// with no noise
    pub batch_size: usize,
    /// momentum values; when empty, uses threshold + 0.01 and
    /// 1 - (1 - threshold)^2
    #[serde(default)]
    pub thetas: Vec<f64>,
    pub histogram_at: Vec<usize>,
    pub risk_level: f64,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for DrlrConfig {
    fn default() -> Self {
        Self {
            dataset: "dataset.csv".into(),
            label: "label".into(),
            runs: 500,
            iterations: 1000,
            seed: 23,
            mu_x: 1.0,
            mu_y: 1.0,
            batch_size: 1,
            thetas: Vec::new(),
            histogram_at: Vec::new(),
            risk_level: 0.9,
            out_dir: "out/drlr".into(),
            emit: default_emit(),
        }
    }
}

/// Certificate report for one problem/parameter pair.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertifyConfig {
    pub mu_x: f64,
    pub mu_y: f64,
    pub l_xx: f64,
    pub l_xy: f64,
    pub l_yx: f64,
    pub l_yy: f64,
    /// momentum; step sizes follow the momentum rule
    pub theta: f64,
    pub nu_x: f64,
    pub nu_y: f64,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub bound_iterations: Vec<usize>,
    pub bound_levels: Vec<f64>,
    /// accuracy target for the iteration-count recipe
    pub epsilon: f64,
    pub confidence: f64,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            mu_x: 1.0,
            mu_y: 1.0,
            l_xx: 0.0,
            l_xy: 1.0,
            l_yx: 1.0,
            l_yy: 0.0,
            theta: 0.95,
            nu_x: 0.1f64.sqrt(),
            nu_y: 0.1f64.sqrt(),
            x0: vec![10.0],
            y0: vec![10.0],
            bound_iterations: vec![100, 300, 1000],
            bound_levels: vec![0.5, 0.9, 0.99],
            epsilon: 1e-2,
            confidence: 0.9,
            out_dir: "out/certify".into(),
            emit: default_emit(),
        }
    }
}

/// Risk report over a column of scalar samples.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RiskConfig {
    pub samples: String,
    /// zero-based column index in the CSV (header optional)
    pub column: usize,
    pub levels: Vec<f64>,
    pub out_dir: String,
    #[serde(default = "default_emit")]
    pub emit: EmitFlags,
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            samples: "samples.csv".into(),
            column: 0,
            levels: vec![0.5, 0.8, 0.9, 0.99],
            out_dir: "out/risk".into(),
            emit: default_emit(),
        }
    }
}

impl ExperimentConfig {
    pub fn out_dir(&self) -> &str {
        match self {
            ExperimentConfig::Toy(c) => &c.out_dir,
            ExperimentConfig::Bilinear(c) => &c.out_dir,
            ExperimentConfig::Quadcov(c) => &c.out_dir,
            ExperimentConfig::Drlr(c) => &c.out_dir,
            ExperimentConfig::Certify(c) => &c.out_dir,
            ExperimentConfig::Risk(c) => &c.out_dir,
        }
    }

    /// Hex digest of the canonical JSON serialization (first 16 chars).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..16].to_string()
    }
}
