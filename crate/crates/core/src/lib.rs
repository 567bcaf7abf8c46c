//! Stochastic accelerated primal-dual method for strongly convex-strongly
//! concave saddle problems, together with the machinery to certify parameter
//! choices, compute exact limiting iterate covariances on quadratic
//! instances, and estimate or bound risk measures of the distance to the
//! saddle point.

pub mod certificates;
pub mod core;
pub mod engine;
pub mod error;
pub mod params;
pub mod problems;
pub mod quadratic;
pub mod risk;

pub use crate::core::{
    sample_noise, weighted_distance, ErrorMetric, Lipschitz, NoiseModel, NoiseStream, OracleTag,
    SaddleProblem, Vector,
};
pub use crate::error::{Error, Result};
pub use crate::params::{
    cp_params, matrix_inequality, select_theta, theta_thresholds, Certificate, ProblemConstants,
    SapdParams, ThetaThresholds, UniversalConstants,
};
