//! Copula-based dependence measurement between two sets of variables.
//!
//! The central statistic is the copula dependence coefficient: the maximal
//! correlation, estimated by alternating conditional expectations, between
//! the joint empirical-CDF transforms of two samples. The crate also carries
//! the baselines it is usually compared against (randomized dependence
//! coefficient, chi-squared contingency statistic, absolute Pearson
//! correlation), synthetic data generators for power studies, and a
//! permutation-test calibration layer.
//!
//! The crate is `no_std`-compatible (with `alloc`); the companion `cdc-cli`
//! crate carries file formats, parallel experiment drivers, and the
//! command-line surface.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod ace;
pub mod ecdf;
pub mod error;
mod float;
pub mod kernel;
mod linalg;
pub mod matrix;
pub mod measures;
pub mod permutation;
pub mod rng;
pub mod smooth;
pub mod synthetic;

pub use ace::{ace_fit, AceConfig, AceFit};
pub use ecdf::{copula_transform, ecdf_multivariate, ecdf_univariate, CopulaVector};
pub use error::{CdcError, Result};
pub use kernel::{kernel_cdf, standard_normal_cdf, KernelCdfConfig};
pub use matrix::SampleMatrix;
pub use measures::{
    ace_baseline, cdc, chi2_statistic, pearson, pearson_matrices, rdc, Chi2Config, Measure,
    MeasureParams, MeasureResult, RdcConfig,
};
pub use permutation::{permutation_pvalue, PermutationConfig, PermutationTest};
pub use rng::{replication_stream, split_stream, RandomStream};
pub use smooth::{smooth_conditional_mean, SmootherConfig, SmootherKind};
pub use synthetic::{
    gen_2d_suite, gen_dataset, gen_predictors, gen_response, ModelId, NoiseSpec,
};
