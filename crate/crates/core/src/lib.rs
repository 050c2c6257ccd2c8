//! Collinearity diagnostics laboratory.
//!
//! Fits linear regressions by Householder QR, measures multicollinearity
//! (VIF, condition number, correlation determinant), predicts and verifies
//! the exact effect of replicating a sample, and measures numerical
//! instability by Monte-Carlo perturbation of the regressors.

pub mod augmentation;
pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod io;
pub mod linalg;
pub mod perturbation;
pub mod regression;
pub mod report;
pub mod synthetic;

pub use augmentation::{
    predict_augmented, replicate_sample, required_replication, verify_identities, AugmentationPlan,
    AugmentedPrediction, CoefficientSet, IdentityCheck, IdentityDeviations,
};
pub use diagnostics::{
    classify, condition_number, correlation_determinant, diagnose, variance_decomposition, vif, CnScaling,
    DiagnosticsReport, Thresholds,
};
pub use dist::student_t_quantile;
pub use error::{Error, Result};
pub use io::{load_csv, york_analysis, york_design, CsvSchema, YorkParams};
pub use linalg::{euclidean_norm, solve_least_squares, symmetric_eigenvalues, unit_length_scale, Matrix};
pub use perturbation::{
    coefficient_shift, monte_carlo_stability, perturb_design, perturb_vector, PerturbationConfig, PerturbationSummary,
};
pub use regression::{fit_ols, significance_stars, Dataset, FitResult, SignificanceConfig};
pub use report::{export_report, Format, Report};
