//! Inter-dataset similarity through the lens of PCA.
//!
//! Two datasets that are fair samples of the same distribution have nearly
//! identical PCA representations. This crate measures how far two tabular
//! datasets deviate from that ideal with two complementary metrics — the
//! difference in explained-variance spectra (Δλ) and the angle between the
//! first principal axes (Δθ) — plus the Average Angle Difference (AAD) for
//! model-agnostic feature-selection scoring. Conventional baselines
//! (correlation-matrix difference, mean Kolmogorov–Smirnov statistic) ride
//! along in every comparison report.
//!
//! The crate is organized along the pipeline:
//!
//! * [`ingest`] — CSV loading, validation, centering/standardization;
//! * [`linalg`] — covariance and a cyclic Jacobi eigensolver;
//! * [`pca`] — fitted eigenpairs and explained-variance ratios;
//! * [`simmetrics`] — Δλ, Δθ, AAD and the baseline metrics;
//! * [`experiments`] — seeded, bit-reproducible harness runs (sample-size
//!   instability sweeps, invariance checks, AAD sweeps);
//! * [`rng`] — the self-contained deterministic generator the harness uses.
//!
//! Everything is deterministic: identical inputs and seeds give identical
//! bytes, with or without the (default) `parallel` feature, and regardless
//! of thread count.

pub mod error;
pub mod experiments;
pub mod ingest;
pub mod linalg;
pub mod pca;
pub mod rng;
pub mod simmetrics;

mod exec;
mod util;

pub use error::{Error, Result};
pub use experiments::{
    aad_sweep, instability_sweep, invariance_suite, rank_features, ExperimentResult, RankMethod,
};
pub use ingest::{
    load_csv, preprocess, zero_feature, CategoricalPolicy, ColumnStats, DataMatrix,
    PreprocessMode, PreprocessSpec,
};
pub use linalg::{apply_orthogonal, covariance, eigh, EigenDecomposition, SquareMatrix, SymMatrix};
pub use pca::{fit, project, PcaModel};
pub use simmetrics::{
    aad, compare, compare_opts, corr_matrix_diff, delta_lambda, delta_theta, ks_mean,
    FeatureSubset, MetricReport, Provenance,
};
