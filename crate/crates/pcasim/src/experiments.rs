//! Reproducible experiment harness: sample-size instability sweeps,
//! invariance checks, and AAD feature-selection sweeps.
//!
//! Every run is a pure function of its parameters and a master seed. Child
//! seeds for covariances and trials come from [`derive_seed`], so results are
//! bit-identical regardless of how trials are scheduled. Results serialize to
//! CSV (one line per grid cell) or JSON (parameters included).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::{ColumnStats, DataMatrix, PreprocessMode, PreprocessSpec};
use crate::linalg::{apply_orthogonal, cholesky, SquareMatrix, SymMatrix};
use crate::rng::{derive_seed, Rng};
use crate::simmetrics::{compare, per_feature_angles, MetricReport};
use crate::util::fmt_f64;

// Seed-derivation tags; distinct constants keep the random streams apart.
const TAG_COVARIANCE: u64 = 1;
const TAG_TRIAL: u64 = 2;
const TAG_NOISE: u64 = 3;
const TAG_AFFINE: u64 = 4;

/// One (d, n) cell of an instability sweep: metric means and standard
/// deviations over the trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilityRow {
    pub d: usize,
    pub n: usize,
    pub delta_lambda_mean: f64,
    pub delta_lambda_std: f64,
    pub delta_theta_mean: f64,
    pub delta_theta_std: f64,
    pub corr_diff_mean: f64,
    pub corr_diff_std: f64,
    pub ks_mean_mean: f64,
    pub ks_mean_std: f64,
}

/// One transform of an invariance run, with measured and expected metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub transform: String,
    pub parameter: f64,
    pub delta_lambda: f64,
    pub delta_theta: f64,
    pub expected_delta_lambda: f64,
    pub expected_delta_theta: f64,
}

/// One prefix size of an AAD sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AadSweepRow {
    pub k: usize,
    pub aad: f64,
}

/// Tabular output of a harness run, tagged by experiment kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentResult {
    Instability {
        seed: u64,
        trials: usize,
        dims: Vec<usize>,
        sizes: Vec<usize>,
        preprocess: PreprocessSpec,
        rows: Vec<InstabilityRow>,
    },
    Invariance {
        seed: u64,
        noise_scale: f64,
        rotation_deg: f64,
        rows: Vec<InvarianceRow>,
    },
    AadSweep {
        ordering: Vec<usize>,
        preprocess: PreprocessSpec,
        rows: Vec<AadSweepRow>,
    },
}

impl ExperimentResult {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentResult::Instability { .. } => "instability",
            ExperimentResult::Invariance { .. } => "invariance",
            ExperimentResult::AadSweep { .. } => "aad_sweep",
        }
    }

    /// CSV with a header line and one line per grid cell.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        match self {
            ExperimentResult::Instability { rows, .. } => {
                out.push_str(
                    "d,n,delta_lambda_mean,delta_lambda_std,delta_theta_mean,delta_theta_std,\
                     corr_diff_mean,corr_diff_std,ks_mean_mean,ks_mean_std\n",
                );
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        r.d,
                        r.n,
                        fmt_f64(r.delta_lambda_mean),
                        fmt_f64(r.delta_lambda_std),
                        fmt_f64(r.delta_theta_mean),
                        fmt_f64(r.delta_theta_std),
                        fmt_f64(r.corr_diff_mean),
                        fmt_f64(r.corr_diff_std),
                        fmt_f64(r.ks_mean_mean),
                        fmt_f64(r.ks_mean_std),
                    ));
                }
            }
            ExperimentResult::Invariance { rows, .. } => {
                out.push_str(
                    "transform,parameter,delta_lambda,delta_theta,\
                     expected_delta_lambda,expected_delta_theta\n",
                );
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.transform,
                        fmt_f64(r.parameter),
                        fmt_f64(r.delta_lambda),
                        fmt_f64(r.delta_theta),
                        fmt_f64(r.expected_delta_lambda),
                        fmt_f64(r.expected_delta_theta),
                    ));
                }
            }
            ExperimentResult::AadSweep { rows, .. } => {
                out.push_str("k,aad\n");
                for r in rows {
                    out.push_str(&format!("{},{}\n", r.k, fmt_f64(r.aad)));
                }
            }
        }
        out
    }

    /// Pretty JSON including the run parameters.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment results are always serializable")
    }
}

/// Random symmetric positive-definite matrix `MᵀM + 0.1·I` with
/// `M ~ N(0,1)^{d×d}`; well-conditioned spectra for the sweeps.
pub fn random_spd(d: usize, seed: u64) -> SymMatrix {
    let mut rng = Rng::from_seed(seed);
    let m: Vec<f64> = (0..d * d).map(|_| rng.next_normal()).collect();
    SymMatrix::from_upper(d, |i, j| {
        let dot: f64 = (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum();
        if i == j {
            dot + 0.1
        } else {
            dot
        }
    })
}

/// Draws `n` rows from `N(0, cov)` via the Cholesky factor of `cov`.
/// Columns are named `c0…c{d−1}`.
pub fn sample_mvn(cov: &SymMatrix, n: usize, seed: u64) -> Result<DataMatrix> {
    if n < 2 {
        return Err(Error::TooFewRows { got: n, need: 2 });
    }
    let d = cov.dim();
    let l = cholesky(cov)?;
    let mut rng = Rng::from_seed(seed);
    let mut values = vec![0.0; n * d];
    let mut z = vec![0.0; d];
    for r in 0..n {
        for zk in z.iter_mut() {
            *zk = rng.next_normal();
        }
        for j in 0..d {
            let mut x = 0.0;
            for (k, zk) in z.iter().enumerate().take(j + 1) {
                x += l[j * d + k] * zk;
            }
            values[j * n + r] = x;
        }
    }
    let names = (0..d).map(|c| format!("c{c}")).collect();
    Ok(DataMatrix::from_columns_checked_fast(names, n, values))
}

/// Samples pairs of same-distribution datasets over a (d, n) grid and
/// reports how unstable each metric is at every sample size.
///
/// Per dimension `d` a random SPD covariance is fixed by the seed; per cell
/// and trial two independent n-row samples are drawn and compared with
/// `mode = center`, `p = d`. Means and sample standard deviations are taken
/// over trials in trial order.
pub fn instability_sweep(
    dims: &[usize],
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if dims.is_empty() || sizes.is_empty() {
        return Err(Error::InvalidGrid("dims and sizes must be non-empty".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidGrid("trials must be at least 1".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidGrid(format!("dimension {d} is below 2")));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidGrid(format!("sample size {n} is below 2")));
    }
    let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
    let covariances: Vec<SymMatrix> = dims
        .iter()
        .map(|&d| random_spd(d, derive_seed(seed, &[TAG_COVARIANCE, d as u64])))
        .collect();

    let cells: Vec<(usize, usize)> = dims
        .iter()
        .enumerate()
        .flat_map(|(di, _)| sizes.iter().enumerate().map(move |(ni, _)| (di, ni)))
        .collect();
    let trial_reports: Vec<Result<MetricReport>> =
        exec::map_indexed(cells.len() * trials, |idx| {
            let (cell_idx, t) = (idx / trials, idx % trials);
            let (di, ni) = cells[cell_idx];
            let (d, n) = (dims[di], sizes[ni]);
            let cell_seed = derive_seed(seed, &[TAG_TRIAL, d as u64, n as u64, t as u64]);
            let a = sample_mvn(&covariances[di], n, derive_seed(cell_seed, &[0]))?;
            let b = sample_mvn(&covariances[di], n, derive_seed(cell_seed, &[1]))?;
            compare(&a, &b, &spec, d)
        });

    let mut rows = Vec::with_capacity(cells.len());
    for (cell_idx, &(di, ni)) in cells.iter().enumerate() {
        let mut dl = Vec::with_capacity(trials);
        let mut dt = Vec::with_capacity(trials);
        let mut corr = Vec::with_capacity(trials);
        let mut ks = Vec::with_capacity(trials);
        for t in 0..trials {
            // Move the report out without disturbing trial order.
            let report = trial_reports[cell_idx * trials + t].as_ref();
            let report = report.map_err(|e| Error::InvalidGrid(e.to_string()))?;
            dl.push(report.delta_lambda);
            dt.push(report.delta_theta);
            corr.push(report.corr_diff);
            ks.push(report.ks_mean);
        }
        let (dl_m, dl_s) = mean_std(&dl);
        let (dt_m, dt_s) = mean_std(&dt);
        let (c_m, c_s) = mean_std(&corr);
        let (k_m, k_s) = mean_std(&ks);
        rows.push(InstabilityRow {
            d: dims[di],
            n: sizes[ni],
            delta_lambda_mean: dl_m,
            delta_lambda_std: dl_s,
            delta_theta_mean: dt_m,
            delta_theta_std: dt_s,
            corr_diff_mean: c_m,
            corr_diff_std: c_s,
            ks_mean_mean: k_m,
            ks_mean_std: k_s,
        });
    }
    Ok(ExperimentResult::Instability {
        seed,
        trials,
        dims: dims.to_vec(),
        sizes: sizes.to_vec(),
        preprocess: spec,
        rows,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the three invariance transforms against `data` and reports measured
/// versus expected metric values.
///
/// * `noise`: per-cell perturbation `x + η·δ`, `δ ~ N(0, column std)`,
///   compared with `mode = center`. Expected zero up to sampling error.
/// * `affine`: per-column map `a + b·x` with `b > 0` drawn from the seed,
///   compared with `mode = zscore`. Expected exactly zero.
/// * `rotation`: plane rotation by `rotation_deg` on the two highest-variance
///   columns of the centered data, compared with `mode = none`. Expected
///   `Δλ = 0` and `Δθ = (2/π)·min(θ, π−θ)`.
pub fn invariance_suite(
    data: &DataMatrix,
    noise_scale: f64,
    rotation_deg: f64,
    seed: u64,
) -> Result<ExperimentResult> {
    if !(noise_scale >= 0.0) {
        return Err(Error::InvalidArgument("noise scale must be >= 0".into()));
    }
    if !(rotation_deg > 0.0 && rotation_deg <= 90.0) {
        return Err(Error::InvalidArgument(
            "rotation angle must lie in (0, 90] degrees".into(),
        ));
    }
    let d = data.n_cols();
    if d < 2 {
        return Err(Error::InvalidArgument("invariance suite needs d >= 2".into()));
    }
    let n = data.n_rows();
    let center = PreprocessSpec::with_mode(PreprocessMode::Center);
    let stats = ColumnStats::fit(data, PreprocessMode::Center);
    let mut rows = Vec::with_capacity(3);

    // (a) noisy copy
    {
        let mut rng = Rng::from_seed(derive_seed(seed, &[TAG_NOISE]));
        let columns: Vec<Vec<f64>> = (0..d)
            .map(|c| {
                let sigma = stats.stds()[c];
                data.column(c)
                    .iter()
                    .map(|&x| x + noise_scale * sigma * rng.next_normal())
                    .collect()
            })
            .collect();
        let noisy = DataMatrix::from_columns(data.col_names().to_vec(), columns)?;
        let report = compare(data, &noisy, &center, d)?;
        rows.push(InvarianceRow {
            transform: "noise".into(),
            parameter: noise_scale,
            delta_lambda: report.delta_lambda,
            delta_theta: report.delta_theta,
            expected_delta_lambda: 0.0,
            expected_delta_theta: 0.0,
        });
    }

    // (b) affine copy under standardization
    {
        let mut rng = Rng::from_seed(derive_seed(seed, &[TAG_AFFINE]));
        let columns: Vec<Vec<f64>> = (0..d)
            .map(|c| {
                let shift = rng.next_in_range(-5.0, 5.0);
                let scale = rng.next_in_range(0.5, 3.0);
                data.column(c).iter().map(|&x| shift + scale * x).collect()
            })
            .collect();
        let affine = DataMatrix::from_columns(data.col_names().to_vec(), columns)?;
        let zscore = PreprocessSpec::with_mode(PreprocessMode::Zscore);
        let report = compare(data, &affine, &zscore, d)?;
        rows.push(InvarianceRow {
            transform: "affine".into(),
            parameter: 0.0,
            delta_lambda: report.delta_lambda,
            delta_theta: report.delta_theta,
            expected_delta_lambda: 0.0,
            expected_delta_theta: 0.0,
        });
    }

    // (c) rotation of the two highest-variance columns of the centered data
    {
        let centered = stats.apply(data)?;
        let mut by_spread: Vec<usize> = (0..d).collect();
        by_spread.sort_by(|&a, &b| {
            stats.stds()[b]
                .total_cmp(&stats.stds()[a])
                .then(a.cmp(&b))
        });
        let (hi, lo) = (by_spread[0], by_spread[1]);
        let theta = rotation_deg.to_radians();
        let q = SquareMatrix::rotation(d, hi, lo, theta)?;
        let rotated = apply_orthogonal(&centered, &q)?;
        let none = PreprocessSpec::with_mode(PreprocessMode::None);
        let report = compare(&centered, &rotated, &none, d)?;
        let expected_theta =
            2.0 / std::f64::consts::PI * theta.min(std::f64::consts::PI - theta);
        rows.push(InvarianceRow {
            transform: "rotation".into(),
            parameter: rotation_deg,
            delta_lambda: report.delta_lambda,
            delta_theta: report.delta_theta,
            expected_delta_lambda: 0.0,
            expected_delta_theta: expected_theta,
        });
    }
    debug_assert_eq!(n, data.n_rows());
    Ok(ExperimentResult::Invariance {
        seed,
        noise_scale,
        rotation_deg,
        rows,
    })
}

/// AAD as a function of how many features of `ordering` are selected.
///
/// For every `k = 1…d−1` the selection is the first `k` entries of
/// `ordering`; `k = d` is omitted since the complement would be empty. The
/// per-feature angles are computed once and re-averaged per prefix, which
/// agrees exactly with calling [`aad`] for each `k`.
pub fn aad_sweep(
    data: &DataMatrix,
    ordering: &[usize],
    spec: &PreprocessSpec,
) -> Result<ExperimentResult> {
    let d = data.n_cols();
    if d < 2 {
        return Err(Error::InvalidArgument("aad sweep needs d >= 2".into()));
    }
    if ordering.len() != d {
        return Err(Error::InvalidPermutation(format!(
            "ordering has {} entries for {d} columns",
            ordering.len()
        )));
    }
    let mut seen = vec![false; d];
    for &f in ordering {
        if f >= d {
            return Err(Error::InvalidPermutation(format!("index {f} out of range")));
        }
        if seen[f] {
            return Err(Error::InvalidPermutation(format!("index {f} repeated")));
        }
        seen[f] = true;
    }

    let stats = ColumnStats::fit(data, spec.mode);
    let x = stats.apply(data)?;
    let s = crate::linalg::covariance(&x)?;
    if s.trace() <= 1e-15 {
        return Err(Error::DegenerateData);
    }
    let base = crate::linalg::eigh(&s)?.eigenvector(0);
    let all: Vec<usize> = (0..d).collect();
    let angles = per_feature_angles(&x, &base, &all)?;

    let mut rows = Vec::with_capacity(d - 1);
    for k in 1..d {
        let selected = &ordering[..k];
        let complement: Vec<usize> = (0..d).filter(|f| !selected.contains(f)).collect();
        let sum: f64 = complement.iter().map(|&f| angles[f]).sum();
        rows.push(AadSweepRow {
            k,
            aad: sum / complement.len() as f64,
        });
    }
    Ok(ExperimentResult::AadSweep {
        ordering: ordering.to_vec(),
        preprocess: *spec,
        rows,
    })
}

/// Feature-scoring rule for [`rank_features`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Sample variance of each column.
    Variance,
    /// Absolute Pearson correlation with the given target column.
    AbsCorrToTarget(usize),
}

/// Ranks columns by the method's score, descending, ties broken by the lower
/// index. Deterministic stand-in for external feature selectors.
pub fn rank_features(data: &DataMatrix, method: RankMethod) -> Result<Vec<usize>> {
    let d = data.n_cols();
    let stats = ColumnStats::fit(data, PreprocessMode::Center);
    let scores: Vec<f64> = match method {
        RankMethod::Variance => stats.stds().iter().map(|s| s * s).collect(),
        RankMethod::AbsCorrToTarget(target) => {
            if target >= d {
                return Err(Error::IndexOutOfRange { index: target, dim: d });
            }
            let centered = stats.apply(data)?;
            let n = data.n_rows();
            let target_col = centered.column(target);
            let target_std = stats.stds()[target];
            (0..d)
                .map(|c| {
                    if stats.zero_variance()[c] || stats.zero_variance()[target] {
                        return 0.0;
                    }
                    let cov = stable_dot_cols(centered.column(c), target_col) / (n - 1) as f64;
                    (cov / (stats.stds()[c] * target_std)).abs()
                })
                .collect()
        }
    };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    Ok(order)
}

fn stable_dot_cols(a: &[f64], b: &[f64]) -> f64 {
    crate::util::stable_dot(a, b)
}

impl DataMatrix {
    /// Internal constructor for generated data known to be finite.
    pub(crate) fn from_columns_checked_fast(
        names: Vec<String>,
        n_rows: usize,
        values: Vec<f64>,
    ) -> DataMatrix {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        DataMatrix::from_raw_columns_unchecked(names, n_rows, values)
    }
}
