//! Inter-dataset similarity metrics.
//!
//! Two datasets drawn from the same underlying distribution have nearly the
//! same PCA representation, so differences in that representation measure
//! dissimilarity:
//!
//! * [`delta_lambda`] — normalized L1 distance between explained-variance
//!   spectra: `(d / (d + p − 2)) · Σᵢ |rᵢ − r'ᵢ|` over the first `p`
//!   components. With full spectra (`p = d`) the value lies in `[0, 1]`;
//!   the maximum 1 is attained against a flat spectrum.
//! * [`delta_theta`] — the angle between the two first principal axes,
//!   folded so parallel and anti-parallel both count as zero, normalized by
//!   `2/π` into `[0, 1]`.
//! * [`aad`] — average of `delta_theta` between a dataset and copies of it
//!   with each *non-selected* feature zeroed; a model-agnostic score for
//!   feature-selection quality (lower means the discarded features mattered
//!   less).
//!
//! [`corr_matrix_diff`] and [`ks_mean`] are conventional baselines carried
//! along for comparison reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::{zero_feature, ColumnStats, DataMatrix, PreprocessMode, PreprocessSpec};
use crate::linalg::{covariance, eigh};
use crate::pca;
use crate::util::{norm2, stable_dot};

/// Tolerance on `‖a‖ = 1` for angle inputs.
const UNIT_NORM_TOL: f64 = 1e-8;
/// Slack allowed when validating that a spectrum is non-increasing.
const DESCENDING_SLACK: f64 = 1e-12;

/// Everything measured for one dataset pair, plus how it was measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub delta_lambda: f64,
    pub delta_theta: f64,
    pub corr_diff: f64,
    pub ks_mean: f64,
    pub p: usize,
    pub d: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub preprocess: PreprocessSpec,
    /// True when `delta_lambda` was computed on raw eigenvalues instead of
    /// explained-variance ratios (experimental, off by default).
    pub raw_spectrum: bool,
    /// Leading-eigenvalue ties per input; Δθ is uninformative when set.
    pub degenerate_a: bool,
    pub degenerate_b: bool,
    pub provenance: Provenance,
}

/// Where the compared inputs came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_a: Option<String>,
    pub source_b: Option<String>,
    pub seed: Option<u64>,
}

/// A set of selected feature indices within a d-column dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSubset {
    d: usize,
    selected: Vec<usize>,
}

impl FeatureSubset {
    /// Validates indices against `d`, sorts and deduplicates them.
    pub fn new(d: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut selected: Vec<usize> = indices.into_iter().collect();
        for &i in &selected {
            if i >= d {
                return Err(Error::IndexOutOfRange { index: i, dim: d });
            }
        }
        selected.sort_unstable();
        selected.dedup();
        Ok(FeatureSubset { d, selected })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Non-selected indices, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.d).filter(|i| !self.selected.contains(i)).collect()
    }
}

/// Normalized difference between two explained-variance spectra (first `p`
/// entries): `(d / (d + p − 2)) · Σᵢ |rᵢ − r'ᵢ|`.
///
/// For `p = 1` the factor degenerates to `d / (d − 1)` and the result may
/// exceed the unit interval; with full normalized spectra (`p = d`) it is
/// bounded by 1.
pub fn delta_lambda(r: &[f64], r_prime: &[f64], d: usize, p: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument("delta_lambda needs d >= 2".into()));
    }
    if p == 0 {
        return Err(Error::InvalidP { p, d });
    }
    if r.len() < p || r_prime.len() < p {
        return Err(Error::LengthMismatch(format!(
            "spectra of lengths {} and {} are shorter than p = {p}",
            r.len(),
            r_prime.len()
        )));
    }
    for spectrum in [r, r_prime] {
        for i in 1..p {
            if spectrum[i] > spectrum[i - 1] + DESCENDING_SLACK {
                return Err(Error::NotDescending(i));
            }
        }
    }
    let factor = d as f64 / (d + p - 2) as f64;
    let sum: f64 = (0..p).map(|i| (r[i] - r_prime[i]).abs()).sum();
    Ok(factor * sum)
}

/// Normalized angle between two first principal axes, in `[0, 1]`.
///
/// Defined as `(2/π) · min(arccos(a·a'), arccos(−a·a'))`; the minimum folds
/// away the arbitrary sign of an eigenvector. Computed through chord lengths
/// (`θ = 2·atan2(‖a − a'‖, ‖a + a'‖)`), which is algebraically the same but
/// stays accurate where the arccosine loses precision, i.e. for nearly
/// parallel or anti-parallel inputs. Identical inputs give exactly zero.
pub fn delta_theta(a: &[f64], a_prime: &[f64]) -> Result<f64> {
    if a.len() != a_prime.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: a_prime.len(),
        });
    }
    for v in [a, a_prime] {
        let norm = norm2(v);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitVector(norm));
        }
    }
    let diff: Vec<f64> = a.iter().zip(a_prime).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = a.iter().zip(a_prime).map(|(x, y)| x + y).collect();
    let n_diff = norm2(&diff);
    let n_sum = norm2(&sum);
    let (small, big) = if n_diff <= n_sum {
        (n_diff, n_sum)
    } else {
        (n_sum, n_diff)
    };
    Ok(4.0 / std::f64::consts::PI * small.atan2(big))
}

/// Compares two datasets with independently fitted PCA models.
pub fn compare(
    a: &DataMatrix,
    b: &DataMatrix,
    spec: &PreprocessSpec,
    p: usize,
) -> Result<MetricReport> {
    compare_opts(a, b, spec, p, false)
}

/// [`compare`] with the experimental raw-eigenvalue spectrum option.
pub fn compare_opts(
    a: &DataMatrix,
    b: &DataMatrix,
    spec: &PreprocessSpec,
    p: usize,
    raw_spectrum: bool,
) -> Result<MetricReport> {
    check_schema(a, b)?;
    let d = a.n_cols();
    let model_a = pca::fit(a, spec, p)?;
    let model_b = pca::fit(b, spec, p)?;
    let dl = if raw_spectrum {
        delta_lambda(model_a.eigenvalues(), model_b.eigenvalues(), d, p)?
    } else {
        delta_lambda(model_a.ratios(), model_b.ratios(), d, p)?
    };
    let dt = delta_theta(&model_a.first_component(), &model_b.first_component())?;
    Ok(MetricReport {
        delta_lambda: dl,
        delta_theta: dt,
        corr_diff: corr_matrix_diff(a, b)?,
        ks_mean: ks_mean(a, b)?,
        p,
        d,
        n_a: a.n_rows(),
        n_b: b.n_rows(),
        preprocess: *spec,
        raw_spectrum,
        degenerate_a: model_a.degenerate_first(),
        degenerate_b: model_b.degenerate_first(),
        provenance: Provenance::default(),
    })
}

/// First principal axis of an already-preprocessed matrix.
fn first_pc(x: &DataMatrix) -> Result<Vec<f64>> {
    let s = covariance(x)?;
    if s.trace() <= 1e-15 {
        return Err(Error::DegenerateData);
    }
    Ok(eigh(&s)?.eigenvector(0))
}

/// Average Angle Difference for a feature selection.
///
/// Preprocessing statistics are fitted once on the full dataset; every
/// non-selected feature is then zeroed *in the preprocessed matrix*, so the
/// zeroed column is the only thing that differs between the compared
/// matrices. The per-feature angles are averaged over the ascending
/// complement indices, which keeps the result independent of any internal
/// parallelism.
pub fn aad(data: &DataMatrix, subset: &FeatureSubset, spec: &PreprocessSpec) -> Result<f64> {
    if subset.d() != data.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: data.n_cols(),
            got: subset.d(),
        });
    }
    if data.n_cols() < 2 {
        return Err(Error::InvalidArgument("aad needs at least 2 columns".into()));
    }
    let complement = subset.complement();
    if complement.is_empty() {
        return Err(Error::EmptyComplement);
    }
    let stats = ColumnStats::fit(data, spec.mode);
    let x = stats.apply(data)?;
    let base = first_pc(&x)?;
    let deltas = per_feature_angles(&x, &base, &complement)?;
    Ok(deltas.iter().sum::<f64>() / deltas.len() as f64)
}

/// Δθ between the dataset's first axis and each feature-zeroed copy.
pub(crate) fn per_feature_angles(
    x: &DataMatrix,
    base_pc: &[f64],
    features: &[usize],
) -> Result<Vec<f64>> {
    let results = exec::map_indexed(features.len(), |i| -> Result<f64> {
        let zeroed = zero_feature(x, features[i])?;
        delta_theta(base_pc, &first_pc(&zeroed)?)
    });
    results.into_iter().collect()
}

/// Frobenius norm of the difference between the two Pearson correlation
/// matrices. Zero-variance columns contribute zero rows (diagonal included).
pub fn corr_matrix_diff(a: &DataMatrix, b: &DataMatrix) -> Result<f64> {
    check_schema(a, b)?;
    let ca = correlation_matrix(a);
    let cb = correlation_matrix(b);
    let sum: f64 = ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum.sqrt())
}

fn correlation_matrix(m: &DataMatrix) -> Vec<f64> {
    let d = m.n_cols();
    let n = m.n_rows();
    let stats = ColumnStats::fit(m, PreprocessMode::Center);
    let centered = stats.apply(m).expect("dimensions match by construction");
    let denom = (n - 1) as f64;
    let mut corr = vec![0.0; d * d];
    for i in 0..d {
        if stats.zero_variance()[i] {
            continue;
        }
        corr[i * d + i] = 1.0;
        for j in (i + 1)..d {
            if stats.zero_variance()[j] {
                continue;
            }
            let cov = stable_dot(centered.column(i), centered.column(j)) / denom;
            let r = (cov / (stats.stds()[i] * stats.stds()[j])).clamp(-1.0, 1.0);
            corr[i * d + j] = r;
            corr[j * d + i] = r;
        }
    }
    corr
}

/// Mean over columns of the two-sample Kolmogorov–Smirnov statistic
/// `sup_x |ECDF_A(x) − ECDF_B(x)|` (statistic only, no p-value).
pub fn ks_mean(a: &DataMatrix, b: &DataMatrix) -> Result<f64> {
    check_schema(a, b)?;
    let d = a.n_cols();
    let stats = exec::map_indexed(d, |c| ks_statistic(a.column(c), b.column(c)));
    Ok(stats.iter().sum::<f64>() / d as f64)
}

/// Two-sample KS statistic by a merged scan over both sorted samples. Both
/// ECDFs advance past a shared value before the gap is recorded, which
/// handles ties within and across the samples.
pub fn ks_statistic(xs: &[f64], ys: &[f64]) -> f64 {
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut max_gap = 0.0_f64;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < xs.len() && xs[i] == v {
            i += 1;
        }
        while j < ys.len() && ys[j] == v {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        max_gap = max_gap.max(gap);
    }
    max_gap
}

fn check_schema(a: &DataMatrix, b: &DataMatrix) -> Result<()> {
    if a.n_cols() != b.n_cols() {
        return Err(Error::SchemaMismatch(format!(
            "column counts differ: {} vs {}",
            a.n_cols(),
            b.n_cols()
        )));
    }
    for (x, y) in a.col_names().iter().zip(b.col_names()) {
        if x != y {
            return Err(Error::SchemaMismatch(format!(
                "column names differ: `{x}` vs `{y}`"
            )));
        }
    }
    Ok(())
}
