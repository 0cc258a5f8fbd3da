//! PCA fitting: sorted eigenpairs and explained-variance ratios of the
//! preprocessed dataset.
//!
//! A [`PcaModel`] keeps the preprocessing statistics it was fitted with, so
//! projecting the fitting set reproduces the training-time scores exactly.
//! Explained-variance ratios are eigenvalues of the covariance divided by
//! their total; eigenvalues that are negative by no more than `1e-9 · trace`
//! are clamped to zero first, anything more negative is an error.

use crate::error::{Error, Result};
use crate::ingest::{ColumnStats, DataMatrix, PreprocessSpec};
use crate::linalg::{covariance, eigh};

/// Total variance at or below this is treated as no variance at all.
const ZERO_TRACE_TOL: f64 = 1e-15;
/// Eigenvalues may undershoot zero by this fraction of the trace.
const PSD_REL_TOL: f64 = 1e-9;
/// Relative eigenvalue gap under which the leading eigenplane is degenerate.
const DEGENERATE_REL_GAP: f64 = 1e-6;

/// Fitted PCA representation of one dataset.
#[derive(Debug, Clone)]
pub struct PcaModel {
    d: usize,
    p: usize,
    /// Explained-variance ratios of the retained components, descending.
    ratios: Vec<f64>,
    /// All `d` eigenvalues of the covariance, descending, clamped at zero.
    eigenvalues: Vec<f64>,
    /// Row-major d×p; column k is the k-th principal axis.
    components: Vec<f64>,
    stats: ColumnStats,
    spec: PreprocessSpec,
    degenerate_first: bool,
}

impl PcaModel {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major d×p principal axes.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Copy of the k-th principal axis (a unit d-vector).
    pub fn component(&self, k: usize) -> Vec<f64> {
        (0..self.d).map(|r| self.components[r * self.p + k]).collect()
    }

    pub fn first_component(&self) -> Vec<f64> {
        self.component(0)
    }

    pub fn spec(&self) -> &PreprocessSpec {
        &self.spec
    }

    pub fn stats(&self) -> &ColumnStats {
        &self.stats
    }

    /// True when the two leading eigenvalues are (numerically) tied, which
    /// makes the first principal direction arbitrary within the eigenplane.
    pub fn degenerate_first(&self) -> bool {
        self.degenerate_first
    }
}

/// Fits PCA on `data` after applying `spec`, retaining `p` components.
pub fn fit(data: &DataMatrix, spec: &PreprocessSpec, p: usize) -> Result<PcaModel> {
    let stats = ColumnStats::fit(data, spec.mode);
    let x = stats.apply(data)?;
    fit_preprocessed(&x, stats, *spec, p)
}

/// Fits PCA on already-preprocessed data, recording the given statistics.
pub(crate) fn fit_preprocessed(
    x: &DataMatrix,
    stats: ColumnStats,
    spec: PreprocessSpec,
    p: usize,
) -> Result<PcaModel> {
    let d = x.n_cols();
    if p == 0 || p > d {
        return Err(Error::InvalidP { p, d });
    }
    let s = covariance(x)?;
    let trace = s.trace();
    if trace <= ZERO_TRACE_TOL {
        return Err(Error::DegenerateData);
    }
    let decomp = eigh(&s)?;
    let mut eigenvalues = Vec::with_capacity(d);
    for &l in decomp.eigenvalues() {
        if l < -PSD_REL_TOL * trace {
            return Err(Error::NotPositiveSemiDefinite { eigenvalue: l });
        }
        eigenvalues.push(l.max(0.0));
    }
    let total: f64 = eigenvalues.iter().sum();
    if total <= ZERO_TRACE_TOL {
        return Err(Error::DegenerateData);
    }
    debug_assert!(
        (eigenvalues.iter().map(|l| l / total).sum::<f64>() - 1.0).abs() <= 1e-9,
        "explained-variance ratios must sum to one"
    );
    let ratios: Vec<f64> = eigenvalues[..p].iter().map(|l| l / total).collect();
    let degenerate_first = d >= 2 && (eigenvalues[0] - eigenvalues[1]) / total <= DEGENERATE_REL_GAP;
    let mut components = vec![0.0; d * p];
    for k in 0..p {
        for r in 0..d {
            components[r * p + k] = decomp.component(r, k);
        }
    }
    Ok(PcaModel {
        d,
        p,
        ratios,
        eigenvalues,
        components,
        stats,
        spec,
        degenerate_first,
    })
}

/// Projects `data` onto the model's principal axes: `Z = X̃·A`.
///
/// `data` is transformed with the statistics stored at fit time. The result
/// is an n×p score matrix with columns named `pc1…pcp`.
pub fn project(model: &PcaModel, data: &DataMatrix) -> Result<DataMatrix> {
    if data.n_cols() != model.d {
        return Err(Error::DimensionMismatch {
            expected: model.d,
            got: data.n_cols(),
        });
    }
    let x = model.stats.apply(data)?;
    let n = x.n_rows();
    let p = model.p;
    let mut values = vec![0.0; n * p];
    for k in 0..p {
        let out_col = &mut values[k * n..(k + 1) * n];
        for c in 0..model.d {
            let w = model.components[c * p + k];
            if w == 0.0 {
                continue;
            }
            for (o, v) in out_col.iter_mut().zip(x.column(c)) {
                *o += w * v;
            }
        }
    }
    let names = (1..=p).map(|k| format!("pc{k}")).collect();
    Ok(DataMatrix::from_raw_columns_unchecked(names, n, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::PreprocessMode;
    use crate::util::{stable_mean, stable_std};

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn line_y_eq_x() -> DataMatrix {
        let ts = [-2.0, -1.0, 0.0, 1.0, 2.0];
        DataMatrix::from_rows(
            names(&["x", "y"]),
            &ts.iter().map(|&t| vec![t, t]).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn rank_one_data_explains_everything_with_first_component() {
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        let model = fit(&line_y_eq_x(), &spec, 2).unwrap();
        assert!((model.ratios()[0] - 1.0).abs() <= 1e-12);
        assert!(model.ratios()[1].abs() <= 1e-12);
        let a1 = model.first_component();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a1[0] - inv_sqrt2).abs() <= 1e-12);
        assert!((a1[1] - inv_sqrt2).abs() <= 1e-12);
    }

    #[test]
    fn score_variances_equal_eigenvalues_on_the_fitting_set() {
        let data = DataMatrix::from_rows(
            names(&["a", "b", "c"]),
            &[
                vec![1.0, 0.5, -2.0],
                vec![2.0, -1.5, 0.25],
                vec![-0.75, 3.0, 1.0],
                vec![0.5, 0.25, -0.5],
                vec![-1.5, 1.0, 2.5],
            ],
        )
        .unwrap();
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        let model = fit(&data, &spec, 3).unwrap();
        let scores = project(&model, &data).unwrap();
        for k in 0..3 {
            let col = scores.column(k);
            let mean = stable_mean(col);
            let var = stable_std(col, mean).powi(2);
            assert!(
                (var - model.eigenvalues()[k]).abs() <= 1e-9 * (1.0 + model.eigenvalues()[k]),
                "component {k}: score variance {var} vs eigenvalue {}",
                model.eigenvalues()[k]
            );
        }
    }

    #[test]
    fn rank_one_projection_reconstructs_centered_data() {
        let data = line_y_eq_x();
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        let model = fit(&data, &spec, 1).unwrap();
        let scores = project(&model, &data).unwrap();
        let a1 = model.first_component();
        let centered = model.stats().apply(&data).unwrap();
        for r in 0..data.n_rows() {
            for c in 0..2 {
                let reconstructed = scores.get(r, 0) * a1[c];
                assert!((reconstructed - centered.get(r, c)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn p_zero_is_invalid() {
        let spec = PreprocessSpec::default();
        assert!(matches!(
            fit(&line_y_eq_x(), &spec, 0),
            Err(Error::InvalidP { p: 0, d: 2 })
        ));
    }

    #[test]
    fn projecting_wrong_width_data_fails() {
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        let model = fit(&line_y_eq_x(), &spec, 2).unwrap();
        let narrow =
            DataMatrix::from_rows(names(&["x"]), &[vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(
            project(&model, &narrow),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn constant_data_is_degenerate() {
        let data = DataMatrix::from_rows(
            names(&["a", "b"]),
            &[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        assert!(matches!(fit(&data, &spec, 2), Err(Error::DegenerateData)));
    }

    #[test]
    fn tied_leading_eigenvalues_set_the_degenerate_flag() {
        let data = DataMatrix::from_rows(
            names(&["a", "b"]),
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
        )
        .unwrap();
        let spec = PreprocessSpec::with_mode(PreprocessMode::Center);
        let model = fit(&data, &spec, 2).unwrap();
        assert!(model.degenerate_first());
    }

    #[test]
    fn fit_is_deterministic() {
        let data = DataMatrix::from_rows(
            names(&["a", "b"]),
            &[vec![0.3, -1.2], vec![1.7, 0.4], vec![-0.9, 2.2]],
        )
        .unwrap();
        let spec = PreprocessSpec::with_mode(PreprocessMode::Zscore);
        let m1 = fit(&data, &spec, 2).unwrap();
        let m2 = fit(&data, &spec, 2).unwrap();
        let bits = |xs: &[f64]| xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(m1.ratios()), bits(m2.ratios()));
        assert_eq!(bits(m1.components()), bits(m2.components()));
    }
}
