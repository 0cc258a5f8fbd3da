//! Dataset loading and deterministic preprocessing.
//!
//! A [`DataMatrix`] is a validated n×d numeric table: every value is finite,
//! there are at least two rows, and column names are unique. CSV ingestion
//! (RFC-4180-style, UTF-8, header row, `.` decimal separator) either parses a
//! column as numbers or treats it as categorical and applies the configured
//! [`CategoricalPolicy`]. Missing cells are always an error; imputation would
//! silently distort the covariance every metric is built on.
//!
//! Preprocessing is explicit and recorded: [`PreprocessMode::Center`]
//! subtracts per-column means, [`PreprocessMode::Zscore`] additionally
//! divides by the sample standard deviation. Columns with zero variance are
//! centered only (they become all-zero) and flagged on the fitted
//! [`ColumnStats`].

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::{stable_mean, stable_std};

/// Column scaling applied before PCA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PreprocessMode {
    /// Subtract per-column means.
    Center,
    /// Subtract means and divide by sample standard deviations.
    #[default]
    Zscore,
    /// Leave the data untouched.
    None,
}

impl fmt::Display for PreprocessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PreprocessMode::Center => "center",
            PreprocessMode::Zscore => "zscore",
            PreprocessMode::None => "none",
        };
        f.write_str(s)
    }
}

/// How categorical (non-numeric) CSV columns are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CategoricalPolicy {
    /// Encode categories as integer codes in first-appearance order.
    #[default]
    OrdinalEncode,
    /// Remove the column (a warning is logged).
    Drop,
    /// Refuse the file.
    Reject,
}

impl fmt::Display for CategoricalPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CategoricalPolicy::OrdinalEncode => "ordinal",
            CategoricalPolicy::Drop => "drop",
            CategoricalPolicy::Reject => "reject",
        };
        f.write_str(s)
    }
}

/// Preprocessing configuration, recorded in every metric report.
///
/// The zero-variance policy is fixed: such columns are centered only, which
/// leaves them all-zero, and the fitted [`ColumnStats`] flags them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PreprocessSpec {
    pub mode: PreprocessMode,
    pub categorical: CategoricalPolicy,
}

impl PreprocessSpec {
    pub fn with_mode(mode: PreprocessMode) -> Self {
        PreprocessSpec {
            mode,
            ..Default::default()
        }
    }
}

/// An n×d numeric table with named columns, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n_rows: usize,
    n_cols: usize,
    col_names: Vec<String>,
    /// Column-major values, `values[c * n_rows + r]`.
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from per-column value vectors.
    pub fn from_columns(col_names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidArgument("matrix needs at least one column".into()));
        }
        if col_names.len() != columns.len() {
            return Err(Error::LengthMismatch(format!(
                "{} column names for {} columns",
                col_names.len(),
                columns.len()
            )));
        }
        let n_rows = columns[0].len();
        if n_rows < 2 {
            return Err(Error::TooFewRows { got: n_rows, need: 2 });
        }
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::LengthMismatch("columns have unequal lengths".into()));
        }
        let mut seen = HashSet::new();
        for name in &col_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::SchemaMismatch(format!("duplicate column name `{name}`")));
            }
        }
        let n_cols = columns.len();
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for (c, col) in columns.into_iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::ParseError {
                        row: r + 1,
                        col: c + 1,
                        message: format!("non-finite value {v}"),
                    });
                }
            }
            values.extend(col);
        }
        Ok(DataMatrix {
            n_rows,
            n_cols,
            col_names,
            values,
        })
    }

    /// Builds a matrix from row slices; convenient in tests.
    pub fn from_rows(col_names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = col_names.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::LengthMismatch("row length does not match column count".into()));
        }
        let columns = (0..d)
            .map(|c| rows.iter().map(|r| r[c]).collect())
            .collect();
        Self::from_columns(col_names, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    /// Contiguous slice of column `c`.
    pub fn column(&self, c: usize) -> &[f64] {
        &self.values[c * self.n_rows..(c + 1) * self.n_rows]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[c * self.n_rows + r]
    }

    /// Copy of row `r`.
    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.n_cols).map(|c| self.get(r, c)).collect()
    }

    pub(crate) fn from_raw_columns_unchecked(
        col_names: Vec<String>,
        n_rows: usize,
        values: Vec<f64>,
    ) -> Self {
        let n_cols = col_names.len();
        debug_assert_eq!(values.len(), n_rows * n_cols);
        DataMatrix {
            n_rows,
            n_cols,
            col_names,
            values,
        }
    }
}

/// Per-column statistics fitted on one dataset, reusable on another.
///
/// `zero_variance[c]` is set when column `c` has (numerically) no variance on
/// the fitting data; under [`PreprocessMode::Zscore`] such columns are
/// centered but not scaled, so they come out all-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    mode: PreprocessMode,
    means: Vec<f64>,
    stds: Vec<f64>,
    zero_variance: Vec<bool>,
}

/// A column counts as constant when its spread is this far below its scale.
const ZERO_VARIANCE_REL: f64 = 1e-12;

impl ColumnStats {
    /// Fits means and standard deviations on `data`.
    pub fn fit(data: &DataMatrix, mode: PreprocessMode) -> Self {
        let d = data.n_cols();
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        let mut zero_variance = Vec::with_capacity(d);
        for c in 0..d {
            let col = data.column(c);
            let mean = stable_mean(col);
            let std = stable_std(col, mean);
            let scale = mean.abs().max(1.0);
            means.push(mean);
            stds.push(std);
            zero_variance.push(std <= ZERO_VARIANCE_REL * scale);
        }
        ColumnStats {
            mode,
            means,
            stds,
            zero_variance,
        }
    }

    pub fn mode(&self) -> PreprocessMode {
        self.mode
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn zero_variance(&self) -> &[bool] {
        &self.zero_variance
    }

    /// Applies the fitted transform to `data` (which may differ from the
    /// fitting set, as long as the column count matches).
    pub fn apply(&self, data: &DataMatrix) -> Result<DataMatrix> {
        if data.n_cols() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: data.n_cols(),
            });
        }
        if self.mode == PreprocessMode::None {
            return Ok(data.clone());
        }
        let n = data.n_rows();
        let mut values = Vec::with_capacity(n * data.n_cols());
        for c in 0..data.n_cols() {
            let mean = self.means[c];
            let col = data.column(c);
            if self.mode == PreprocessMode::Zscore && self.zero_variance[c] {
                // Constant column: centering would leave only rounding
                // residue, so values inside the constant band snap to zero.
                let band = ZERO_VARIANCE_REL * mean.abs().max(1.0);
                values.extend(col.iter().map(|&x| {
                    let centered = x - mean;
                    if centered.abs() <= band {
                        0.0
                    } else {
                        centered
                    }
                }));
            } else if self.mode == PreprocessMode::Zscore {
                let std = self.stds[c];
                values.extend(col.iter().map(|&x| (x - mean) / std));
            } else {
                values.extend(col.iter().map(|&x| x - mean));
            }
        }
        Ok(DataMatrix::from_raw_columns_unchecked(
            data.col_names().to_vec(),
            n,
            values,
        ))
    }
}

/// Applies `spec.mode` to `data` with statistics fitted on `data` itself.
pub fn preprocess(data: &DataMatrix, spec: &PreprocessSpec) -> Result<DataMatrix> {
    ColumnStats::fit(data, spec.mode).apply(data)
}

/// Returns a copy of `data` with column `f` set to zero everywhere.
pub fn zero_feature(data: &DataMatrix, f: usize) -> Result<DataMatrix> {
    if f >= data.n_cols() {
        return Err(Error::IndexOutOfRange {
            index: f,
            dim: data.n_cols(),
        });
    }
    let mut out = data.clone();
    let n = out.n_rows;
    out.values[f * n..(f + 1) * n].fill(0.0);
    Ok(out)
}

/// Loads a CSV file into a [`DataMatrix`].
///
/// The first row is the header. Every data cell must be present; numeric
/// cells use `.` as the decimal separator. A column where any cell fails to
/// parse as a finite number is categorical and handled per
/// `spec.categorical`. Ordinal codes are assigned in first-appearance order,
/// so identical file bytes always produce identical codes.
pub fn load_csv(path: impl AsRef<Path>, spec: &PreprocessSpec) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.display().to_string())
        } else {
            Error::Io(e)
        }
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::InvalidArgument(format!("cannot read header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let d = headers.len();

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); d];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::ParseError {
            row: r + 1,
            col: 0,
            message: e.to_string(),
        })?;
        for (c, field) in record.iter().enumerate() {
            if field.is_empty() {
                return Err(Error::ParseError {
                    row: r + 1,
                    col: c + 1,
                    message: "missing value".into(),
                });
            }
            cells[c].push(field.to_owned());
        }
    }
    let n = cells.first().map_or(0, Vec::len);
    if n < 2 {
        return Err(Error::TooFewRows { got: n, need: 2 });
    }

    let mut names = Vec::new();
    let mut columns = Vec::new();
    for (c, raw) in cells.into_iter().enumerate() {
        match parse_numeric_column(&raw) {
            Some(parsed) => {
                for (r, v) in parsed.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::ParseError {
                            row: r + 1,
                            col: c + 1,
                            message: format!("non-finite value `{}`", raw[r]),
                        });
                    }
                }
                names.push(headers[c].clone());
                columns.push(parsed);
            }
            None => match spec.categorical {
                CategoricalPolicy::Reject => {
                    return Err(Error::CategoricalRejected(headers[c].clone()));
                }
                CategoricalPolicy::Drop => {
                    log::warn!("dropping categorical column `{}`", headers[c]);
                }
                CategoricalPolicy::OrdinalEncode => {
                    names.push(headers[c].clone());
                    columns.push(ordinal_encode(&raw));
                }
            },
        }
    }
    if columns.is_empty() {
        return Err(Error::InvalidArgument(
            "no columns remain after handling categorical columns".into(),
        ));
    }
    DataMatrix::from_columns(names, columns)
}

/// Parses every cell as `f64`; `None` marks the column as categorical.
fn parse_numeric_column(raw: &[String]) -> Option<Vec<f64>> {
    raw.iter().map(|s| s.parse::<f64>().ok()).collect()
}

/// Integer codes in order of first appearance.
fn ordinal_encode(raw: &[String]) -> Vec<f64> {
    let mut seen: Vec<&str> = Vec::new();
    raw.iter()
        .map(|s| {
            if let Some(pos) = seen.iter().position(|&v| v == s.as_str()) {
                pos as f64
            } else {
                seen.push(s);
                (seen.len() - 1) as f64
            }
        })
        .collect()
}
