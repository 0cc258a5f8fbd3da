//! Report schemas and rendering for the three output formats.
//!
//! JSON is the precision format: fields serialize in declaration order and
//! floats round-trip exactly, so parsing a report and re-serializing it is
//! byte-idempotent. CSV keeps full precision in a flat layout. Tables are
//! for humans, fixed-width with numbers at four significant figures.

use serde::{Deserialize, Serialize};

use pcasim::{ExperimentResult, MetricReport};

/// JSON shape of a `compare` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub metrics: CompareMetrics,
    pub config: CompareConfig,
    pub flags: CompareFlags,
    pub inputs: CompareInputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareMetrics {
    pub delta_lambda: f64,
    pub delta_theta: f64,
    pub corr_diff: f64,
    pub ks_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub preprocess: String,
    pub p: usize,
    pub categorical: String,
    pub raw_spectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareFlags {
    pub degenerate_a: bool,
    pub degenerate_b: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareInputs {
    pub path_a: String,
    pub path_b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub d: usize,
}

impl CompareReport {
    pub fn from_metric_report(report: &MetricReport, path_a: &str, path_b: &str) -> Self {
        CompareReport {
            metrics: CompareMetrics {
                delta_lambda: report.delta_lambda,
                delta_theta: report.delta_theta,
                corr_diff: report.corr_diff,
                ks_mean: report.ks_mean,
            },
            config: CompareConfig {
                preprocess: report.preprocess.mode.to_string(),
                p: report.p,
                categorical: report.preprocess.categorical.to_string(),
                raw_spectrum: report.raw_spectrum,
            },
            flags: CompareFlags {
                degenerate_a: report.degenerate_a,
                degenerate_b: report.degenerate_b,
            },
            inputs: CompareInputs {
                path_a: path_a.to_string(),
                path_b: path_b.to_string(),
                n_a: report.n_a,
                n_b: report.n_b,
                d: report.d,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "delta_lambda,delta_theta,corr_diff,ks_mean,p,d,n_a,n_b,preprocess,categorical,\
             raw_spectrum,degenerate_a,degenerate_b\n",
        );
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            full(self.metrics.delta_lambda),
            full(self.metrics.delta_theta),
            full(self.metrics.corr_diff),
            full(self.metrics.ks_mean),
            self.config.p,
            self.inputs.d,
            self.inputs.n_a,
            self.inputs.n_b,
            self.config.preprocess,
            self.config.categorical,
            self.config.raw_spectrum,
            self.flags.degenerate_a,
            self.flags.degenerate_b,
        ));
        out
    }

    pub fn to_table(&self) -> String {
        let rows = vec![
            ("delta_lambda".to_string(), sig4(self.metrics.delta_lambda)),
            ("delta_theta".to_string(), sig4(self.metrics.delta_theta)),
            ("corr_diff".to_string(), sig4(self.metrics.corr_diff)),
            ("ks_mean".to_string(), sig4(self.metrics.ks_mean)),
            ("p".to_string(), self.config.p.to_string()),
            ("d".to_string(), self.inputs.d.to_string()),
            ("n_a".to_string(), self.inputs.n_a.to_string()),
            ("n_b".to_string(), self.inputs.n_b.to_string()),
            ("preprocess".to_string(), self.config.preprocess.clone()),
            ("categorical".to_string(), self.config.categorical.clone()),
            ("raw_spectrum".to_string(), self.config.raw_spectrum.to_string()),
            ("degenerate_a".to_string(), self.flags.degenerate_a.to_string()),
            ("degenerate_b".to_string(), self.flags.degenerate_b.to_string()),
        ];
        key_value_table(&rows)
    }
}

/// JSON shape of a single-selection `aad` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AadReport {
    pub aad: f64,
    pub selection: AadSelection,
    pub config: AadConfig,
    pub inputs: AadInputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AadSelection {
    pub selected: Vec<usize>,
    pub complement: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AadConfig {
    pub preprocess: String,
    pub categorical: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AadInputs {
    pub path: String,
    pub n: usize,
    pub d: usize,
}

impl AadReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let selected = self
            .selection
            .selected
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(";");
        format!("selected,aad\n{},{}\n", selected, full(self.aad))
    }

    pub fn to_table(&self) -> String {
        let selected = self
            .selection
            .selected
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let rows = vec![
            ("aad".to_string(), sig4(self.aad)),
            ("selected".to_string(), selected),
            (
                "complement_size".to_string(),
                self.selection.complement.len().to_string(),
            ),
            ("preprocess".to_string(), self.config.preprocess.clone()),
            ("n".to_string(), self.inputs.n.to_string()),
            ("d".to_string(), self.inputs.d.to_string()),
        ];
        key_value_table(&rows)
    }
}

/// Table rendering of a harness result (JSON/CSV come from the library).
pub fn experiment_table(result: &ExperimentResult) -> String {
    let csv = result.to_csv_string();
    let mut lines = csv.lines();
    let header: Vec<String> = lines
        .next()
        .unwrap_or_default()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows: Vec<Vec<String>> = lines
        .map(|line| {
            line.split(',')
                .map(|cell| match cell.parse::<f64>() {
                    Ok(v) if cell.contains('.') || cell.contains('e') => sig4(v),
                    _ => cell.to_string(),
                })
                .collect()
        })
        .collect();
    aligned_table(&header, &rows)
}

/// `key  value` lines with the keys padded to a common width.
fn key_value_table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

/// Fixed-width columns sized to their widest cell.
fn aligned_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in rows {
        for (c, cell) in row.iter().enumerate().take(cols) {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |cells: &[String], out: &mut String| {
        let line: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<width$}", width = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    render(header, &mut out);
    for row in rows {
        render(row, &mut out);
    }
    out
}

/// Four significant figures: fixed-point in a comfortable range, scientific
/// notation outside it.
pub fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..4).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.3e}")
    }
}

/// Full-precision float for CSV cells: shortest round-trip form, `-0`
/// normalized to `0`.
fn full(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        serde_json::to_string(&x).expect("finite float")
    }
}
