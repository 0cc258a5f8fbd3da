//! Dense symmetric linear algebra: covariance and eigendecomposition.
//!
//! The eigensolver is a cyclic Jacobi iteration. Problem sizes here are at
//! most a few hundred columns, where Jacobi is robust, converges
//! quadratically, and produces orthonormal eigenvectors by construction.
//! Convergence is declared when the off-diagonal Frobenius norm drops below
//! `1e-12` times the Frobenius norm of the input; the sweep cap is 100.

use crate::error::{Error, Result};
use crate::exec;
use crate::ingest::DataMatrix;
use crate::util::{stable_dot, stable_mean};

/// Relative tolerance accepted when validating symmetry.
const SYMMETRY_REL: f64 = 1e-12;
/// Off-diagonal Frobenius norm threshold, relative to the input norm.
const JACOBI_REL_TOL: f64 = 1e-12;
/// Maximum number of Jacobi sweeps before giving up.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Permitted deviation of `QᵀQ` from the identity.
const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Permitted column mean (relative to column scale) for "centered" inputs.
const CENTERED_REL_TOL: f64 = 1e-10;

/// A d×d real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    /// Row-major values; kept exactly symmetric.
    values: Vec<f64>,
}

impl SymMatrix {
    /// Validates symmetry (within `1e-12 · max|S|`) and wraps the values.
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::LengthMismatch(format!(
                "expected {} values for a {dim}x{dim} matrix, got {}",
                dim * dim,
                values.len()
            )));
        }
        let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut max_asym = 0.0_f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asym = max_asym.max((values[i * dim + j] - values[j * dim + i]).abs());
            }
        }
        if max_asym > SYMMETRY_REL * max_abs {
            return Err(Error::NotSymmetric { max_asym });
        }
        Ok(SymMatrix { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Builds from the upper triangle (inclusive), mirroring exactly.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = upper(i, j);
                values[i * dim + j] = v;
                values[j * dim + i] = v;
            }
        }
        SymMatrix { dim, values }
    }
}

/// Sorted eigenpairs of a symmetric matrix.
///
/// Eigenvalues are descending; eigenvector `i` is column `i` of `vectors` and
/// is normalized with its largest-magnitude component positive (ties broken
/// by the lowest index), so identical inputs yield identical bytes.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    /// Row-major d×d; column i pairs with eigenvalue i.
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Copy of eigenvector `i`.
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.vectors[r * self.dim + i]).collect()
    }

    /// Component `r` of eigenvector `i`.
    pub fn component(&self, r: usize, i: usize) -> f64 {
        self.vectors[r * self.dim + i]
    }
}

/// Sample covariance of centered data: `S = X̃ᵀX̃ / (n−1)`.
///
/// The input must already be centered (column means within `1e-10` of zero
/// relative to the column scale); entries are accumulated order-insensitively
/// so row permutations of the input produce bit-identical output.
pub fn covariance(centered: &DataMatrix) -> Result<SymMatrix> {
    let n = centered.n_rows();
    let d = centered.n_cols();
    if n < 2 {
        return Err(Error::TooFewRows { got: n, need: 2 });
    }
    for c in 0..d {
        let col = centered.column(c);
        let scale = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mean = stable_mean(col);
        if mean.abs() > CENTERED_REL_TOL * scale {
            return Err(Error::NotCentered { col: c, mean });
        }
    }
    let denom = (n - 1) as f64;
    // One task per leading column; each computes its row of the upper triangle.
    let rows: Vec<Vec<f64>> = exec::map_indexed(d, |i| {
        let col_i = centered.column(i);
        (i..d)
            .map(|j| stable_dot(col_i, centered.column(j)) / denom)
            .collect()
    });
    Ok(SymMatrix::from_upper(d, |i, j| rows[i][j - i]))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eigh(s: &SymMatrix) -> Result<EigenDecomposition> {
    let d = s.dim();
    let mut a = s.values().to_vec();
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }

    let norm = frobenius(&a);
    let tol = JACOBI_REL_TOL * norm;
    let mut converged = off_diagonal_norm(&a, d) <= tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, d, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&a, d) <= tol;
    }

    // Sort eigenpairs by descending eigenvalue, stably.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j * d + j].total_cmp(&a[i * d + i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * d + i]).collect();
    let mut vectors = vec![0.0; d * d];
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..d {
            vectors[r * d + new_col] = v[r * d + old_col];
        }
    }
    fix_signs(&mut vectors, d);
    Ok(EigenDecomposition {
        dim: d,
        eigenvalues,
        vectors,
    })
}

fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &[f64], d: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += a[i * d + j] * a[i * d + j];
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut [f64], v: &mut [f64], d: usize, p: usize, q: usize) {
    let apq = a[p * d + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        // Avoid overflow in theta²; the limit of the closed form.
        0.5 / theta
    } else {
        let sign = if theta < 0.0 { -1.0 } else { 1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let app = a[p * d + p];
    let aqq = a[q * d + q];
    a[p * d + p] = app - t * apq;
    a[q * d + q] = aqq + t * apq;
    a[p * d + q] = 0.0;
    a[q * d + p] = 0.0;
    for k in 0..d {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * d + p];
        let akq = a[k * d + q];
        let new_kp = akp - s * (akq + tau * akp);
        let new_kq = akq + s * (akp - tau * akq);
        a[k * d + p] = new_kp;
        a[p * d + k] = new_kp;
        a[k * d + q] = new_kq;
        a[q * d + k] = new_kq;
    }
    for k in 0..d {
        let vkp = v[k * d + p];
        let vkq = v[k * d + q];
        v[k * d + p] = vkp - s * (vkq + tau * vkp);
        v[k * d + q] = vkq + s * (vkp - tau * vkq);
    }
}

/// Flips eigenvector signs so the largest-magnitude component is positive.
fn fix_signs(vectors: &mut [f64], d: usize) {
    for col in 0..d {
        let mut arg = 0;
        let mut best = 0.0_f64;
        for r in 0..d {
            let mag = vectors[r * d + col].abs();
            if mag > best {
                best = mag;
                arg = r;
            }
        }
        if vectors[arg * d + col] < 0.0 {
            for r in 0..d {
                vectors[r * d + col] = -vectors[r * d + col];
            }
        }
    }
}

/// A d×d matrix intended to be orthogonal, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::LengthMismatch(format!(
                "expected {} values for a {dim}x{dim} matrix, got {}",
                dim * dim,
                values.len()
            )));
        }
        Ok(SquareMatrix { dim, values })
    }

    pub fn identity(dim: usize) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        SquareMatrix { dim, values }
    }

    /// Plane rotation by `theta` radians acting on coordinates `(i, j)`.
    ///
    /// Applied to row vectors, it sends `eᵢ` towards `eⱼ`:
    /// `x'ᵢ = xᵢ·cosθ − xⱼ·sinθ`, `x'ⱼ = xᵢ·sinθ + xⱼ·cosθ`.
    pub fn rotation(dim: usize, i: usize, j: usize, theta: f64) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
        if j >= dim {
            return Err(Error::IndexOutOfRange { index: j, dim });
        }
        if i == j {
            return Err(Error::InvalidArgument(
                "rotation plane needs two distinct coordinates".into(),
            ));
        }
        let mut q = Self::identity(dim);
        let (c, s) = (theta.cos(), theta.sin());
        q.values[i * dim + i] = c;
        q.values[i * dim + j] = s;
        q.values[j * dim + i] = -s;
        q.values[j * dim + j] = c;
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    /// Largest absolute entry of `QᵀQ − I`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim;
        let mut max_dev = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let mut dot = 0.0;
                for k in 0..d {
                    dot += self.values[k * d + i] * self.values[k * d + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((dot - target).abs());
            }
        }
        max_dev
    }
}

/// Maps every row `x` of `data` to `x·Q`. Fails unless `QᵀQ = I` within
/// `1e-10`. Column names are preserved.
pub fn apply_orthogonal(data: &DataMatrix, q: &SquareMatrix) -> Result<DataMatrix> {
    let d = data.n_cols();
    if q.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q.dim(),
        });
    }
    let max_dev = q.orthogonality_defect();
    if max_dev > ORTHOGONALITY_TOL {
        return Err(Error::NotOrthogonal { max_dev });
    }
    let n = data.n_rows();
    let mut values = vec![0.0; n * d];
    for j in 0..d {
        let out_col = &mut values[j * n..(j + 1) * n];
        for c in 0..d {
            let w = q.get(c, j);
            if w == 0.0 {
                continue;
            }
            for (o, x) in out_col.iter_mut().zip(data.column(c)) {
                *o += w * x;
            }
        }
    }
    Ok(DataMatrix::from_raw_columns_unchecked(
        data.col_names().to_vec(),
        n,
        values,
    ))
}

/// Cholesky factor `L` (lower-triangular, row-major) with `LLᵀ = S`.
/// Used for sampling from multivariate normals in the experiment harness.
pub(crate) fn cholesky(s: &SymMatrix) -> Result<Vec<f64>> {
    let d = s.dim();
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = s.get(i, j);
            for k in 0..j {
                sum -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveSemiDefinite { eigenvalue: sum });
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    Ok(l)
}
