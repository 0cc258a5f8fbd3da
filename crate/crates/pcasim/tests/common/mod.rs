//! Shared test oracles and fixtures.
//!
//! The eigenvalue oracles evaluate closed-form characteristic-polynomial
//! roots and are independent of the crate's Jacobi solver.

#![allow(dead_code)]

use pcasim::rng::Rng;
use pcasim::{DataMatrix, SymMatrix};

/// Eigenvalues of a symmetric 2×2 matrix, descending, by the quadratic formula.
pub fn eig2_closed_form(a: f64, b: f64, d: f64) -> [f64; 2] {
    let mid = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mid + radius, mid - radius]
}

/// Eigenvalues of a symmetric 3×3 matrix, descending, by the trigonometric
/// solution of the cubic characteristic polynomial.
pub fn eig3_closed_form(m: &SymMatrix) -> [f64; 3] {
    assert_eq!(m.dim(), 3);
    let (a11, a22, a33) = (m.get(0, 0), m.get(1, 1), m.get(2, 2));
    let (a12, a13, a23) = (m.get(0, 1), m.get(0, 2), m.get(1, 2));
    let p1 = a12 * a12 + a13 * a13 + a23 * a23;
    if p1 == 0.0 {
        let mut diag = [a11, a22, a33];
        diag.sort_by(|x, y| y.total_cmp(x));
        return diag;
    }
    let q = (a11 + a22 + a33) / 3.0;
    let p2 = (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) + (a33 - q) * (a33 - q) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    // B = (M - qI) / p, symmetric
    let b11 = (a11 - q) / p;
    let b22 = (a22 - q) / p;
    let b33 = (a33 - q) / p;
    let b12 = a12 / p;
    let b13 = a13 / p;
    let b23 = a23 / p;
    let det_b = b11 * (b22 * b33 - b23 * b23) - b12 * (b12 * b33 - b23 * b13)
        + b13 * (b12 * b23 - b22 * b13);
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    pearson(&rx, &ry)
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    cov / (vx.sqrt() * vy.sqrt())
}

/// Random symmetric matrix with entries in `[-scale, scale]`.
pub fn random_symmetric(dim: usize, scale: f64, rng: &mut Rng) -> SymMatrix {
    let entries: Vec<f64> = (0..dim * (dim + 1) / 2)
        .map(|_| rng.next_in_range(-scale, scale))
        .collect();
    let mut it = entries.into_iter();
    let mut vals = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = it.next().unwrap();
            vals[i * dim + j] = v;
            vals[j * dim + i] = v;
        }
    }
    SymMatrix::new(dim, vals).unwrap()
}

/// Factor-model dataset: every column loads on one shared latent factor plus
/// independent noise, giving a strong, well-separated first component.
/// Column j is `w_j·f + s_j·e_j` with `w_j ∈ [1, 2]`, `s_j ∈ [0.3, 0.8]`.
pub fn factor_dataset(n: usize, d: usize, seed: u64) -> DataMatrix {
    let mut coef_rng = Rng::from_seed(seed ^ 0xDEADBEEF);
    let weights: Vec<f64> = (0..d).map(|_| coef_rng.next_in_range(1.0, 2.0)).collect();
    let noise: Vec<f64> = (0..d).map(|_| coef_rng.next_in_range(0.3, 0.8)).collect();
    let mut rng = Rng::from_seed(seed);
    let mut columns = vec![Vec::with_capacity(n); d];
    for _ in 0..n {
        let f = rng.next_normal();
        for j in 0..d {
            columns[j].push(weights[j] * f + noise[j] * rng.next_normal());
        }
    }
    let names = (0..d).map(|c| format!("c{c}")).collect();
    DataMatrix::from_columns(names, columns).unwrap()
}

/// Sixteen-column fixture for AAD sweeps: columns 0–7 share a common factor
/// (informative), columns 8–15 carry near-zero variance.
pub fn aad_fixture(n: usize, seed: u64) -> DataMatrix {
    let d = 16;
    let mut rng = Rng::from_seed(seed);
    let mut columns = vec![Vec::with_capacity(n); d];
    for _ in 0..n {
        let f = rng.next_normal();
        for (j, col) in columns.iter_mut().enumerate() {
            if j < 8 {
                col.push(f + 0.3 * rng.next_normal());
            } else {
                col.push(0.01 * rng.next_normal());
            }
        }
    }
    let names = (0..d).map(|c| format!("c{c}")).collect();
    DataMatrix::from_columns(names, columns).unwrap()
}

/// Independently permutes the rows of every column, destroying all
/// cross-column dependence while keeping the marginals.
pub fn independent_resample(data: &DataMatrix, seed: u64) -> DataMatrix {
    let n = data.n_rows();
    let mut rng = Rng::from_seed(seed);
    let columns: Vec<Vec<f64>> = (0..data.n_cols())
        .map(|c| {
            let mut col = data.column(c).to_vec();
            // Fisher-Yates
            for i in (1..n).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                col.swap(i, j);
            }
            col
        })
        .collect();
    DataMatrix::from_columns(data.col_names().to_vec(), columns).unwrap()
}

/// Gaussian per-cell perturbation `x + eta·sigma_col·delta`.
pub fn noisy_copy(data: &DataMatrix, eta: f64, seed: u64) -> DataMatrix {
    let stats = pcasim::ColumnStats::fit(data, pcasim::PreprocessMode::Center);
    let mut rng = Rng::from_seed(seed);
    let columns: Vec<Vec<f64>> = (0..data.n_cols())
        .map(|c| {
            let sigma = stats.stds()[c];
            data.column(c)
                .iter()
                .map(|&x| x + eta * sigma * rng.next_normal())
                .collect()
        })
        .collect();
    DataMatrix::from_columns(data.col_names().to_vec(), columns).unwrap()
}
