//! Order-insensitive floating-point reductions.
//!
//! Column statistics (means, variances, covariance entries) are summed in a
//! canonical order: the operands are sorted by `f64::total_cmp` before a
//! compensated (Neumaier) summation. Two datasets that differ only by a row
//! permutation therefore produce bit-identical statistics, which in turn
//! makes every downstream metric exactly row-order invariant.

/// Sums `buf` after sorting it. The buffer is consumed as scratch space.
pub(crate) fn sorted_sum(buf: &mut [f64]) -> f64 {
    buf.sort_unstable_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &x in buf.iter() {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean of a column, independent of element order.
pub(crate) fn stable_mean(values: &[f64]) -> f64 {
    let mut buf = values.to_vec();
    sorted_sum(&mut buf) / values.len() as f64
}

/// Dot product of two equal-length slices, independent of element order.
pub(crate) fn stable_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut buf: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    sorted_sum(&mut buf)
}

/// Plain Euclidean norm. Order of `v` is fixed by the caller, so no sorting.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Formats a float for CSV output: shortest round-trip form (scientific
/// where shorter), `-0` normalized to `0`.
pub(crate) fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        serde_json::to_string(&x).expect("finite float")
    }
}

/// Sample standard deviation (n-1 denominator) around a known mean.
pub(crate) fn stable_std(values: &[f64], mean: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut buf: Vec<f64> = values.iter().map(|&x| (x - mean) * (x - mean)).collect();
    (sorted_sum(&mut buf) / (n - 1) as f64).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_sum_is_permutation_invariant() {
        let xs = vec![1e16, 1.0, -1e16, 3.25, 0.1, -7.5];
        let mut a = xs.clone();
        let mut b = xs;
        b.reverse();
        b.swap(0, 3);
        assert_eq!(sorted_sum(&mut a).to_bits(), sorted_sum(&mut b).to_bits());
    }

    #[test]
    fn mean_and_std_match_hand_values() {
        let xs = [1.0, 2.0, 3.0];
        assert_eq!(stable_mean(&xs), 2.0);
        assert_eq!(stable_std(&xs, 2.0), 1.0);
    }

    #[test]
    fn dot_of_orthogonal_slices_is_zero() {
        assert_eq!(stable_dot(&[1.0, 0.0], &[0.0, 5.0]), 0.0);
    }
}
