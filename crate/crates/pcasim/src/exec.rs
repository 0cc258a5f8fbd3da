//! Execution strategy for data-parallel inner loops.
//!
//! With the default `parallel` feature the loops below run on rayon;
//! without it they fall back to plain sequential iteration. Results are
//! always collected in index order, so the feature (and the thread count)
//! never changes output values.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
