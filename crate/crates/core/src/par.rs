//! Row-parallel kernels with a fixed reduction order.
//!
//! Every reduction is split into per-row partial sums which are then added
//! sequentially, so results are bit-identical with or without the `parallel`
//! feature and independent of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sum of `row(i)` for `i in 0..n_rows`, partials combined in index order.
pub fn sum_rows<F>(n_rows: usize, row: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let partials: Vec<f64> = (0..n_rows).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<f64> = (0..n_rows).map(row).collect();
    partials.into_iter().fold(0.0, |acc, x| acc + x)
}

/// Calls `row(i, chunk)` for each contiguous chunk of length `row_len`.
pub fn for_each_row_mut<F>(out: &mut [f64], row_len: usize, row: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    out.par_chunks_mut(row_len).enumerate().for_each(|(i, chunk)| row(i, chunk));
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(row_len).enumerate().for_each(|(i, chunk)| row(i, chunk));
}

/// Order-preserving map over independent jobs (e.g. batches of solves).
pub fn map_jobs<T, R, F>(items: &[T], job: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return items.par_iter().map(job).collect();
    #[cfg(not(feature = "parallel"))]
    return items.iter().map(job).collect();
}
